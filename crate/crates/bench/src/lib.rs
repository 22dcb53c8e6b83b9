//! Shared fixtures for the criterion benchmarks.

use fuzzy_ershov::gallery::random_bounded_trace;
use fuzzy_ershov::trace::{ApproximationTrace, TraceShape};

/// A seeded workload trace of the given size and change budget.
pub fn workload(domain_size: usize, horizon: usize, level: usize) -> ApproximationTrace {
    random_bounded_trace(0xBE7C, domain_size, horizon, level, 16)
        .expect("benchmark fixture parameters are valid")
}

/// A seeded rising trace, for cut enumeration.
pub fn rising_workload(domain_size: usize, horizon: usize) -> ApproximationTrace {
    workload(domain_size, horizon, 1)
        .reshaped(TraceShape::Sigma1)
        .expect("level-1 traces validate as rising")
}
