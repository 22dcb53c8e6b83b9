//! Finite-horizon approximation machinery for fuzzy subsets of the
//! naturals, with exact rational arithmetic throughout.
//!
//! The crate revolves around one data structure, the
//! [`trace::ApproximationTrace`]: a total table `f(x, s)` of unit-interval
//! rationals over a finite domain and a finite stage horizon, tagged with
//! the monotonicity discipline it obeys. On top of it sit:
//!
//! - [`numeric`] — exact rationals in `[0, 1]`, the value type everywhere;
//! - [`trace`] — table validation, the max/min/complement set algebra,
//!   horizon limits, cut enumeration, and the trace text format;
//! - [`mindchange`] — sign recursions counting how often an approximation
//!   changes direction, and raw update counts;
//! - [`hierarchy`] — observed-level classification, the strict-majority
//!   bridge to crisp tables, and counting-function verification;
//! - [`boolean`] — difference decompositions of bounded-mind-change traces,
//!   their max–min recombination, and a mechanical verifier for the
//!   round-trip guarantees;
//! - [`gallery`] — worked example families and seeded random generators.

// Error variants carry exact rational witnesses; they are cold paths.
#![allow(clippy::result_large_err)]

pub mod boolean;
pub mod gallery;
pub mod hierarchy;
pub mod mindchange;
pub mod numeric;
pub mod trace;

pub use boolean::{
    decompose, recompose, verify_theorem, BooleanDecomposition, BooleanError, DifferencePair,
    TheoremReport,
};
pub use hierarchy::{classify, embed_crisp, threshold_to_crisp, CountingTrace, LevelReport};
pub use mindchange::{pi_profile, sigma_profile, update_profile, MindChangeProfile, Sign};
pub use numeric::{complement_value, parse_rational, RationalError, UnitRational};
pub use trace::{
    enumerate_left_cut, enumerate_right_cut, ApproximationTrace, LimitSnapshot, TraceError,
    TraceShape,
};
