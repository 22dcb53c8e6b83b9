//! Observed difference-hierarchy levels of a trace.
//!
//! A finite table can never certify that a fuzzy set *is* approximable
//! within `n` mind changes — only that nothing seen so far needs more. The
//! classifier therefore reports observed lower bounds: `observed_n` is the
//! smallest level the trace is still consistent with, and growing the
//! horizon can only raise it.

use std::fmt;

use thiserror::Error;

use crate::mindchange::{pi_profile, sigma_profile, update_profile, MindChangeProfile, UpdateProfile};
use crate::numeric::UnitRational;
use crate::trace::{ApproximationTrace, TraceShape};

/// Errors for the crisp-bridge and counting-function operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("operation requires a Crisp trace, found {found}")]
    NotCrisp { found: TraceShape },
    #[error("anchor violation at ({x},0): expected 0, found {found}")]
    BadAnchor { x: usize, found: UnitRational },
    #[error("dimension mismatch: trace is {trace_x}x{trace_s}, counting table is {count_x}x{count_s}")]
    DimensionMismatch {
        trace_x: usize,
        trace_s: usize,
        count_x: usize,
        count_s: usize,
    },
}

/// Per-element mind-change and update counts plus the overall observed
/// levels they certify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    sigma_changes: Vec<usize>,
    pi_changes: Vec<usize>,
    updates: Vec<usize>,
    observed_n: usize,
    observed_co_n: usize,
    observed_update_level: Option<usize>,
    anchor_zero_failures: Vec<usize>,
    anchor_one_failures: Vec<usize>,
}

impl LevelReport {
    pub fn domain_size(&self) -> usize {
        self.sigma_changes.len()
    }

    pub fn sigma_changes(&self, x: usize) -> usize {
        self.sigma_changes[x]
    }

    pub fn pi_changes(&self, x: usize) -> usize {
        self.pi_changes[x]
    }

    pub fn updates(&self, x: usize) -> usize {
        self.updates[x]
    }

    /// Smallest level consistent with the observed rising-side changes:
    /// `max_x sigma_changes(x) + 1`.
    pub fn observed_n(&self) -> usize {
        self.observed_n
    }

    /// Smallest co-level consistent with the falling-side profile, read
    /// directly off the trace with the anchor-1 convention.
    pub fn observed_co_n(&self) -> usize {
        self.observed_co_n
    }

    /// Largest per-element update count; only meaningful for rising traces.
    pub fn observed_update_level(&self) -> Option<usize> {
        self.observed_update_level
    }

    /// Elements whose first value is not 0, invalidating the `observed_n`
    /// reading. Reported rather than thrown.
    pub fn anchor_zero_failures(&self) -> &[usize] {
        &self.anchor_zero_failures
    }

    /// Elements whose first value is not 1, invalidating the
    /// `observed_co_n` reading.
    pub fn anchor_one_failures(&self) -> &[usize] {
        &self.anchor_one_failures
    }

    pub fn anchors_zero_ok(&self) -> bool {
        self.anchor_zero_failures.is_empty()
    }

    pub fn anchors_one_ok(&self) -> bool {
        self.anchor_one_failures.is_empty()
    }

    /// CSV report: one row per element plus a summary row.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("x,sigma_changes,pi_changes,updates\n");
        for x in 0..self.domain_size() {
            out.push_str(&format!(
                "{x},{},{},{}\n",
                self.sigma_changes[x], self.pi_changes[x], self.updates[x]
            ));
        }
        let update_level = match self.observed_update_level {
            Some(level) => level.to_string(),
            None => "NA".to_owned(),
        };
        out.push_str(&format!(
            "summary,observed_n={},observed_co_n={},observed_update_level={update_level}\n",
            self.observed_n, self.observed_co_n
        ));
        out
    }
}

impl fmt::Display for LevelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "observed_n={} observed_co_n={}",
            self.observed_n, self.observed_co_n
        )?;
        if let Some(level) = self.observed_update_level {
            writeln!(f, "observed_update_level={level}")?;
        }
        if !self.anchors_zero_ok() {
            writeln!(f, "anchor 0 fails at x={:?}", self.anchor_zero_failures)?;
        }
        if !self.anchors_one_ok() {
            writeln!(f, "anchor 1 fails at x={:?}", self.anchor_one_failures)?;
        }
        Ok(())
    }
}

fn build_report(
    trace: &ApproximationTrace,
    sigma_changes: Vec<usize>,
    sigma: &MindChangeProfile,
    pi: &MindChangeProfile,
    updates: &UpdateProfile,
) -> LevelReport {
    debug_assert_eq!(sigma.domain_size(), pi.domain_size());
    let pi_changes: Vec<usize> = (0..pi.domain_size()).map(|x| pi.change_count(x)).collect();
    let update_counts: Vec<usize> = (0..updates.domain_size())
        .map(|x| updates.count(x))
        .collect();
    let observed_n = sigma_changes.iter().max().copied().unwrap_or(0) + 1;
    let observed_co_n = pi_changes.iter().max().copied().unwrap_or(0) + 1;
    let observed_update_level = (trace.shape() == TraceShape::Sigma1)
        .then(|| update_counts.iter().max().copied().unwrap_or(0));
    let anchor_zero_failures = (0..trace.domain_size())
        .filter(|&x| !trace.value(x, 0).is_zero())
        .collect();
    let anchor_one_failures = (0..trace.domain_size())
        .filter(|&x| !trace.value(x, 0).is_one())
        .collect();
    LevelReport {
        sigma_changes,
        pi_changes,
        updates: update_counts,
        observed_n,
        observed_co_n,
        observed_update_level,
        anchor_zero_failures,
        anchor_one_failures,
    }
}

/// Classifies a trace by its mind-change and update profiles.
pub fn classify(trace: &ApproximationTrace) -> LevelReport {
    let sigma = sigma_profile(trace);
    let pi = pi_profile(trace);
    let updates = update_profile(trace);
    let sigma_changes = (0..sigma.domain_size())
        .map(|x| sigma.change_count(x))
        .collect();
    build_report(trace, sigma_changes, &sigma, &pi, &updates)
}

/// Collapses a trace to `{0, 1}` with the strict-majority rule:
/// values above `1/2` map to `1`, everything else (including `1/2` itself)
/// maps to `0`. Crisp traces pass through unchanged.
pub fn threshold_to_crisp(trace: &ApproximationTrace) -> ApproximationTrace {
    let half = UnitRational::one_half();
    let rows = trace
        .rows()
        .map(|row| {
            row.iter()
                .map(|v| {
                    if *v > half {
                        UnitRational::one()
                    } else {
                        UnitRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    ApproximationTrace::validate(rows, TraceShape::Crisp)
        .expect("thresholded values are 0 or 1 by construction")
}

/// Reads a crisp anchor-0 trace as a member of the graded hierarchy.
///
/// The rising-side change counts are derived from the flip bookkeeping
/// rather than the sign recursion: the first flip away from 0 happens while
/// the sign is still `+`, and every later flip reverses direction, so the
/// change count is `max(flips - 1, 0)`. Agreement with [`classify`] on
/// every crisp trace is what makes the crisp case embed at its classical
/// level, and the tests check the two routes against each other.
pub fn embed_crisp(trace: &ApproximationTrace) -> Result<LevelReport, HierarchyError> {
    if trace.shape() != TraceShape::Crisp {
        return Err(HierarchyError::NotCrisp {
            found: trace.shape(),
        });
    }
    for x in 0..trace.domain_size() {
        if !trace.value(x, 0).is_zero() {
            return Err(HierarchyError::BadAnchor {
                x,
                found: trace.value(x, 0).clone(),
            });
        }
    }
    let sigma = sigma_profile(trace);
    let pi = pi_profile(trace);
    let updates = update_profile(trace);
    let sigma_changes = (0..trace.domain_size())
        .map(|x| updates.count(x).saturating_sub(1))
        .collect();
    Ok(build_report(trace, sigma_changes, &sigma, &pi, &updates))
}

/// A stage-indexed table of natural-number counters, nonincreasing in the
/// stage and forced to drop at every rising-side mind change. Values must
/// stay below `bound`.
///
/// The constructor checks only the bound and the table dimensions; the
/// monotonicity and drop conditions are the job of
/// [`verify_counting_function`], so that defective tables can be diagnosed
/// rather than rejected at the door.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingTrace {
    domain_size: usize,
    horizon: usize,
    bound: usize,
    values: Vec<usize>, // row-major
}

/// Errors constructing a [`CountingTrace`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingTraceError {
    #[error("counting table must have at least one element and one stage")]
    EmptyTable,
    #[error("row {x} has {got} stages, expected {expected}")]
    RaggedRow { x: usize, expected: usize, got: usize },
    #[error("bound must be positive")]
    ZeroBound,
    #[error("value {value} at ({x},{s}) is not below the bound {bound}")]
    ValueAboveBound {
        x: usize,
        s: usize,
        value: usize,
        bound: usize,
    },
}

impl CountingTrace {
    pub fn new(rows: Vec<Vec<usize>>, bound: usize) -> Result<Self, CountingTraceError> {
        if bound == 0 {
            return Err(CountingTraceError::ZeroBound);
        }
        if rows.is_empty() || rows[0].is_empty() {
            return Err(CountingTraceError::EmptyTable);
        }
        let horizon = rows[0].len();
        for (x, row) in rows.iter().enumerate() {
            if row.len() != horizon {
                return Err(CountingTraceError::RaggedRow {
                    x,
                    expected: horizon,
                    got: row.len(),
                });
            }
            for (s, &value) in row.iter().enumerate() {
                if value >= bound {
                    return Err(CountingTraceError::ValueAboveBound { x, s, value, bound });
                }
            }
        }
        Ok(CountingTrace {
            domain_size: rows.len(),
            horizon,
            bound,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn value(&self, x: usize, s: usize) -> usize {
        self.values[x * self.horizon + s]
    }

    /// A copy with one cell replaced; out-of-range values are rejected.
    pub fn with_value(&self, x: usize, s: usize, value: usize) -> Result<Self, CountingTraceError> {
        if value >= self.bound {
            return Err(CountingTraceError::ValueAboveBound {
                x,
                s,
                value,
                bound: self.bound,
            });
        }
        let mut next = self.clone();
        next.values[x * self.horizon + s] = value;
        Ok(next)
    }
}

/// Outcome of checking a counting table against a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountingVerdict {
    Valid,
    /// The counter rose between `s` and `s + 1`.
    NotNonincreasing { x: usize, s: usize },
    /// The rising-side sign changed at `s` but the counter did not drop.
    MissingDropAtChange { x: usize, s: usize },
}

impl CountingVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CountingVerdict::Valid)
    }
}

impl fmt::Display for CountingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountingVerdict::Valid => write!(f, "valid"),
            CountingVerdict::NotNonincreasing { x, s } => {
                write!(f, "invalid: counter rises at ({x},{s})")
            }
            CountingVerdict::MissingDropAtChange { x, s } => {
                write!(f, "invalid: no counter drop at the mind change at ({x},{s})")
            }
        }
    }
}

/// Checks that `counting` witnesses the trace's mind-change budget: the
/// counters never rise, and they strictly drop at every stage where the
/// rising-side sign flips. Returns the first violation in `(x, s)` order.
pub fn verify_counting_function(
    trace: &ApproximationTrace,
    counting: &CountingTrace,
) -> Result<CountingVerdict, HierarchyError> {
    if trace.domain_size() != counting.domain_size() || trace.horizon() != counting.horizon() {
        return Err(HierarchyError::DimensionMismatch {
            trace_x: trace.domain_size(),
            trace_s: trace.horizon(),
            count_x: counting.domain_size(),
            count_s: counting.horizon(),
        });
    }
    let sigma = sigma_profile(trace);
    for x in 0..trace.domain_size() {
        for s in 0..trace.horizon() - 1 {
            let current = counting.value(x, s);
            let next = counting.value(x, s + 1);
            if next > current {
                return Ok(CountingVerdict::NotNonincreasing { x, s });
            }
            if sigma.sign(x, s + 1) != sigma.sign(x, s) && next == current {
                return Ok(CountingVerdict::MissingDropAtChange { x, s });
            }
        }
    }
    Ok(CountingVerdict::Valid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> UnitRational {
        text.parse().unwrap()
    }

    fn trace(table: &[&[&str]], shape: TraceShape) -> ApproximationTrace {
        let rows = table
            .iter()
            .map(|row| row.iter().map(|v| q(v)).collect())
            .collect();
        ApproximationTrace::validate(rows, shape).unwrap()
    }

    #[test]
    fn rising_trace_sits_at_level_one() {
        let report = classify(&trace(&[&["0", "1/4", "1/2"]], TraceShape::Sigma1));
        assert_eq!(report.observed_n(), 1);
        assert!(report.anchors_zero_ok());
        assert_eq!(report.observed_update_level(), Some(2));
    }

    #[test]
    fn alternating_crisp_trace_needs_three_levels() {
        let report = classify(&trace(&[&["0", "1", "0", "1"]], TraceShape::Crisp));
        assert_eq!(report.updates(0), 3);
        assert_eq!(report.sigma_changes(0), 2);
        assert_eq!(report.observed_n(), 3);
    }

    #[test]
    fn worked_delta2_example_needs_three_levels() {
        let report = classify(&trace(&[&["0", "1/2", "1/4", "3/4"]], TraceShape::Delta2));
        assert_eq!(report.observed_n(), 3);
        assert_eq!(report.observed_update_level(), None);
    }

    #[test]
    fn observed_level_predicate_is_monotone() {
        let report = classify(&trace(&[&["0", "1/2", "1/4", "3/4"]], TraceShape::Delta2));
        let n = report.observed_n();
        assert!((n..n + 4).all(|level| report.observed_n() <= level));
        assert!(!(1..n).any(|level| report.observed_n() <= level));
    }

    #[test]
    fn co_level_agrees_with_complement_route() {
        for table in [
            vec![vec![q("1"), q("1/2"), q("3/4")]],
            vec![vec![q("0"), q("1/2"), q("1/4"), q("3/4")]],
            vec![vec![q("1"), q("1"), q("0")], vec![q("1/2"), q("0"), q("1")]],
        ] {
            let t = ApproximationTrace::validate(table, TraceShape::Delta2).unwrap();
            let direct = classify(&t).observed_co_n();
            let via_complement = classify(&t.complement()).observed_n();
            assert_eq!(direct, via_complement);
        }
    }

    #[test]
    fn threshold_applies_the_strict_majority_rule() {
        let t = threshold_to_crisp(&trace(&[&["0", "3/4", "2/5", "1"]], TraceShape::Delta2));
        assert_eq!(t.shape(), TraceShape::Crisp);
        assert_eq!(t.row(0), &[q("0"), q("1"), q("0"), q("1")]);

        // 1/2 itself maps to 0: the inequality is strict.
        let t = threshold_to_crisp(&trace(&[&["0", "1/2"]], TraceShape::Sigma1));
        assert_eq!(t.row(0), &[q("0"), q("0")]);
    }

    #[test]
    fn threshold_is_identity_on_crisp_traces() {
        let a = trace(&[&["0", "1", "0", "1"], &["1", "0", "0", "1"]], TraceShape::Crisp);
        assert_eq!(threshold_to_crisp(&a), a);
    }

    #[test]
    fn embed_crisp_counts_changes_from_flips() {
        let report = embed_crisp(&trace(&[&["0", "0", "0"]], TraceShape::Crisp)).unwrap();
        assert_eq!(report.updates(0), 0);
        assert_eq!(report.sigma_changes(0), 0);
        assert_eq!(report.observed_n(), 1);

        let report = embed_crisp(&trace(&[&["0", "1"]], TraceShape::Crisp)).unwrap();
        assert_eq!(report.updates(0), 1);
        assert_eq!(report.sigma_changes(0), 0);
        assert_eq!(report.observed_n(), 1);

        let report = embed_crisp(&trace(&[&["0", "1", "0"]], TraceShape::Crisp)).unwrap();
        assert_eq!(report.updates(0), 2);
        assert_eq!(report.sigma_changes(0), 1);
        assert_eq!(report.observed_n(), 2);
    }

    #[test]
    fn embed_crisp_agrees_with_the_sign_recursion() {
        for table in [
            vec![vec![q("0"), q("1"), q("0"), q("1"), q("1")]],
            vec![vec![q("0"), q("0"), q("1"), q("1"), q("0")]],
            vec![vec![q("0")], ],
        ] {
            let t = ApproximationTrace::validate(table, TraceShape::Crisp).unwrap();
            let formula = embed_crisp(&t).unwrap();
            let recursion = classify(&t);
            for x in 0..t.domain_size() {
                assert_eq!(formula.sigma_changes(x), recursion.sigma_changes(x));
            }
            assert_eq!(formula.observed_n(), recursion.observed_n());
        }
    }

    #[test]
    fn embed_crisp_rejects_wrong_shape_and_anchor() {
        let fuzzy = trace(&[&["0", "1/2"]], TraceShape::Delta2);
        assert!(matches!(
            embed_crisp(&fuzzy),
            Err(HierarchyError::NotCrisp { .. })
        ));
        let anchored_high = trace(&[&["1", "0"]], TraceShape::Crisp);
        assert!(matches!(
            embed_crisp(&anchored_high),
            Err(HierarchyError::BadAnchor { x: 0, .. })
        ));
    }

    #[test]
    fn counting_function_worked_examples() {
        let a = trace(&[&["0", "1/2", "1/4", "3/4"]], TraceShape::Delta2);
        let good = CountingTrace::new(vec![vec![2, 2, 1, 0]], 3).unwrap();
        assert!(verify_counting_function(&a, &good).unwrap().is_valid());

        let stuck = CountingTrace::new(vec![vec![2, 2, 2, 0]], 3).unwrap();
        assert_eq!(
            verify_counting_function(&a, &stuck).unwrap(),
            CountingVerdict::MissingDropAtChange { x: 0, s: 1 }
        );

        let flat = trace(&[&["0", "1/4", "1/2"]], TraceShape::Sigma1);
        let zeros = CountingTrace::new(vec![vec![0, 0, 0]], 1).unwrap();
        assert!(verify_counting_function(&flat, &zeros).unwrap().is_valid());
    }

    #[test]
    fn counting_function_rejects_rises_and_mismatches() {
        let a = trace(&[&["0", "1/2"]], TraceShape::Sigma1);
        let rising = CountingTrace::new(vec![vec![0, 1]], 2).unwrap();
        assert_eq!(
            verify_counting_function(&a, &rising).unwrap(),
            CountingVerdict::NotNonincreasing { x: 0, s: 0 }
        );

        let short = CountingTrace::new(vec![vec![0]], 1).unwrap();
        assert!(matches!(
            verify_counting_function(&a, &short),
            Err(HierarchyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn counting_trace_enforces_bound_and_dims() {
        assert!(matches!(
            CountingTrace::new(vec![vec![3]], 3),
            Err(CountingTraceError::ValueAboveBound { .. })
        ));
        assert!(matches!(
            CountingTrace::new(vec![], 1),
            Err(CountingTraceError::EmptyTable)
        ));
        assert!(matches!(
            CountingTrace::new(vec![vec![0, 0], vec![0]], 1),
            Err(CountingTraceError::RaggedRow { x: 1, .. })
        ));
        assert!(matches!(
            CountingTrace::new(vec![vec![0]], 0),
            Err(CountingTraceError::ZeroBound)
        ));
    }

    /// No counting table with a bound below the observed level can be
    /// valid: checked exhaustively for the two-change worked example.
    #[test]
    fn no_counting_witness_fits_under_the_observed_level() {
        let a = trace(&[&["0", "1/2", "1/4", "3/4"]], TraceShape::Delta2);
        assert_eq!(classify(&a).observed_n(), 3);
        for code in 0..16u32 {
            let row: Vec<usize> = (0..4).map(|s| ((code >> s) & 1) as usize).collect();
            let candidate = CountingTrace::new(vec![row], 2).unwrap();
            assert!(
                !verify_counting_function(&a, &candidate).unwrap().is_valid(),
                "bound-2 table {code:b} should not witness a level-3 trace"
            );
        }
    }

    #[test]
    fn csv_report_has_per_element_rows_and_a_summary() {
        let report = classify(&trace(&[&["0", "1/2", "1/4", "3/4"]], TraceShape::Delta2));
        assert_eq!(
            report.render_csv(),
            "x,sigma_changes,pi_changes,updates\n0,2,3,3\nsummary,observed_n=3,observed_co_n=4,observed_update_level=NA\n"
        );

        let report = classify(&trace(
            &[&["0", "1/4", "1/2"], &["0", "0", "1"]],
            TraceShape::Sigma1,
        ));
        assert_eq!(
            report.render_csv(),
            "x,sigma_changes,pi_changes,updates\n\
             0,0,1,2\n\
             1,0,1,1\n\
             summary,observed_n=1,observed_co_n=2,observed_update_level=2\n"
        );
    }
}
