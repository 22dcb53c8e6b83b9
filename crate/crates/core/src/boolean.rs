//! Difference decompositions of bounded-mind-change traces.
//!
//! A trace whose per-element mind-change count stays below its level `n`
//! splits into `k + 1` pairs of rising traces (`n = 2k+1` or `2k+2`), and
//! the max–min recombination of those pairs reproduces the original's
//! limits while staying within the same mind-change budget. [`decompose`]
//! builds the pairs, [`recompose`] evaluates the recombination, and
//! [`verify_theorem`] mechanically checks the guarantees on a finite table.
//!
//! The case split in [`decompose`] is driven by the number of sign changes
//! *strictly before* the current stage. Counting the change at the current
//! stage as well (the inclusive prefix count of
//! [`MindChangeProfile::change_count_prefix`]) looks equivalent but is not:
//! it consults one comparison of lookahead, freezes each rising component
//! one stage short of its peak, and loses the final value whenever an
//! element's last phase is a descent that stays above the frozen value.
//! `tests::inclusive_count_would_lose_the_limit` keeps the counterexample.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::hierarchy::classify;
use crate::mindchange::{sigma_profile, MindChangeProfile};
use crate::numeric::UnitRational;
use crate::trace::{
    parse_trace_header, parse_trace_rows, render_trace_into, ApproximationTrace, TraceError,
    TraceShape,
};

/// One difference of rising traces: the recombination contributes
/// `min(included, 1 - excluded)` pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferencePair {
    pub included: ApproximationTrace,
    pub excluded: ApproximationTrace,
}

/// Errors from building, combining, or verifying decompositions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BooleanError {
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("anchor violation at ({x},0): expected 0, found {found}")]
    AnchorViolation { x: usize, found: UnitRational },
    #[error("element {x} has {changes} mind changes, exceeding level {level} (budget {})", level - 1)]
    LevelExceeded {
        x: usize,
        changes: usize,
        level: usize,
    },
    #[error("decomposition needs {expected} pairs for level {level}, found {found}")]
    WrongPairCount {
        level: usize,
        expected: usize,
        found: usize,
    },
    #[error("pair {pair} component is {found}, expected Sigma1")]
    NotRising { pair: usize, found: TraceShape },
    #[error("level {level} is odd, so the last excluded trace must be identically 0; pair {pair} is not")]
    LastExcludedNotEmpty { level: usize, pair: usize },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// The `(included, excluded)` pairs witnessing a level, plus the level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanDecomposition {
    level: usize,
    pairs: Vec<DifferencePair>,
}

impl BooleanDecomposition {
    /// Wraps externally supplied pairs, enforcing the structural
    /// invariants: `k + 1` pairs of equally sized rising traces, with the
    /// last excluded trace identically 0 when the level is odd.
    pub fn new(level: usize, pairs: Vec<DifferencePair>) -> Result<Self, BooleanError> {
        if level == 0 {
            return Err(BooleanError::ZeroLevel);
        }
        let expected = (level - 1) / 2 + 1;
        if pairs.len() != expected {
            return Err(BooleanError::WrongPairCount {
                level,
                expected,
                found: pairs.len(),
            });
        }
        let first = &pairs[0].included;
        for (index, pair) in pairs.iter().enumerate() {
            for trace in [&pair.included, &pair.excluded] {
                if trace.shape() != TraceShape::Sigma1 {
                    return Err(BooleanError::NotRising {
                        pair: index + 1,
                        found: trace.shape(),
                    });
                }
                if trace.domain_size() != first.domain_size() || trace.horizon() != first.horizon()
                {
                    return Err(BooleanError::Trace(TraceError::DimensionMismatch {
                        left_x: first.domain_size(),
                        left_s: first.horizon(),
                        right_x: trace.domain_size(),
                        right_s: trace.horizon(),
                    }));
                }
            }
        }
        if level % 2 == 1 {
            let last = &pairs[expected - 1].excluded;
            let all_zero = last.rows().all(|row| row.iter().all(UnitRational::is_zero));
            if !all_zero {
                return Err(BooleanError::LastExcludedNotEmpty {
                    level,
                    pair: expected,
                });
            }
        }
        Ok(BooleanDecomposition { level, pairs })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `k` with `level = 2k+1` or `2k+2`.
    pub fn half_count(&self) -> usize {
        (self.level - 1) / 2
    }

    pub fn pairs(&self) -> &[DifferencePair] {
        &self.pairs
    }

    pub fn domain_size(&self) -> usize {
        self.pairs[0].included.domain_size()
    }

    pub fn horizon(&self) -> usize {
        self.pairs[0].included.horizon()
    }
}

/// Splits a trace into `k + 1` rising pairs, provided every element keeps
/// within the mind-change budget `level - 1` and starts at 0. The error
/// names the first offending element.
///
/// For pair `i` (1-based), with `c` the number of sign changes strictly
/// before the stage at hand:
/// - `included_i` is 0 while `c < 2i-2`, copies the input while
///   `c = 2i-2`, and then freezes at its last copied value;
/// - `excluded_i` is 0 while `c < 2i-1`, copies the complement of the
///   input while `c = 2i-1`, and is 1 afterwards.
///
/// Even counts are rising phases and odd counts falling ones, so both
/// components are rising from 0 by construction.
pub fn decompose(
    trace: &ApproximationTrace,
    level: usize,
) -> Result<BooleanDecomposition, BooleanError> {
    let profile = check_preconditions(trace, level)?;
    let pair_count = (level - 1) / 2 + 1;
    let horizon = trace.horizon();
    let mut pairs = Vec::with_capacity(pair_count);
    for i in 1..=pair_count {
        let copy_at = 2 * i - 2;
        let mirror_at = 2 * i - 1;
        let mut included_rows = Vec::with_capacity(trace.domain_size());
        let mut excluded_rows = Vec::with_capacity(trace.domain_size());
        for x in 0..trace.domain_size() {
            let mut included: Vec<UnitRational> = Vec::with_capacity(horizon);
            let mut excluded = Vec::with_capacity(horizon);
            for s in 0..horizon {
                let count = profile.changes_before(x, s);
                included.push(match count.cmp(&copy_at) {
                    std::cmp::Ordering::Less => UnitRational::zero(),
                    std::cmp::Ordering::Equal => trace.value(x, s).clone(),
                    std::cmp::Ordering::Greater => {
                        // The change count is 0 at stage 0, so the freeze
                        // case can never be the first one taken.
                        assert!(s > 0, "sign-change count cannot exceed {copy_at} at stage 0");
                        included[s - 1].clone()
                    }
                });
                excluded.push(match count.cmp(&mirror_at) {
                    std::cmp::Ordering::Less => UnitRational::zero(),
                    std::cmp::Ordering::Equal => trace.value(x, s).complement(),
                    std::cmp::Ordering::Greater => UnitRational::one(),
                });
            }
            included_rows.push(included);
            excluded_rows.push(excluded);
        }
        let included = ApproximationTrace::validate(included_rows, TraceShape::Sigma1)
            .expect("included component rises from 0 by construction");
        let excluded = ApproximationTrace::validate(excluded_rows, TraceShape::Sigma1)
            .expect("excluded component rises from 0 by construction");
        pairs.push(DifferencePair { included, excluded });
    }
    BooleanDecomposition::new(level, pairs)
}

fn check_preconditions(
    trace: &ApproximationTrace,
    level: usize,
) -> Result<MindChangeProfile, BooleanError> {
    if level == 0 {
        return Err(BooleanError::ZeroLevel);
    }
    for x in 0..trace.domain_size() {
        if !trace.value(x, 0).is_zero() {
            return Err(BooleanError::AnchorViolation {
                x,
                found: trace.value(x, 0).clone(),
            });
        }
    }
    let profile = sigma_profile(trace);
    for x in 0..trace.domain_size() {
        let changes = profile.change_count(x);
        if changes + 1 > level {
            return Err(BooleanError::LevelExceeded { x, changes, level });
        }
    }
    Ok(profile)
}

/// Evaluates the max–min recombination
/// `max_i min(included_i, 1 - excluded_i)` pointwise. The result carries no
/// monotonicity claim and is tagged `Delta2`.
pub fn recompose(decomposition: &BooleanDecomposition) -> ApproximationTrace {
    let domain_size = decomposition.domain_size();
    let horizon = decomposition.horizon();
    let rows = (0..domain_size)
        .map(|x| {
            (0..horizon)
                .map(|s| {
                    decomposition
                        .pairs()
                        .iter()
                        .map(|pair| {
                            let ceiling = pair.excluded.value(x, s).complement();
                            pair.included.value(x, s).clone().min(ceiling)
                        })
                        .max()
                        .expect("decomposition has at least one pair")
                })
                .collect()
        })
        .collect();
    ApproximationTrace::validate(rows, TraceShape::Delta2)
        .expect("recombination of valid traces is a valid table")
}

/// For each element and stage, the set of pair indices (1-based) whose
/// excluded side has strictly overtaken the included side:
/// `1 - excluded_i(x,s) < included_i(x,s)`. Once a pair enters it never
/// leaves, because the left side falls and the right side rises.
pub fn barrier_history(decomposition: &BooleanDecomposition) -> Vec<Vec<BTreeSet<usize>>> {
    (0..decomposition.domain_size())
        .map(|x| {
            (0..decomposition.horizon())
                .map(|s| {
                    decomposition
                        .pairs()
                        .iter()
                        .enumerate()
                        .filter(|(_, pair)| {
                            pair.excluded.value(x, s).complement() < *pair.included.value(x, s)
                        })
                        .map(|(index, _)| index + 1)
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Per-element outcome of the final-value comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitOutcome {
    /// The input stabilized before the horizon and the finals agree.
    Matched,
    /// The input stabilized before the horizon but the finals differ.
    Mismatched,
    /// The input was still moving at the horizon; no verdict.
    Inconclusive,
}

/// A failed check, with the witnessing position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremViolation {
    FinalValueMismatch {
        x: usize,
        expected: UnitRational,
        found: UnitRational,
    },
    RecompositionLevelExceeded {
        x: usize,
        changes: usize,
        level: usize,
    },
    BarrierShrank { x: usize, s: usize, pair: usize },
    BarrierTooLarge { x: usize, size: usize, bound: usize },
}

impl fmt::Display for TheoremViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremViolation::FinalValueMismatch { x, expected, found } => write!(
                f,
                "final value mismatch at x={x}: input settles at {expected}, recombination at {found}"
            ),
            TheoremViolation::RecompositionLevelExceeded { x, changes, level } => write!(
                f,
                "recombination has {changes} mind changes at x={x}, exceeding level {level}"
            ),
            TheoremViolation::BarrierShrank { x, s, pair } => write!(
                f,
                "barrier set lost pair {pair} at (x={x}, s={s})"
            ),
            TheoremViolation::BarrierTooLarge { x, size, bound } => write!(
                f,
                "barrier set at x={x} has {size} pairs, bound is {bound}"
            ),
        }
    }
}

/// Everything [`verify_theorem`] measured, plus the violations it found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    level: usize,
    half_count: usize,
    limit_outcomes: Vec<LimitOutcome>,
    recomposition_observed_n: usize,
    barrier_history: Vec<Vec<BTreeSet<usize>>>,
    barrier_bound: usize,
    violations: Vec<TheoremViolation>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[TheoremViolation] {
        &self.violations
    }

    pub fn limit_outcome(&self, x: usize) -> LimitOutcome {
        self.limit_outcomes[x]
    }

    pub fn limit_outcomes(&self) -> &[LimitOutcome] {
        &self.limit_outcomes
    }

    pub fn recomposition_observed_n(&self) -> usize {
        self.recomposition_observed_n
    }

    pub fn barrier_history(&self) -> &[Vec<BTreeSet<usize>>] {
        &self.barrier_history
    }

    /// The cap on barrier-set sizes for this level: `k` when the level is
    /// `2k+1`, `k+1` when it is `2k+2`.
    pub fn barrier_bound(&self) -> usize {
        self.barrier_bound
    }

    fn count_outcome(&self, outcome: LimitOutcome) -> usize {
        self.limit_outcomes
            .iter()
            .filter(|&&o| o == outcome)
            .count()
    }

    /// Plain-text verification report, one line per check.
    pub fn render(&self) -> String {
        let mut out = format!(
            "theorem check level={} k={} pairs={}\n",
            self.level,
            self.half_count,
            self.half_count + 1
        );
        out.push_str(&format!(
            "limits: matched={} mismatched={} inconclusive={}\n",
            self.count_outcome(LimitOutcome::Matched),
            self.count_outcome(LimitOutcome::Mismatched),
            self.count_outcome(LimitOutcome::Inconclusive),
        ));
        out.push_str(&format!(
            "recomposition: observed_n={} budget={}\n",
            self.recomposition_observed_n, self.level
        ));
        let max_barrier = self
            .barrier_history
            .iter()
            .filter_map(|per_stage| per_stage.last().map(BTreeSet::len))
            .max()
            .unwrap_or(0);
        out.push_str(&format!(
            "barrier: max_size={max_barrier} bound={}\n",
            self.barrier_bound
        ));
        for violation in &self.violations {
            out.push_str(&format!("violation: {violation}\n"));
        }
        out.push_str(if self.passed() {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        });
        out
    }
}

/// Decomposes, recombines, and checks the guarantees:
/// final-value agreement on every element that settled before the horizon,
/// the recombination's observed level within budget, barrier sets that only
/// grow, and barrier sizes within the parity bound.
pub fn verify_theorem(
    trace: &ApproximationTrace,
    level: usize,
) -> Result<TheoremReport, BooleanError> {
    let decomposition = decompose(trace, level)?;
    let recombined = recompose(&decomposition);
    let half_count = decomposition.half_count();
    let mut violations = Vec::new();

    let input_limits = trace.limit_snapshot();
    let output_limits = recombined.limit_snapshot();
    let horizon = trace.horizon();
    let limit_outcomes: Vec<LimitOutcome> = (0..trace.domain_size())
        .map(|x| {
            if input_limits.stabilization_stage(x) + 1 < horizon {
                if input_limits.final_value(x) == output_limits.final_value(x) {
                    LimitOutcome::Matched
                } else {
                    violations.push(TheoremViolation::FinalValueMismatch {
                        x,
                        expected: input_limits.final_value(x).clone(),
                        found: output_limits.final_value(x).clone(),
                    });
                    LimitOutcome::Mismatched
                }
            } else {
                LimitOutcome::Inconclusive
            }
        })
        .collect();

    let recombined_report = classify(&recombined);
    if recombined_report.observed_n() > level {
        let profile = sigma_profile(&recombined);
        let worst = (0..recombined.domain_size())
            .max_by_key(|&x| profile.change_count(x))
            .unwrap_or(0);
        violations.push(TheoremViolation::RecompositionLevelExceeded {
            x: worst,
            changes: profile.change_count(worst),
            level,
        });
    }

    let history = barrier_history(&decomposition);
    for (x, per_stage) in history.iter().enumerate() {
        for s in 1..per_stage.len() {
            if let Some(&pair) = per_stage[s - 1].difference(&per_stage[s]).next() {
                violations.push(TheoremViolation::BarrierShrank { x, s, pair });
            }
        }
    }

    let barrier_bound = if level.is_multiple_of(2) {
        half_count + 1
    } else {
        half_count
    };
    for (x, per_stage) in history.iter().enumerate() {
        let size = per_stage.last().map_or(0, BTreeSet::len);
        if size > barrier_bound {
            violations.push(TheoremViolation::BarrierTooLarge {
                x,
                size,
                bound: barrier_bound,
            });
        }
    }

    Ok(TheoremReport {
        level,
        half_count,
        limit_outcomes,
        recomposition_observed_n: recombined_report.observed_n(),
        barrier_history: history,
        barrier_bound,
        violations,
    })
}

/// Errors reading the decomposition bundle format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleFormatError {
    #[error("line {line}: bad manifest, expected `decomp n=<int> k=<int> pairs=<int>`")]
    BadManifest { line: usize },
    #[error("manifest is inconsistent: n={level} requires k={expected_k} and pairs={expected_pairs}")]
    ManifestMismatch {
        level: usize,
        expected_k: usize,
        expected_pairs: usize,
    },
    #[error("line {line}: bad trace section header")]
    BadSectionHeader { line: usize },
    #[error("trace section {section}: {message}")]
    BadSection { section: usize, message: String },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
    #[error(transparent)]
    Invalid(#[from] BooleanError),
}

/// Renders the bundle: a manifest line `decomp n=<int> k=<int> pairs=<int>`
/// followed by the trace sections `included_1, excluded_1, included_2, ...`.
pub fn render_decomposition(decomposition: &BooleanDecomposition) -> String {
    let mut out = format!(
        "decomp n={} k={} pairs={}\n",
        decomposition.level(),
        decomposition.half_count(),
        decomposition.pairs().len()
    );
    for pair in decomposition.pairs() {
        render_trace_into(&pair.included, &mut out);
        render_trace_into(&pair.excluded, &mut out);
    }
    out
}

/// Parses and re-validates a decomposition bundle.
pub fn parse_decomposition(text: &str) -> Result<BooleanDecomposition, BundleFormatError> {
    let mut lines = text.lines().enumerate().peekable();
    let (manifest_line, manifest) = lines
        .next()
        .ok_or(BundleFormatError::BadManifest { line: 1 })?;
    let (level, half_count, pair_count) =
        parse_manifest(manifest).ok_or(BundleFormatError::BadManifest {
            line: manifest_line + 1,
        })?;
    if level == 0 || half_count != (level - 1) / 2 || pair_count != half_count + 1 {
        return Err(BundleFormatError::ManifestMismatch {
            level,
            expected_k: level.saturating_sub(1) / 2,
            expected_pairs: level.saturating_sub(1) / 2 + 1,
        });
    }
    let mut sections = Vec::with_capacity(2 * pair_count);
    for section in 1..=2 * pair_count {
        let (header_line, header) = lines.next().ok_or(BundleFormatError::BadSection {
            section,
            message: "missing trace section".to_owned(),
        })?;
        let (domain_size, horizon, shape) =
            parse_trace_header(header).ok_or(BundleFormatError::BadSectionHeader {
                line: header_line + 1,
            })?;
        let (rows, consumed) = parse_trace_rows(&mut lines, domain_size, horizon)
            .map_err(|e| BundleFormatError::BadSection {
                section,
                message: e.to_string(),
            })?;
        if consumed < domain_size {
            return Err(BundleFormatError::BadSection {
                section,
                message: format!("expected {domain_size} rows, found {consumed}"),
            });
        }
        let trace = ApproximationTrace::validate(rows, shape).map_err(|e| {
            BundleFormatError::BadSection {
                section,
                message: e.to_string(),
            }
        })?;
        sections.push(trace);
    }
    for (line, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(BundleFormatError::TrailingContent { line: line + 1 });
        }
    }
    let mut pairs = Vec::with_capacity(pair_count);
    let mut iter = sections.into_iter();
    while let (Some(included), Some(excluded)) = (iter.next(), iter.next()) {
        pairs.push(DifferencePair { included, excluded });
    }
    Ok(BooleanDecomposition::new(level, pairs)?)
}

fn parse_manifest(line: &str) -> Option<(usize, usize, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "decomp" {
        return None;
    }
    let level = parts.next()?.strip_prefix("n=")?.parse().ok()?;
    let half_count = parts.next()?.strip_prefix("k=")?.parse().ok()?;
    let pair_count = parts.next()?.strip_prefix("pairs=")?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((level, half_count, pair_count))
}
