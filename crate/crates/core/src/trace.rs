//! Finite-horizon approximation tables.
//!
//! An [`ApproximationTrace`] records the value of an approximation `f(x, s)`
//! for every element `x` below a domain size and every stage `s` below a
//! horizon, together with a shape tag describing which monotonicity
//! discipline the table obeys. Traces are immutable once validated; every
//! operation here is a pure function returning a fresh trace.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::numeric::{RationalError, UnitRational};

/// Monotonicity discipline claimed for a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceShape {
    /// No constraint beyond totality; the table may move up and down.
    Delta2,
    /// Rises from `0`: `f(x,0) = 0` and `f(x,s+1) >= f(x,s)`.
    Sigma1,
    /// Falls from `1`: `f(x,0) = 1` and `f(x,s+1) <= f(x,s)`.
    Pi1,
    /// Every value is `0` or `1`.
    Crisp,
}

impl TraceShape {
    pub fn name(self) -> &'static str {
        match self {
            TraceShape::Delta2 => "Delta2",
            TraceShape::Sigma1 => "Sigma1",
            TraceShape::Pi1 => "Pi1",
            TraceShape::Crisp => "Crisp",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "Delta2" => Some(TraceShape::Delta2),
            "Sigma1" => Some(TraceShape::Sigma1),
            "Pi1" => Some(TraceShape::Pi1),
            "Crisp" => Some(TraceShape::Crisp),
            _ => None,
        }
    }

    /// Shape of the pointwise complement of a trace with this shape.
    pub fn complemented(self) -> Self {
        match self {
            TraceShape::Sigma1 => TraceShape::Pi1,
            TraceShape::Pi1 => TraceShape::Sigma1,
            other => other,
        }
    }
}

impl fmt::Display for TraceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validation and dimension errors for traces.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace must have at least one element and one stage")]
    EmptyTable,
    #[error("row {x} has {got} stages, expected {expected}")]
    RaggedRow { x: usize, expected: usize, got: usize },
    #[error("anchor violation at ({x},0): expected {expected}, found {found}")]
    Anchor {
        x: usize,
        expected: UnitRational,
        found: UnitRational,
    },
    #[error("monotonicity violation at ({x},{s}): {shape} traces may not move {direction} there")]
    Monotonicity {
        x: usize,
        s: usize,
        shape: TraceShape,
        direction: &'static str,
    },
    #[error("crispness violation at ({x},{s}): value {found} is neither 0 nor 1")]
    Crispness {
        x: usize,
        s: usize,
        found: UnitRational,
    },
    #[error("dimension mismatch: {left_x}x{left_s} vs {right_x}x{right_s}")]
    DimensionMismatch {
        left_x: usize,
        left_s: usize,
        right_x: usize,
        right_s: usize,
    },
    #[error("cannot truncate to {requested} stages: trace has {horizon}")]
    BadTruncation { requested: usize, horizon: usize },
    #[error("operation requires a {expected} trace, found {found}")]
    WrongShape { expected: TraceShape, found: TraceShape },
}

/// A total table `f(x, s)` for `x < domain_size`, `s < horizon`, tagged with
/// the shape its values were validated against.
#[derive(Clone, PartialEq, Eq)]
pub struct ApproximationTrace {
    domain_size: usize,
    horizon: usize,
    shape: TraceShape,
    values: Vec<UnitRational>, // row-major: x * horizon + s
}

impl ApproximationTrace {
    /// Checks a raw table against the invariants of `claimed_shape` and, on
    /// success, returns the trace tagged with that shape. The error names
    /// the first violating cell in `(x, s)` scan order.
    pub fn validate(
        rows: Vec<Vec<UnitRational>>,
        claimed_shape: TraceShape,
    ) -> Result<Self, TraceError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(TraceError::EmptyTable);
        }
        let horizon = rows[0].len();
        for (x, row) in rows.iter().enumerate() {
            if row.len() != horizon {
                return Err(TraceError::RaggedRow {
                    x,
                    expected: horizon,
                    got: row.len(),
                });
            }
        }
        for (x, row) in rows.iter().enumerate() {
            match claimed_shape {
                TraceShape::Delta2 => {}
                TraceShape::Sigma1 => {
                    if !row[0].is_zero() {
                        return Err(TraceError::Anchor {
                            x,
                            expected: UnitRational::zero(),
                            found: row[0].clone(),
                        });
                    }
                    for s in 1..horizon {
                        if row[s] < row[s - 1] {
                            return Err(TraceError::Monotonicity {
                                x,
                                s,
                                shape: claimed_shape,
                                direction: "down",
                            });
                        }
                    }
                }
                TraceShape::Pi1 => {
                    if !row[0].is_one() {
                        return Err(TraceError::Anchor {
                            x,
                            expected: UnitRational::one(),
                            found: row[0].clone(),
                        });
                    }
                    for s in 1..horizon {
                        if row[s] > row[s - 1] {
                            return Err(TraceError::Monotonicity {
                                x,
                                s,
                                shape: claimed_shape,
                                direction: "up",
                            });
                        }
                    }
                }
                TraceShape::Crisp => {
                    for (s, value) in row.iter().enumerate() {
                        if !value.is_crisp() {
                            return Err(TraceError::Crispness {
                                x,
                                s,
                                found: value.clone(),
                            });
                        }
                    }
                }
            }
        }
        let domain_size = rows.len();
        let values = rows.into_iter().flatten().collect();
        Ok(ApproximationTrace {
            domain_size,
            horizon,
            shape: claimed_shape,
            values,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn shape(&self) -> TraceShape {
        self.shape
    }

    pub fn value(&self, x: usize, s: usize) -> &UnitRational {
        &self.values[x * self.horizon + s]
    }

    pub fn row(&self, x: usize) -> &[UnitRational] {
        &self.values[x * self.horizon..(x + 1) * self.horizon]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[UnitRational]> {
        self.values.chunks(self.horizon)
    }

    /// The same values re-validated under a different shape claim.
    pub fn reshaped(&self, claimed_shape: TraceShape) -> Result<Self, TraceError> {
        let rows = self.rows().map(<[UnitRational]>::to_vec).collect();
        ApproximationTrace::validate(rows, claimed_shape)
    }

    /// The prefix of the trace covering the first `horizon` stages. Every
    /// shape invariant survives truncation, so the tag is kept.
    pub fn truncated(&self, horizon: usize) -> Result<Self, TraceError> {
        if horizon == 0 || horizon > self.horizon {
            return Err(TraceError::BadTruncation {
                requested: horizon,
                horizon: self.horizon,
            });
        }
        let rows = self.rows().map(|row| row[..horizon].to_vec()).collect();
        ApproximationTrace::validate(rows, self.shape)
    }

    fn require_same_dims(&self, other: &Self) -> Result<(), TraceError> {
        if self.domain_size != other.domain_size || self.horizon != other.horizon {
            return Err(TraceError::DimensionMismatch {
                left_x: self.domain_size,
                left_s: self.horizon,
                right_x: other.domain_size,
                right_s: other.horizon,
            });
        }
        Ok(())
    }

    fn combined(
        &self,
        other: &Self,
        mut combine: impl FnMut(&UnitRational, &UnitRational) -> UnitRational,
    ) -> Result<Self, TraceError> {
        self.require_same_dims(other)?;
        let shape = if self.shape == other.shape {
            self.shape
        } else {
            TraceShape::Delta2
        };
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| combine(a, b))
            .collect();
        Ok(ApproximationTrace {
            domain_size: self.domain_size,
            horizon: self.horizon,
            shape,
            values,
        })
    }

    /// Pointwise max. The result keeps the shared shape tag, or falls back
    /// to `Delta2` when the inputs disagree.
    pub fn union(&self, other: &Self) -> Result<Self, TraceError> {
        self.combined(other, |a, b| a.max(b).clone())
    }

    /// Pointwise min, dual to [`ApproximationTrace::union`].
    pub fn intersection(&self, other: &Self) -> Result<Self, TraceError> {
        self.combined(other, |a, b| a.min(b).clone())
    }

    /// Pointwise `1 - f(x,s)`. Swaps the rising and falling shape tags.
    pub fn complement(&self) -> Self {
        ApproximationTrace {
            domain_size: self.domain_size,
            horizon: self.horizon,
            shape: self.shape.complemented(),
            values: self.values.iter().map(UnitRational::complement).collect(),
        }
    }

    /// Final values at the horizon together with stabilization stages.
    pub fn limit_snapshot(&self) -> LimitSnapshot {
        let mut finals = Vec::with_capacity(self.domain_size);
        let mut stages = Vec::with_capacity(self.domain_size);
        for row in self.rows() {
            let last = &row[self.horizon - 1];
            let mut stage = self.horizon - 1;
            while stage > 0 && row[stage - 1] == *last {
                stage -= 1;
            }
            finals.push(last.clone());
            stages.push(stage);
        }
        LimitSnapshot {
            finals,
            stabilization_stages: stages,
        }
    }
}

impl fmt::Debug for ApproximationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "trace X={} S={} shape={}",
            self.domain_size, self.horizon, self.shape
        )?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(UnitRational::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Per-element view of a trace at its horizon: the last value and the least
/// stage from which the row stays constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitSnapshot {
    finals: Vec<UnitRational>,
    stabilization_stages: Vec<usize>,
}

impl LimitSnapshot {
    pub fn final_value(&self, x: usize) -> &UnitRational {
        &self.finals[x]
    }

    pub fn stabilization_stage(&self, x: usize) -> usize {
        self.stabilization_stages[x]
    }

    pub fn len(&self) -> usize {
        self.finals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.finals.is_empty()
    }
}

/// All unit rationals whose lowest-terms denominator is at most
/// `max_denominator`, in ascending order.
pub fn rational_grid(max_denominator: u64) -> Vec<UnitRational> {
    let mut grid = BTreeSet::new();
    for den in 1..=max_denominator.max(1) {
        for num in 0..=den {
            grid.insert(UnitRational::new(num, den).expect("grid value within unit interval"));
        }
    }
    grid.into_iter().collect()
}

/// Grid rationals strictly below some value the rising trace reaches:
/// the finite-horizon lower cut of element `x`.
pub fn enumerate_left_cut(
    trace: &ApproximationTrace,
    x: usize,
    max_denominator: u64,
) -> Result<BTreeSet<UnitRational>, TraceError> {
    if trace.shape() != TraceShape::Sigma1 {
        return Err(TraceError::WrongShape {
            expected: TraceShape::Sigma1,
            found: trace.shape(),
        });
    }
    // Rising rows peak at the horizon, so one comparison per grid point
    // suffices.
    let top = trace.value(x, trace.horizon() - 1);
    Ok(rational_grid(max_denominator)
        .into_iter()
        .filter(|q| q < top)
        .collect())
}

/// Grid rationals strictly above some value the falling trace reaches:
/// the finite-horizon upper cut of element `x`.
pub fn enumerate_right_cut(
    trace: &ApproximationTrace,
    x: usize,
    max_denominator: u64,
) -> Result<BTreeSet<UnitRational>, TraceError> {
    if trace.shape() != TraceShape::Pi1 {
        return Err(TraceError::WrongShape {
            expected: TraceShape::Pi1,
            found: trace.shape(),
        });
    }
    let bottom = trace.value(x, trace.horizon() - 1);
    Ok(rational_grid(max_denominator)
        .into_iter()
        .filter(|q| q > bottom)
        .collect())
}

/// Text-format errors for trace files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceFormatError {
    #[error("line {line}: bad header, expected `trace X=<int> S=<int> shape=<Delta2|Sigma1|Pi1|Crisp>`")]
    BadHeader { line: usize },
    #[error("line {line}: expected {expected} values, found {found}")]
    BadRowLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {source}")]
    BadValue {
        line: usize,
        #[source]
        source: RationalError,
    },
    #[error("expected {expected} rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
    #[error(transparent)]
    Invalid(#[from] TraceError),
}

/// Renders the line-oriented trace format:
/// a header `trace X=<int> S=<int> shape=<tag>` followed by one line of
/// canonical rationals per element. The output is byte-reproducible.
pub fn render_trace(trace: &ApproximationTrace) -> String {
    let mut out = String::new();
    render_trace_into(trace, &mut out);
    out
}

pub(crate) fn render_trace_into(trace: &ApproximationTrace, out: &mut String) {
    out.push_str(&format!(
        "trace X={} S={} shape={}\n",
        trace.domain_size(),
        trace.horizon(),
        trace.shape()
    ));
    for row in trace.rows() {
        let line: Vec<String> = row.iter().map(UnitRational::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

/// Parses the trace format and validates the table against the shape named
/// in the header.
pub fn parse_trace(text: &str) -> Result<ApproximationTrace, TraceFormatError> {
    let mut lines = text.lines().enumerate();
    let (header_line, header) = lines.next().ok_or(TraceFormatError::BadHeader { line: 1 })?;
    let (domain_size, horizon, shape) =
        parse_trace_header(header).ok_or(TraceFormatError::BadHeader {
            line: header_line + 1,
        })?;
    let (rows, consumed) = parse_trace_rows(&mut lines, domain_size, horizon)?;
    if consumed < domain_size {
        return Err(TraceFormatError::MissingRows {
            expected: domain_size,
            found: consumed,
        });
    }
    for (line, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(TraceFormatError::TrailingContent { line: line + 1 });
        }
    }
    Ok(ApproximationTrace::validate(rows, shape)?)
}

pub(crate) fn parse_trace_header(header: &str) -> Option<(usize, usize, TraceShape)> {
    let mut parts = header.split_whitespace();
    if parts.next()? != "trace" {
        return None;
    }
    let domain_size = parts.next()?.strip_prefix("X=")?.parse().ok()?;
    let horizon = parts.next()?.strip_prefix("S=")?.parse().ok()?;
    let shape = TraceShape::parse(parts.next()?.strip_prefix("shape=")?)?;
    if parts.next().is_some() {
        return None;
    }
    Some((domain_size, horizon, shape))
}

pub(crate) fn parse_trace_rows<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    domain_size: usize,
    horizon: usize,
) -> Result<(Vec<Vec<UnitRational>>, usize), TraceFormatError> {
    let mut rows = Vec::with_capacity(domain_size);
    while rows.len() < domain_size {
        let Some((line, text)) = lines.next() else {
            break;
        };
        let line = line + 1;
        let mut row = Vec::with_capacity(horizon);
        for token in text.split_whitespace() {
            let value = token
                .parse()
                .map_err(|source| TraceFormatError::BadValue { line, source })?;
            row.push(value);
        }
        if row.len() != horizon {
            return Err(TraceFormatError::BadRowLength {
                line,
                expected: horizon,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    let consumed = rows.len();
    Ok((rows, consumed))
}
