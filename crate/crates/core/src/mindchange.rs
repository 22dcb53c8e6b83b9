//! Mind-change and update accounting for approximation traces.
//!
//! The sign recursion tracked here is deliberately strict about ties:
//! equal consecutive values carry the current sign forward, and only a
//! strict move against the sign flips it. That tie rule is the single most
//! error-prone branch in the whole crate, so it is centralized in
//! `Sign::advance` and exercised heavily by the tests.

use std::fmt;
use std::ops::Neg;

use thiserror::Error;

use crate::trace::ApproximationTrace;

/// A monotonicity guess: `+1` (rising) or `-1` (falling).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// The sign at the next stage, given the values at the current and next
    /// stage. Ties never flip: a strict drop turns `+` into `-`, a strict
    /// rise turns `-` into `+`, everything else keeps the sign.
    fn advance<T: Ord>(self, current: &T, next: &T) -> Sign {
        match self {
            Sign::Plus if current > next => Sign::Minus,
            Sign::Minus if current < next => Sign::Plus,
            keep => keep,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Which starting sign the profile uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MindChangeVariant {
    /// Starts at `+1`; counts departures from "approximation from below".
    Sigma,
    /// Starts at `-1`; counts departures from "approximation from above".
    Pi,
}

impl MindChangeVariant {
    fn initial_sign(self) -> Sign {
        match self {
            MindChangeVariant::Sigma => Sign::Plus,
            MindChangeVariant::Pi => Sign::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MindChangeVariant::Sigma => "sigma",
            MindChangeVariant::Pi => "pi",
        }
    }
}

/// Errors for profile queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("element {x} out of range (domain size {domain_size})")]
    ElementOutOfRange { x: usize, domain_size: usize },
    #[error("stage {s} out of range: prefix counts need the sign at stage {}, horizon is {horizon}", s + 1)]
    StageOutOfRange { s: usize, horizon: usize },
}

/// The per-cell sign table of a trace together with the stages at which the
/// sign changed.
///
/// A change recorded at stage `s` means the sign at `s + 1` differs from the
/// sign at `s`; change stages therefore never exceed `horizon - 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MindChangeProfile {
    variant: MindChangeVariant,
    domain_size: usize,
    horizon: usize,
    signs: Vec<Sign>, // row-major: x * horizon + s
    change_stages: Vec<Vec<usize>>,
}

impl MindChangeProfile {
    fn compute(trace: &ApproximationTrace, variant: MindChangeVariant) -> Self {
        let domain_size = trace.domain_size();
        let horizon = trace.horizon();
        let mut signs = Vec::with_capacity(domain_size * horizon);
        let mut change_stages = Vec::with_capacity(domain_size);
        for x in 0..domain_size {
            let row = trace.row(x);
            let mut stages = Vec::new();
            let mut sign = variant.initial_sign();
            signs.push(sign);
            for s in 0..horizon - 1 {
                let next = sign.advance(&row[s], &row[s + 1]);
                if next != sign {
                    stages.push(s);
                }
                signs.push(next);
                sign = next;
            }
            change_stages.push(stages);
        }
        MindChangeProfile {
            variant,
            domain_size,
            horizon,
            signs,
            change_stages,
        }
    }

    pub fn variant(&self) -> MindChangeVariant {
        self.variant
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn sign(&self, x: usize, s: usize) -> Sign {
        self.signs[x * self.horizon + s]
    }

    pub fn signs_row(&self, x: usize) -> &[Sign] {
        &self.signs[x * self.horizon..(x + 1) * self.horizon]
    }

    /// Stages `s` with `sign(x, s+1) != sign(x, s)`, ascending.
    pub fn change_stages(&self, x: usize) -> &[usize] {
        &self.change_stages[x]
    }

    pub fn change_count(&self, x: usize) -> usize {
        self.change_stages[x].len()
    }

    pub fn max_change_count(&self) -> usize {
        (0..self.domain_size)
            .map(|x| self.change_count(x))
            .max()
            .unwrap_or(0)
    }

    /// Number of sign changes at stages `t <= s`, exactly as consumed by the
    /// decomposition case split. Because a change at `t` consults the sign
    /// at `t + 1`, the count is only fully evaluable for `s < horizon - 1`.
    pub fn change_count_prefix(&self, x: usize, s: usize) -> Result<usize, ProfileError> {
        if x >= self.domain_size {
            return Err(ProfileError::ElementOutOfRange {
                x,
                domain_size: self.domain_size,
            });
        }
        if s + 1 >= self.horizon {
            return Err(ProfileError::StageOutOfRange {
                s,
                horizon: self.horizon,
            });
        }
        Ok(self.change_stages[x].partition_point(|&t| t <= s))
    }

    /// Number of sign changes at stages strictly below `s`; `0` at `s = 0`.
    /// This is the stage-honest count: it depends only on the signs up to
    /// `s`, never on a later comparison.
    pub(crate) fn changes_before(&self, x: usize, s: usize) -> usize {
        self.change_stages[x].partition_point(|&t| t < s)
    }

    /// Plain-text report: one block per element with the sign string, the
    /// change stages, and the change count.
    pub fn render_report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{}-mind-change profile X={} S={}\n",
            self.variant.name(),
            self.domain_size,
            self.horizon
        ));
        for x in 0..self.domain_size {
            let signs: String = self.signs_row(x).iter().map(|s| s.as_char()).collect();
            let stages: Vec<String> = self.change_stages(x).iter().map(usize::to_string).collect();
            let stages = if stages.is_empty() {
                "-".to_owned()
            } else {
                stages.join(",")
            };
            out.push_str(&format!(
                "x={x} signs={signs} changes={} at={stages}\n",
                self.change_count(x)
            ));
        }
        out
    }
}

/// Mind-change profile starting at `+1` for every element.
pub fn sigma_profile(trace: &ApproximationTrace) -> MindChangeProfile {
    MindChangeProfile::compute(trace, MindChangeVariant::Sigma)
}

/// Mind-change profile starting at `-1` for every element.
pub fn pi_profile(trace: &ApproximationTrace) -> MindChangeProfile {
    MindChangeProfile::compute(trace, MindChangeVariant::Pi)
}

/// Per-element counts of stages where the value actually moved.
///
/// Every sign flip requires a strict value change, so the update count
/// dominates the mind-change count for each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateProfile {
    stages: Vec<Vec<usize>>,
}

impl UpdateProfile {
    /// Stages `s` with `f(x, s+1) != f(x, s)`, ascending.
    pub fn stages(&self, x: usize) -> &[usize] {
        &self.stages[x]
    }

    pub fn count(&self, x: usize) -> usize {
        self.stages[x].len()
    }

    pub fn max_count(&self) -> usize {
        self.stages.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn domain_size(&self) -> usize {
        self.stages.len()
    }
}

/// Counts strict value changes per element.
pub fn update_profile(trace: &ApproximationTrace) -> UpdateProfile {
    let stages = (0..trace.domain_size())
        .map(|x| {
            let row = trace.row(x);
            (0..trace.horizon() - 1)
                .filter(|&s| row[s] != row[s + 1])
                .collect()
        })
        .collect();
    UpdateProfile { stages }
}
