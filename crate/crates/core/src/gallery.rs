//! Generators for worked example families and seeded random traces.
//!
//! Everything here is deterministic: the only state a generator consumes is
//! its explicit arguments, and randomized generators take a seed.

use num_bigint::BigInt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numeric::UnitRational;
use crate::trace::{rational_grid, ApproximationTrace, TraceShape};

/// Grid denominator used by [`random_bounded_trace`] unless overridden.
pub const DEFAULT_GRID_DENOMINATOR: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GalleryError {
    #[error("horizon {horizon} is too short; need at least {minimum}")]
    HorizonTooShort { horizon: usize, minimum: usize },
    #[error("infeasible oscillator schedule: {reason}")]
    InfeasibleSchedule { reason: String },
    #[error("halting table line {line}: expected `x=<int> halts_at=<int|NEVER>`")]
    BadTableLine { line: usize },
    #[error("halting table: machine {x} listed more than once")]
    DuplicateMachine { x: usize },
    #[error("halting table: machine {x} missing (indices must cover 0..{domain_size})")]
    MissingMachine { x: usize, domain_size: usize },
    #[error("halting table is empty")]
    EmptyTable,
}

/// A finite stand-in for a halting oracle: for each machine index, the
/// stage at which it halts, or `None` for machines that never do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyHaltingTable {
    halts_at: Vec<Option<usize>>,
}

impl ToyHaltingTable {
    /// Builds a table from `(machine, halts_at)` entries; the machine
    /// indices must cover `0..len` exactly once each.
    pub fn from_entries(entries: Vec<(usize, Option<usize>)>) -> Result<Self, GalleryError> {
        if entries.is_empty() {
            return Err(GalleryError::EmptyTable);
        }
        let domain_size = entries.len();
        let mut halts_at = vec![None; domain_size];
        let mut seen = vec![false; domain_size];
        for (x, stage) in entries {
            if x >= domain_size {
                return Err(GalleryError::MissingMachine {
                    x: seen.iter().position(|&s| !s).unwrap_or(domain_size),
                    domain_size,
                });
            }
            if seen[x] {
                return Err(GalleryError::DuplicateMachine { x });
            }
            seen[x] = true;
            halts_at[x] = stage;
        }
        Ok(ToyHaltingTable { halts_at })
    }

    pub fn domain_size(&self) -> usize {
        self.halts_at.len()
    }

    pub fn halts_at(&self, x: usize) -> Option<usize> {
        self.halts_at[x]
    }
}

/// Renders the halting-table format: one `x=<int> halts_at=<int|NEVER>`
/// line per machine.
pub fn render_halting_table(table: &ToyHaltingTable) -> String {
    let mut out = String::new();
    for x in 0..table.domain_size() {
        match table.halts_at(x) {
            Some(stage) => out.push_str(&format!("x={x} halts_at={stage}\n")),
            None => out.push_str(&format!("x={x} halts_at=NEVER\n")),
        }
    }
    out
}

/// Parses the halting-table format.
pub fn parse_halting_table(text: &str) -> Result<ToyHaltingTable, GalleryError> {
    let mut entries = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry = (|| {
            let mut parts = line.split_whitespace();
            let x = parts.next()?.strip_prefix("x=")?.parse().ok()?;
            let stage_text = parts.next()?.strip_prefix("halts_at=")?;
            if parts.next().is_some() {
                return None;
            }
            let stage = if stage_text == "NEVER" {
                None
            } else {
                Some(stage_text.parse().ok()?)
            };
            Some((x, stage))
        })()
        .ok_or(GalleryError::BadTableLine { line: index + 1 })?;
        entries.push(entry);
    }
    ToyHaltingTable::from_entries(entries)
}

/// The two-update approximation of a halting-degree membership function:
/// each machine's row starts at 0, raises to the default guess 1/2 at
/// stage 1, and raises again to 1 once its halt is visible.
///
/// Machines that halt within the horizon therefore take exactly two
/// updates; machines that do not take one.
pub fn harkleroad(table: &ToyHaltingTable, horizon: usize) -> Result<ApproximationTrace, GalleryError> {
    if horizon < 2 {
        return Err(GalleryError::HorizonTooShort {
            horizon,
            minimum: 2,
        });
    }
    let half = UnitRational::one_half();
    let rows = (0..table.domain_size())
        .map(|x| {
            (0..horizon)
                .map(|s| {
                    if s == 0 {
                        UnitRational::zero()
                    } else if s >= 2 && table.halts_at(x).is_some_and(|stage| stage <= s) {
                        UnitRational::one()
                    } else {
                        half.clone()
                    }
                })
                .collect()
        })
        .collect();
    Ok(ApproximationTrace::validate(rows, TraceShape::Sigma1)
        .expect("two-step raise is rising from 0"))
}

/// Swing parameters for [`oscillator`]: the single element's values
/// alternate between `center + amplitude` and `center - amplitude`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillatorSchedule {
    center: UnitRational,
    amplitude: UnitRational,
    oscillation_count: usize,
}

impl OscillatorSchedule {
    /// Validates that the swing band stays inside `[0, 1]` and actually
    /// swings: the amplitude must be positive and the count nonzero, or the
    /// promised mind-change count could not materialize.
    pub fn new(
        center: UnitRational,
        amplitude: UnitRational,
        oscillation_count: usize,
    ) -> Result<Self, GalleryError> {
        if oscillation_count == 0 {
            return Err(GalleryError::InfeasibleSchedule {
                reason: "oscillation count must be at least 1".to_owned(),
            });
        }
        if amplitude.is_zero() {
            return Err(GalleryError::InfeasibleSchedule {
                reason: "amplitude must be positive".to_owned(),
            });
        }
        if center.checked_add(&amplitude).is_none() {
            return Err(GalleryError::InfeasibleSchedule {
                reason: format!("center {center} + amplitude {amplitude} exceeds 1"),
            });
        }
        if center.checked_sub(&amplitude).is_none() {
            return Err(GalleryError::InfeasibleSchedule {
                reason: format!("center {center} - amplitude {amplitude} falls below 0"),
            });
        }
        Ok(OscillatorSchedule {
            center,
            amplitude,
            oscillation_count,
        })
    }

    pub fn center(&self) -> &UnitRational {
        &self.center
    }

    pub fn amplitude(&self) -> &UnitRational {
        &self.amplitude
    }

    pub fn oscillation_count(&self) -> usize {
        self.oscillation_count
    }
}

/// A single-element trace that starts at 0 and then swings
/// high, low, high, low, ... for `oscillation_count` full swings before
/// going constant. Its rising-side change count is exactly
/// `2 * oscillation_count - 1`, so its observed level is
/// `2 * oscillation_count`: at fixed amplitude the family climbs the
/// hierarchy without bound.
pub fn oscillator(
    schedule: &OscillatorSchedule,
    horizon: usize,
) -> Result<ApproximationTrace, GalleryError> {
    let minimum = 2 * schedule.oscillation_count + 1;
    if horizon < minimum {
        return Err(GalleryError::HorizonTooShort { horizon, minimum });
    }
    let high = schedule
        .center
        .checked_add(&schedule.amplitude)
        .expect("schedule validated");
    let low = schedule
        .center
        .checked_sub(&schedule.amplitude)
        .expect("schedule validated");
    let mut row = Vec::with_capacity(horizon);
    row.push(UnitRational::zero());
    for _ in 0..schedule.oscillation_count {
        row.push(high.clone());
        row.push(low.clone());
    }
    while row.len() < horizon {
        row.push(low.clone());
    }
    Ok(ApproximationTrace::validate(vec![row], TraceShape::Delta2)
        .expect("oscillator values lie in the unit interval"))
}

/// A seeded trace with anchor 0 whose per-element rising-side mind-change
/// count stays below `level`, with values drawn from the grid of
/// denominators up to `max_denominator`.
///
/// Each element picks a change budget, realizes it as alternating rising
/// and falling runs with a strict move at every run boundary, and usually
/// freezes before the horizon so that limit comparisons have bite.
pub fn random_bounded_trace(
    seed: u64,
    domain_size: usize,
    horizon: usize,
    level: usize,
    max_denominator: u64,
) -> Result<ApproximationTrace, GalleryError> {
    if domain_size == 0 || horizon == 0 {
        return Err(GalleryError::HorizonTooShort {
            horizon,
            minimum: 1,
        });
    }
    if level == 0 {
        return Err(GalleryError::InfeasibleSchedule {
            reason: "level must be at least 1".to_owned(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = rational_grid(max_denominator);
    let top = grid.len() - 1;
    let rows = (0..domain_size)
        .map(|_| {
            let budget = level - 1;
            let target = rng.gen_range(0..=budget.min(horizon.saturating_sub(2)));
            // Stages at which the direction turns, each forcing a strict
            // move against the previous direction.
            let mut turn_stages: Vec<usize> = Vec::new();
            if target > 0 {
                let mut candidates: Vec<usize> = (1..horizon - 1).collect();
                for _ in 0..target {
                    if candidates.is_empty() {
                        break;
                    }
                    let pick = rng.gen_range(0..candidates.len());
                    turn_stages.push(candidates.swap_remove(pick));
                }
                turn_stages.sort_unstable();
            }
            let freeze_stage = if horizon >= 2 && rng.gen_range(0..8) > 0 {
                // Usually settle early enough to leave a constant tail.
                let earliest = turn_stages.last().map_or(1, |&t| t + 1);
                rng.gen_range(earliest..horizon)
            } else {
                horizon
            };
            let mut row: Vec<usize> = Vec::with_capacity(horizon);
            row.push(0);
            let mut rising = true;
            let mut index = 0usize;
            for s in 1..horizon {
                if s >= freeze_stage {
                    row.push(index);
                    continue;
                }
                if turn_stages.binary_search(&s).is_ok() {
                    let flipped = if rising {
                        // Turn downward; needs room below.
                        (index > 0).then(|| rng.gen_range(0..index))
                    } else {
                        (index < top).then(|| rng.gen_range(index + 1..=top))
                    };
                    if let Some(next) = flipped {
                        rising = !rising;
                        index = next;
                    }
                } else if rising {
                    index = rng.gen_range(index..=top.min(index + 6));
                } else {
                    index = rng.gen_range(index.saturating_sub(6)..=index);
                }
                row.push(index);
            }
            row.into_iter().map(|i| grid[i].clone()).collect()
        })
        .collect();
    Ok(ApproximationTrace::validate(rows, TraceShape::Delta2)
        .expect("generated values come from the unit grid"))
}

fn dyadic_partial(bits: &[bool], length: usize) -> (BigInt, BigInt) {
    // Value of the first `length` bits as numerator / 2^length.
    let mut numerator = BigInt::from(0);
    for &bit in &bits[..length] {
        numerator = &numerator * 2 + BigInt::from(u8::from(bit));
    }
    (numerator, BigInt::from(1) << length)
}

/// A single-element rising trace accumulating the dyadic value of `bits`
/// one digit per stage: the value at stage `s` is the partial sum of the
/// first `min(s, len)` digits.
pub fn left_ce_real(bits: &[bool], horizon: usize) -> Result<ApproximationTrace, GalleryError> {
    if horizon == 0 {
        return Err(GalleryError::HorizonTooShort {
            horizon,
            minimum: 1,
        });
    }
    let row = (0..horizon)
        .map(|s| {
            let length = s.min(bits.len());
            let (numerator, denominator) = dyadic_partial(bits, length);
            UnitRational::from_big(numerator, denominator).expect("partial dyadic sum is in [0,1]")
        })
        .collect();
    Ok(ApproximationTrace::validate(vec![row], TraceShape::Sigma1)
        .expect("partial sums rise from 0"))
}

/// The falling counterpart of [`left_ce_real`]: the value at stage `s` is
/// the partial sum of the first `min(s, len)` digits plus one unit in the
/// last processed place — the tightest upper bound knowing only those
/// digits. Complementing a trace built from the bitwise-flipped digits
/// reproduces [`left_ce_real`] stage by stage.
pub fn right_ce_real(bits: &[bool], horizon: usize) -> Result<ApproximationTrace, GalleryError> {
    if horizon == 0 {
        return Err(GalleryError::HorizonTooShort {
            horizon,
            minimum: 1,
        });
    }
    let row = (0..horizon)
        .map(|s| {
            let length = s.min(bits.len());
            let (numerator, denominator) = dyadic_partial(bits, length);
            UnitRational::from_big(numerator + 1u8, denominator)
                .expect("upper dyadic bound is in [0,1]")
        })
        .collect();
    Ok(ApproximationTrace::validate(vec![row], TraceShape::Pi1)
        .expect("upper bounds fall from 1"))
}

/// Parses a digit string like `"101"` into bits.
pub fn parse_bits(text: &str) -> Option<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}
