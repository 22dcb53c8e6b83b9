//! Exact rational arithmetic on the unit interval.
//!
//! Every membership degree in this crate is a [`UnitRational`]: an
//! arbitrary-precision rational kept in lowest terms and confined to
//! `[0, 1]`. Comparisons, `min`/`max`, and complement (`1 - q`) are exact;
//! there is no floating point anywhere.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

/// Errors produced when parsing or constructing a [`UnitRational`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    /// The text is not of the form `p` or `p/q` with decimal digits.
    #[error("malformed rational {0:?}: expected \"p\" or \"p/q\" with decimal digits")]
    Malformed(String),
    /// The denominator is zero.
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    /// The value lies outside `[0, 1]`.
    #[error("{0} is outside the unit interval")]
    OutOfUnitInterval(String),
}

/// An exact rational in `[0, 1]`, stored in lowest terms with a positive
/// denominator. Values are immutable and freely shareable between threads.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRational(Ratio<BigInt>);

impl UnitRational {
    /// The constant `0`.
    pub fn zero() -> Self {
        UnitRational(Ratio::zero())
    }

    /// The constant `1`.
    pub fn one() -> Self {
        UnitRational(Ratio::one())
    }

    /// The constant `1/2`.
    pub fn one_half() -> Self {
        UnitRational(Ratio::new(BigInt::from(1), BigInt::from(2)))
    }

    /// Builds `numerator/denominator`, reduced to lowest terms.
    pub fn new(numerator: u64, denominator: u64) -> Result<Self, RationalError> {
        Self::from_big(BigInt::from(numerator), BigInt::from(denominator))
    }

    /// Builds a value from arbitrary-precision parts.
    pub fn from_big(numerator: BigInt, denominator: BigInt) -> Result<Self, RationalError> {
        let repr = || format!("{numerator}/{denominator}");
        if denominator.is_zero() {
            return Err(RationalError::ZeroDenominator(repr()));
        }
        let ratio = Ratio::new(numerator, denominator);
        if ratio < Ratio::zero() || ratio > Ratio::one() {
            return Err(RationalError::OutOfUnitInterval(format!(
                "{}/{}",
                ratio.numer(),
                ratio.denom()
            )));
        }
        Ok(UnitRational(ratio))
    }

    /// `1 - q`, exact and in lowest terms. `min` and `max` come from the
    /// (exact) `Ord` instance.
    pub fn complement(&self) -> Self {
        UnitRational(Ratio::one() - &self.0)
    }

    /// Numerator in lowest terms; non-negative.
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator in lowest terms; positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// True when the value is `0` or `1`.
    pub fn is_crisp(&self) -> bool {
        self.is_zero() || self.is_one()
    }

    /// `self + other`, or `None` when the sum leaves the unit interval.
    pub(crate) fn checked_add(&self, other: &Self) -> Option<Self> {
        let sum = &self.0 + &other.0;
        (sum <= Ratio::one()).then_some(UnitRational(sum))
    }

    /// `self - other`, or `None` when the difference would be negative.
    pub(crate) fn checked_sub(&self, other: &Self) -> Option<Self> {
        (self.0 >= other.0).then(|| UnitRational(&self.0 - &other.0))
    }
}

/// `1 - q`: the pointwise complement of a membership degree.
pub fn complement_value(q: &UnitRational) -> UnitRational {
    q.complement()
}

/// Parses the canonical textual form `p/q` (or a bare integer `p`).
pub fn parse_rational(text: &str) -> Result<UnitRational, RationalError> {
    text.parse()
}

fn parse_digits(text: &str, whole: &str) -> Result<BigInt, RationalError> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RationalError::Malformed(whole.to_owned()));
    }
    text.parse::<BigInt>()
        .map_err(|_| RationalError::Malformed(whole.to_owned()))
}

impl FromStr for UnitRational {
    type Err = RationalError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.split_once('/') {
            Some((num, den)) => {
                let numerator = parse_digits(num, text)?;
                let denominator = parse_digits(den, text)?;
                if denominator.is_zero() {
                    return Err(RationalError::ZeroDenominator(text.to_owned()));
                }
                UnitRational::from_big(numerator, denominator)
            }
            None => {
                let numerator = parse_digits(text, text)?;
                UnitRational::from_big(numerator, BigInt::one())
            }
        }
    }
}

impl fmt::Display for UnitRational {
    /// Canonical form: `p/q` in lowest terms, with the endpoints written
    /// as `0` and `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
