//! Exact nonnegative rationals extended with `+∞`.
//!
//! Every distance and every tolerance in the crate is an [`ExtRat`]. Values
//! are always stored as reduced fractions with a positive denominator, so
//! structural equality coincides with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtRatError {
    #[error("negative value {0}")]
    Negative(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a rational or \"inf\"")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    // variant order matters: derived Ord puts every finite value below Inf
    Fin(BigRational),
    Inf,
}

/// A nonnegative rational number or `+∞`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtRat(Repr);

impl ExtRat {
    pub const INF: ExtRat = ExtRat(Repr::Inf);

    pub fn zero() -> Self {
        ExtRat(Repr::Fin(BigRational::zero()))
    }

    pub fn one() -> Self {
        ExtRat(Repr::Fin(BigRational::one()))
    }

    pub fn inf() -> Self {
        Self::INF
    }

    pub fn int(n: u64) -> Self {
        ExtRat(Repr::Fin(BigRational::from_integer(BigInt::from(n))))
    }

    /// `num / den`, reduced.
    pub fn ratio(num: u64, den: u64) -> Result<Self, ExtRatError> {
        if den == 0 {
            return Err(ExtRatError::ZeroDenominator);
        }
        Ok(ExtRat(Repr::Fin(BigRational::new(num.into(), den.into()))))
    }

    /// Shorthand for literals in code and tests; panics on a zero denominator.
    pub fn frac(num: u64, den: u64) -> Self {
        Self::ratio(num, den).expect("nonzero denominator")
    }

    pub fn from_big(value: BigRational) -> Result<Self, ExtRatError> {
        if value.is_negative() {
            return Err(ExtRatError::Negative(value.to_string()));
        }
        Ok(ExtRat(Repr::Fin(value)))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self.0, Repr::Inf)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Fin(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Fin(q) => Some(q),
            Repr::Inf => None,
        }
    }

    /// Multiply by a natural number; `0 · ∞ = 0`.
    pub fn scale(&self, k: u64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        match &self.0 {
            Repr::Fin(q) => ExtRat(Repr::Fin(q * BigRational::from_integer(BigInt::from(k)))),
            Repr::Inf => Self::INF,
        }
    }

    pub fn double(&self) -> Self {
        self.scale(2)
    }

    /// Truncated subtraction `max(self - other, 0)`; `∞ - x = ∞` for finite x and
    /// `x - ∞ = 0`.
    pub fn saturating_sub(&self, other: &ExtRat) -> Self {
        match (&self.0, &other.0) {
            (Repr::Inf, Repr::Fin(_)) => Self::INF,
            (_, Repr::Inf) => Self::zero(),
            (Repr::Fin(a), Repr::Fin(b)) => {
                if a > b {
                    ExtRat(Repr::Fin(a - b))
                } else {
                    Self::zero()
                }
            }
        }
    }

    /// Parses `"p/q"`, `"p"` or `"inf"`, reporting whether the text was already
    /// in canonical (reduced) form.
    pub fn parse_flagged(text: &str) -> Result<(Self, bool), ExtRatError> {
        let value: ExtRat = text.parse()?;
        let canonical = value.to_string() == text;
        Ok((value, canonical))
    }
}

impl Default for ExtRat {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &ExtRat {
    type Output = ExtRat;

    fn add(self, rhs: &ExtRat) -> ExtRat {
        match (&self.0, &rhs.0) {
            (Repr::Fin(a), Repr::Fin(b)) => ExtRat(Repr::Fin(a + b)),
            _ => ExtRat::INF,
        }
    }
}

impl Add for ExtRat {
    type Output = ExtRat;

    fn add(self, rhs: ExtRat) -> ExtRat {
        match (self.0, rhs.0) {
            (Repr::Fin(a), Repr::Fin(b)) => ExtRat(Repr::Fin(a + b)),
            _ => ExtRat::INF,
        }
    }
}

impl<'a> Sum<&'a ExtRat> for ExtRat {
    fn sum<I: Iterator<Item = &'a ExtRat>>(iter: I) -> Self {
        iter.fold(ExtRat::zero(), |acc, x| &acc + x)
    }
}

impl PartialEq<u64> for ExtRat {
    fn eq(&self, other: &u64) -> bool {
        *self == ExtRat::int(*other)
    }
}

impl PartialOrd<u64> for ExtRat {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.cmp(&ExtRat::int(*other)))
    }
}

impl From<u64> for ExtRat {
    fn from(n: u64) -> Self {
        ExtRat::int(n)
    }
}

impl fmt::Display for ExtRat {
    /// Canonical text form: `"inf"`, `"p"` for integers, `"p/q"` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Inf => f.write_str("inf"),
            Repr::Fin(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Repr::Fin(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl fmt::Debug for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRat {
    type Err = ExtRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(ExtRat::INF);
        }
        let parse_int = |part: &str| -> Result<BigInt, ExtRatError> {
            let part = part.trim();
            if part.is_empty() || !part.bytes().enumerate().all(|(i, b)| b.is_ascii_digit() || (i == 0 && b == b'-')) {
                return Err(ExtRatError::Parse(s.to_string()));
            }
            part.parse::<BigInt>().map_err(|_| ExtRatError::Parse(s.to_string()))
        };
        let (num, den) = match t.split_once('/') {
            Some((p, q)) => (parse_int(p)?, parse_int(q)?),
            None => (parse_int(t)?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(ExtRatError::ZeroDenominator);
        }
        ExtRat::from_big(BigRational::new(num, den))
    }
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
