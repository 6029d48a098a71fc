//! Exact rational scalars.
//!
//! Every distance in this crate is a [`Rat`]: an arbitrary-sign rational
//! held in lowest terms with a positive denominator. No floating point
//! value is ever constructed, compared, or serialized; equality of
//! distances is always decidable and exact.
//!
//! Serialization convention: integers appear bare (`3`), everything else
//! as a string in lowest terms (`"3/2"`). Parsing accepts both forms.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An exact rational number. `Ratio` keeps the value reduced with a
/// positive denominator, so two equal rationals are structurally equal.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(Ratio<i64>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a rational (expected `n` or `p/q`)")]
    Malformed(String),
}

impl Rat {
    pub fn new(num: i64, den: i64) -> Result<Self, RatError> {
        if den == 0 {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(Ratio::new(num, den)))
    }

    pub const fn zero() -> Self {
        Rat(Ratio::new_raw(0, 1))
    }

    pub const fn one() -> Self {
        Rat(Ratio::new_raw(1, 1))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    /// |self - other|, the distance between two scalars.
    pub fn abs_diff(&self, other: Rat) -> Self {
        Rat((self.0 - other.0).abs())
    }

    /// True when `self` is a nonnegative integer multiple of `step`.
    pub fn is_multiple_of(&self, step: Rat) -> bool {
        !step.is_zero() && (self.0 / step.0).is_integer() && !(self.0 / step.0).is_negative()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat(Ratio::from_integer(n))
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Mul<i64> for Rat {
    type Output = Rat;
    fn mul(self, rhs: i64) -> Rat {
        Rat(self.0 * Ratio::from_integer(rhs))
    }
}

impl Div for Rat {
    type Output = Rat;
    /// Panics on a zero divisor, like the primitive integer types.
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = RatError;

    fn from_str(s: &str) -> Result<Self, RatError> {
        let s = s.trim();
        let malformed = || RatError::Malformed(s.to_string());
        match s.split_once('/') {
            None => {
                let n: i64 = s.parse().map_err(|_| malformed())?;
                Ok(Rat::from(n))
            }
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| malformed())?;
                let q: i64 = q.trim().parse().map_err(|_| malformed())?;
                Rat::new(p, q)
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            serializer.serialize_i64(self.numer())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RatVisitor;

        impl Visitor<'_> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a string \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat::from(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                i64::try_from(v)
                    .map(Rat::from)
                    .map_err(|_| E::custom("integer out of range"))
            }

            // Floats are rejected outright; exactness is the whole point.
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                Err(E::custom(format!(
                    "floating point value {v} rejected; use an integer or \"p/q\""
                )))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Rat, E> {
                s.parse().map_err(|e: RatError| E::custom(e.to_string()))
            }
        }

        deserializer.deserialize_any(RatVisitor)
    }
}
