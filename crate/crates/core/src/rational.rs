//! Exact rational plumbing: parsing, formatting and the `[0,1]` probability newtype.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shorthand for `n/d` as a big rational.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"a/b"` or `"a"`. Decimal notation is rejected on purpose.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Invalid(format!("'{s}' is not a rational string"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Invalid(format!("'{s}' has a zero denominator")));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        return v;
    }
    // huge numerators and denominators: scale both down first
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Best rational approximation is not needed here: binary64 values are dyadic rationals.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Invalid(format!("{x} is not finite")))
}

pub fn abs(r: &BigRational) -> BigRational {
    r.abs()
}

/// An exact probability in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalProbability(BigRational);

impl RationalProbability {
    pub fn new(r: BigRational) -> Result<Self> {
        if r.is_negative() || r > BigRational::one() {
            return Err(Error::Invalid(format!(
                "{} is not a probability",
                format_rational(&r)
            )));
        }
        Ok(RationalProbability(r))
    }

    pub fn zero() -> Self {
        RationalProbability(BigRational::zero())
    }

    pub fn one() -> Self {
        RationalProbability(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

impl fmt::Display for RationalProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for RationalProbability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalProbability {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let r = parse_rational(&s).map_err(serde::de::Error::custom)?;
        RationalProbability::new(r).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for plain `BigRational` fields as `"a/b"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
