//! Exact scalars and half-integer degrees.
//!
//! Every structure constant, coefficient and matrix entry in this crate is a
//! [`Scalar`], an arbitrary-precision rational. Degrees live in ½ℤ and are
//! stored as twice their value by [`HalfInt`].

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses the wire format: an optionally signed integer, optionally followed
/// by `/` and a positive integer.
pub fn parse_scalar(s: &str) -> Result<Scalar, Error> {
    let bad = || Error::Parse(format!("invalid rational string {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let digits = num.strip_prefix(['+', '-']).unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let d = BigInt::from_str(d).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            d
        }
    };
    Ok(Scalar::new(num, den))
}

/// Canonical wire string: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_scalar_list(s: &str) -> Result<Vec<Scalar>, Error> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse_scalar(p.trim())).collect()
}

/// Serde adapters for scalars as rational strings.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let raw = String::deserialize(d)?;
        parse_scalar(&raw).map_err(serde::de::Error::custom)
    }
}

/// An element of ½ℤ, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    /// ℤ₂-parity of a homogeneous space of this degree.
    pub const fn parity(self) -> u8 {
        self.0.rem_euclid(2) as u8
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_scalar(self) -> Scalar {
        frac(self.0, 2)
    }

    /// All degrees `0, ½, 1, …, self`.
    pub fn steps_from_zero(self) -> impl Iterator<Item = HalfInt> {
        (0..=self.0.max(-1)).map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let q = parse_scalar(s.trim())?;
        let twice = q * int(2);
        if !twice.is_integer() {
            return Err(Error::Parse(format!("{s:?} is not a half-integer")));
        }
        let t: i64 = twice
            .numer()
            .try_into()
            .map_err(|_| Error::Parse(format!("{s:?} is out of range")))?;
        Ok(HalfInt(t))
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Generalized binomial coefficient `C(n, k) = n(n-1)…(n-k+1)/k!`, valid for
/// negative `n`.
pub fn binomial(n: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k as i64 {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub fn sign(odd: bool) -> Scalar {
    if odd {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

pub fn is_nonneg(x: &Scalar) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_wire_rationals() {
        assert_eq!(parse_scalar("3").unwrap(), int(3));
        assert_eq!(parse_scalar("-6/4").unwrap(), frac(-3, 2));
        assert_eq!(parse_scalar("+2/3").unwrap(), frac(2, 3));
        for bad in ["", "1/0", "1/-2", "a", "1.5", "1/", "/2", "--1", "1 /2"] {
            assert!(parse_scalar(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_scalar(&frac(4, -6)), "-2/3");
        assert_eq!(format_scalar(&frac(4, 2)), "2");
        assert_eq!(format_scalar(&int(0)), "0");
    }

    #[test]
    fn half_int_round_trip() {
        let d: HalfInt = "9/2".parse().unwrap();
        assert_eq!(d.twice(), 9);
        assert_eq!(d.to_string(), "9/2");
        assert_eq!(d.parity(), 1);
        assert_eq!("4".parse::<HalfInt>().unwrap(), HalfInt::from_int(4));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
        assert_eq!(HalfInt::from_twice(-3).parity(), 1);
    }

    #[test]
    fn binomial_extends_to_negative_top() {
        assert_eq!(binomial(4, 3), BigInt::from(4));
        assert_eq!(binomial(2, 3), BigInt::from(0));
        assert_eq!(binomial(-2, 3), BigInt::from(-4));
        assert_eq!(binomial(-1, 5), BigInt::from(-1));
        assert_eq!(binomial(7, 0), BigInt::from(1));
    }
}
