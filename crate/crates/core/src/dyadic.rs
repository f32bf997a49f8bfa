//! Exact nonnegative rationals with power-of-two denominators.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// The value `numerator / 2^exponent`, kept reduced (odd numerator or zero
/// with exponent 0), so equal values have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u64,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigUint>, exponent: u64) -> Self {
        let mut d = Self {
            numerator: numerator.into(),
            exponent,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Self::new(0u32, 0)
    }

    pub fn one() -> Self {
        Self::new(1u32, 0)
    }

    /// `2^-e`.
    pub fn pow2_neg(e: u64) -> Self {
        Self::new(1u32, e)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0).min(self.exponent);
        if tz > 0 {
            self.numerator >>= tz;
            self.exponent -= tz;
        }
    }

    /// Numerator rescaled to denominator `2^e` (`e >= self.exponent`).
    fn scaled(&self, e: u64) -> BigUint {
        &self.numerator << (e - self.exponent)
    }

    /// `self - other`, or `None` if the result would be negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let e = self.exponent.max(other.exponent);
        let (a, b) = (self.scaled(e), other.scaled(e));
        (a >= b).then(|| Self::new(a - b, e))
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        self.checked_sub(other)
            .unwrap_or_else(|| other.checked_sub(self).expect("one order is nonnegative"))
    }

    pub fn pow(&self, t: u32) -> Self {
        Self::new(self.numerator.pow(t), self.exponent * u64::from(t))
    }

    /// Multiplies by `2^-e`.
    pub fn shr(&self, e: u64) -> Self {
        Self::new(self.numerator.clone(), self.exponent + e)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.numerator.bits();
        let (num, exp) = if bits > 64 {
            let shift = bits - 64;
            (
                (&self.numerator >> shift).to_u64().unwrap_or(u64::MAX),
                self.exponent as i64 - shift as i64,
            )
        } else {
            (self.numerator.to_u64().unwrap_or(0), self.exponent as i64)
        };
        let mut v = num as f64;
        let mut e = exp;
        // step the scaling so that intermediate powers stay representable
        while e > 1000 {
            v *= 2f64.powi(-1000);
            e -= 1000;
        }
        while e < -1000 {
            v *= 2f64.powi(1000);
            e += 1000;
        }
        v * 2f64.powi(-(e as i32))
    }

    /// Compares `self` with `num / den` exactly.
    pub fn cmp_ratio(&self, num: &BigUint, den: &BigUint) -> Ordering {
        // self.numerator / 2^e  vs  num / den
        (&self.numerator * den).cmp(&(num << self.exponent))
    }
}

impl From<u64> for DyadicRational {
    fn from(v: u64) -> Self {
        Self::new(v, 0)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        DyadicRational::new(self.scaled(e) + rhs.scaled(e), e)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: DyadicRational) -> DyadicRational {
        &self + &rhs
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.numerator * &rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl Mul for DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: DyadicRational) -> DyadicRational {
        &self * &rhs
    }
}

impl std::iter::Sum for DyadicRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

/// Renders as `<numerator>/2^<exponent>`.
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (~{:.6e})", self.to_f64())
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("expected <numerator>/2^<exponent>, got {s:?}"));
        let (num, exp) = s.trim().split_once("/2^").ok_or_else(bad)?;
        let numerator = BigUint::from_str(num).map_err(|_| bad())?;
        let exponent = exp.parse::<u64>().map_err(|_| bad())?;
        Ok(Self::new(numerator, exponent))
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

/// `(2^m - 1) / 2^m`, the probability that a uniform vector of `F2^m` is nonzero.
pub fn nonzero_prob(m: u64) -> DyadicRational {
    DyadicRational::new((BigUint::one() << m) - 1u32, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(n: u64, e: u64) -> DyadicRational {
        DyadicRational::new(n, e)
    }

    #[test]
    fn reduced_form() {
        assert_eq!(d(14, 5), d(7, 4));
        assert_eq!(d(14, 5).to_string(), "7/2^4");
        assert_eq!(d(0, 9).to_string(), "0/2^0");
        assert_eq!(d(8, 1), DyadicRational::from(4));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&d(1, 1) + &d(1, 2), d(3, 2));
        assert_eq!(d(3, 2).checked_sub(&d(1, 1)), Some(d(1, 2)));
        assert_eq!(d(1, 2).checked_sub(&d(1, 1)), None);
        assert_eq!(d(3, 2).pow(2), d(9, 4));
        assert!(d(27, 6) < d(7, 4));
        assert_eq!(nonzero_prob(2), d(3, 2));
    }

    #[test]
    fn to_f64_handles_large_parts() {
        assert_eq!(d(29, 7).to_f64(), 29.0 / 128.0);
        let huge = DyadicRational::new(BigUint::one() << 2000u32, 2001);
        assert_eq!(huge.to_f64(), 0.5);
    }

    #[test]
    fn parse_display() {
        let x: DyadicRational = "2047/2^20".parse().unwrap();
        assert_eq!(x, d(2047, 20));
        assert!("7/16".parse::<DyadicRational>().is_err());
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"2047/2^20\"");
        assert_eq!(serde_json::from_str::<DyadicRational>(&json).unwrap(), x);
    }

    proptest! {
        #[test]
        fn order_matches_floats(a in 0u64..1_000_000, ea in 0u64..40, b in 0u64..1_000_000, eb in 0u64..40) {
            let (x, y) = (d(a, ea), d(b, eb));
            let (fx, fy) = (a as f64 / 2f64.powi(ea as i32), b as f64 / 2f64.powi(eb as i32));
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
            prop_assert_eq!((&x + &y).checked_sub(&y), Some(x.clone()));
            prop_assert_eq!(x.to_string().parse::<DyadicRational>().unwrap(), x);
        }
    }
}
