use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use num_bigint::BigUint;
use num_traits::Zero;

/// A nonnegative real stored as its natural logarithm.
///
/// Zero is represented by a log-magnitude of negative infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    ln: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogReal = LogReal { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "log-magnitude is NaN");
        Self { ln }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogReal holds nonnegative values, got {x}");
        Self { ln: x.ln() }
    }

    /// Natural log of an exact big integer, accurate to double precision.
    pub fn from_biguint(x: &BigUint) -> Self {
        if x.is_zero() {
            return Self::ZERO;
        }
        let bits = x.bits();
        if bits <= 64 {
            let v: u64 = x.try_into().unwrap();
            return Self::from_f64(v as f64);
        }
        let shift = bits - 64;
        let top: u64 = (x >> shift).try_into().unwrap();
        Self::from_ln((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// Linear value; overflows to infinity for large magnitudes.
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn powf(self, k: f64) -> Self {
        if self.is_zero() {
            return if k == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self::from_ln(self.ln * k)
    }

    /// `self - other`; `None` when the result would be negative.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        match self.ln.partial_cmp(&other.ln)? {
            Ordering::Less => None,
            Ordering::Equal => Some(Self::ZERO),
            Ordering::Greater if other.is_zero() => Some(self),
            Ordering::Greater => {
                Some(Self::from_ln(self.ln + (-(other.ln - self.ln).exp()).ln_1p()))
            }
        }
    }

    /// `self / other` as a plain double.
    pub fn ratio(self, other: Self) -> f64 {
        (self.ln - other.ln).exp()
    }
}

/// Stable log-sum-exp addition.
impl Add for LogReal {
    type Output = LogReal;

    fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        if lo.is_zero() {
            return hi;
        }
        Self::from_ln(hi.ln + (lo.ln - hi.ln).exp().ln_1p())
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::from_ln(self.ln + rhs.ln)
    }
}

impl Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by a zero LogReal");
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::from_ln(self.ln - rhs.ln)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.ln)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn big_integers() {
        let x = BigUint::from(190_569_292u64);
        assert!((LogReal::from_biguint(&x).ln() - 190_569_292f64.ln()).abs() < 1e-12);
        let big = BigUint::from(3u32).pow(500);
        let expected = 500.0 * 3f64.ln();
        assert!((LogReal::from_biguint(&big).ln() - expected).abs() < 1e-12 * expected);
        assert!(LogReal::from_biguint(&BigUint::zero()).is_zero());
    }

    #[test]
    fn arithmetic() {
        let a = LogReal::from_f64(3.0);
        let b = LogReal::from_f64(5.0);
        assert!(((a * b).to_f64() - 15.0).abs() < 1e-12);
        assert!(((b / a).to_f64() - 5.0 / 3.0).abs() < 1e-12);
        assert!(((a + b).to_f64() - 8.0).abs() < 1e-12);
        assert!((b.checked_sub(a).unwrap().to_f64() - 2.0).abs() < 1e-12);
        assert!(a.checked_sub(b).is_none());
        assert!(a < b);
        assert_eq!(a + LogReal::ZERO, a);
        assert!((a * LogReal::ZERO).is_zero());
        let huge = LogReal::from_ln(1e6);
        assert_eq!((huge + LogReal::ONE).ln(), 1e6);
    }

    proptest! {
        #[test]
        fn power_round_trip(x in 1e-6f64..1e6, k in -8.0f64..8.0) {
            let v = LogReal::from_f64(x).powf(k).to_f64() / x.powf(k);
            prop_assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
