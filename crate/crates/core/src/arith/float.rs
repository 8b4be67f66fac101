//! Fixed-precision binary floating point for the numeric checks.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Serialize, Serializer};

use super::rat::Rat;
use crate::error::{Error, Result};

/// A floating point value carrying its working precision in bits. Binary
/// operations run at the larger of the two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Float);

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        BigFloat(Float::with_val(prec, 1))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        BigFloat(Float::with_val(prec, x))
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        BigFloat(Float::with_val(prec, n))
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        BigFloat(Float::with_val(prec, r.as_rational()))
    }

    /// Parses a decimal literal such as `"20"`, `"-1.7"` or `"1e-20"`.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(BigFloat(Float::with_val(prec, parsed)))
    }

    pub fn pi(prec: u32) -> Self {
        BigFloat(Float::with_val(prec, Constant::Pi))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Same value re-rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigFloat(Float::with_val(prec, &self.0))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn abs(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.abs_ref()))
    }

    pub fn sqrt(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.sqrt_ref()))
    }

    pub fn exp(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.exp_ref()))
    }

    pub fn ln(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn sin(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.sin_ref()))
    }

    pub fn cos(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.cos_ref()))
    }

    /// MPFR's correctly rounded Gamma function.
    pub fn gamma(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.gamma_ref()))
    }

    pub fn floor(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.floor_ref()))
    }

    pub fn round(&self) -> Self {
        BigFloat(Float::with_val(self.prec(), self.0.round_ref()))
    }

    pub fn powi(&self, n: i32) -> Self {
        BigFloat(Float::with_val(self.prec(), (&self.0).pow(n)))
    }

    pub fn pow(&self, e: &BigFloat) -> Self {
        let prec = self.prec().max(e.prec());
        BigFloat(Float::with_val(prec, (&self.0).pow(&e.0)))
    }

    /// `log2 |self|`, or `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }

    /// The integer nearest to `self` if it lies within `tol` of it.
    pub fn near_integer(&self, tol: f64) -> Option<i64> {
        let r = self.round();
        let diff = (self - &r).abs();
        if diff.to_f64() <= tol {
            r.0.to_integer().and_then(|i| i.to_i64())
        } else {
            None
        }
    }

    /// `|self - other| <= tol`.
    pub fn approx_eq(&self, other: &BigFloat, tol: f64) -> bool {
        let d = (self - other).abs();
        d.0 <= tol
    }

    pub fn max(self, other: BigFloat) -> BigFloat {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &BigFloat) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
        write!(f, "{}", self.to_string_digits(digits.max(1)))
    }
}

/// Serialized as a decimal string at full precision.
impl Serialize for BigFloat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} bits]", self, self.prec())
    }
}

macro_rules! float_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                let prec = self.prec().max(rhs.prec());
                BigFloat(Float::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                &self $op &rhs
            }
        }
    };
}

float_binop!(Add, add, +);
float_binop!(Sub, sub, -);
float_binop!(Mul, mul, *);
float_binop!(Div, div, /);

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(Float::with_val(self.prec(), -&self.0))
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimal() {
        let x = BigFloat::parse("-1.75", 64).unwrap();
        assert_eq!(x.to_f64(), -1.75);
        assert_eq!(BigFloat::parse("1e-3", 64).unwrap().to_f64(), 1e-3);
        assert!(BigFloat::parse("abc", 64).is_err());
    }

    #[test]
    fn precision_propagates() {
        let a = BigFloat::from_f64(1.5, 64);
        let b = BigFloat::from_f64(2.0, 256);
        assert_eq!((&a * &b).prec(), 256);
        assert_eq!(a.with_prec(100).prec(), 100);
    }

    #[test]
    fn near_integer_detection() {
        assert_eq!(BigFloat::from_f64(3.0000001, 64).near_integer(1e-3), Some(3));
        assert_eq!(BigFloat::from_f64(2.5, 64).near_integer(1e-3), None);
        assert_eq!(BigFloat::from_f64(-4.0, 64).near_integer(0.0), Some(-4));
    }

    #[test]
    fn exact_rational_conversion() {
        let third = BigFloat::from_rat(&Rat::new(1, 3), 200);
        let three = BigFloat::from_int(3, 200);
        assert!((&third * &three).approx_eq(&BigFloat::one(200), 1e-59));
    }
}
