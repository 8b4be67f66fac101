//! Arbitrary-precision rationals in lowest terms.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number. GMP keeps the value canonical (lowest terms, positive
/// denominator), so derived equality is canonical-form equality.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(Rational);

impl Rat {
    pub fn zero() -> Self {
        Rat(Rational::new())
    }

    pub fn one() -> Self {
        Rat(Rational::from(1))
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "Rat::new with zero denominator");
        Rat(Rational::from((num, den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(Rational::from(n))
    }

    pub fn from_integer(n: Integer) -> Self {
        Rat(Rational::from(n))
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_one(&self) -> bool {
        *self.0.numer() == 1 && *self.0.denom() == 1
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Ordering::Less
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Rat> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(Rational::from(&self.0 / &rhs.0)))
    }

    pub fn recip(&self) -> Result<Rat> {
        Rat::one().checked_div(self)
    }

    pub fn pow(&self, e: u32) -> Rat {
        use rug::ops::Pow;
        Rat(Rational::from((&self.0).pow(e)))
    }

    pub fn abs(&self) -> Rat {
        Rat(Rational::from(self.0.abs_ref()))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// `n!` as a rational.
    pub fn factorial(n: u32) -> Rat {
        Rat::from_integer(Integer::from(Integer::factorial(n)))
    }

    /// Binomial coefficient `C(d, i)` for an arbitrary integer `d`.
    pub fn binomial(d: i64, i: u32) -> Rat {
        let mut acc = Rat::one();
        for t in 0..i as i64 {
            acc = acc * Rat::new(d - t, t + 1);
        }
        acc
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<Rational> for Rat {
    fn from(r: Rational) -> Self {
        Rat(r)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: Integer = p.trim().parse().map_err(|_| bad())?;
                let q: Integer = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Rat(Rational::from((p, q))))
            }
            None => {
                let p: Integer = s.parse().map_err(|_| bad())?;
                Ok(Rat(Rational::from(p)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(Rational::from(&self.0 $op &rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0 $op rhs.0)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

/// Panics on a zero divisor; use [`Rat::checked_div`] when the divisor is
/// not known to be nonzero.
impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self.checked_div(rhs).expect("Rat division by zero")
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(Rational::from(-&self.0))
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |a, b| a * b)
    }
}

/// Bernoulli numbers `B_0..=B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        let mut acc = Rat::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += &(Rat::binomial(m as i64 + 1, k as u32) * bk);
        }
        b.push(-acc / Rat::from_int(m as i64 + 1));
    }
    b
}

/// Bernoulli polynomial `B_n(x)`.
pub fn bernoulli_polynomial(n: usize, x: &Rat) -> Rat {
    let b = bernoulli_numbers(n);
    (0..=n)
        .map(|k| Rat::binomial(n as i64, k as u32) * &b[k] * x.pow((n - k) as u32))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_addition() {
        assert_eq!(Rat::new(1, 2) + Rat::new(1, 3), Rat::new(5, 6));
    }

    #[test]
    fn zero_absorbs() {
        assert!((Rat::zero() * Rat::new(7, 5760)).is_zero());
    }

    #[test]
    fn self_division_is_one() {
        let x = Rat::new(1, 24);
        assert!(x.checked_div(&x).unwrap().is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Rat::one().checked_div(&Rat::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn ordering() {
        assert!(Rat::new(-1, 24) < Rat::zero());
        assert!(Rat::new(1, 3) > Rat::new(1, 4));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Rat::new(2, -4), Rat::new(-1, 2));
        assert_eq!(Rat::new(2, -4).to_string(), "-1/2");
        assert_eq!(Rat::new(6, 3).to_string(), "2");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "1", "-1/24", "7/5760", "123456789012345678901234567891/7"] {
            assert_eq!(s.parse::<Rat>().unwrap().to_string(), s);
        }
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
        assert_eq!(" 4/8 ".parse::<Rat>().unwrap(), Rat::new(1, 2));
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], Rat::new(-1, 2));
        assert_eq!(b[2], Rat::new(1, 6));
        assert!(b[3].is_zero());
        assert_eq!(b[4], Rat::new(-1, 30));
        assert_eq!(b[8], Rat::new(-1, 30));
        assert_eq!(bernoulli_polynomial(2, &Rat::new(1, 2)), Rat::new(-1, 12));
    }
}
