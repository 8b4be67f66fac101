//! Laurent polynomials in eps with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::float::BigFloat;
use super::rat::Rat;
use crate::error::{Error, Result};

/// An element of Q[eps, 1/eps]. Zero coefficients are never stored, so the
/// zero element has an empty map and structural equality is ring equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct EpsLaurent {
    coeffs: BTreeMap<i32, Rat>,
}

impl EpsLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * eps^e`.
    pub fn monomial(c: Rat, e: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        EpsLaurent { coeffs }
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, Rat)>>(terms: I) -> Self {
        let mut p = EpsLaurent::zero();
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(Rat::is_one)
    }

    pub fn coeff(&self, e: i32) -> Rat {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, e: i32, c: &Rat) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.coeffs.remove(&e);
                }
            }
            None => {
                self.coeffs.insert(e, c.clone());
            }
        }
    }

    /// Adds `a * b` into `self` without materializing the product.
    pub fn add_product(&mut self, a: &EpsLaurent, b: &EpsLaurent) {
        for (ea, ca) in &a.coeffs {
            for (eb, cb) in &b.coeffs {
                self.add_term(ea + eb, &(ca * cb));
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> EpsLaurent {
        if c.is_zero() {
            return EpsLaurent::zero();
        }
        EpsLaurent {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by `eps^k`.
    pub fn shift(&self, k: i32) -> EpsLaurent {
        EpsLaurent {
            coeffs: self.coeffs.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// If `self` is a single term `c * eps^e`, returns `(c, e)`.
    pub fn as_monomial(&self) -> Option<(&Rat, i32)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(e, c)| (c, *e))
        } else {
            None
        }
    }

    /// Exact division by a single-term Laurent polynomial.
    pub fn div_monomial(&self, d: &EpsLaurent) -> Result<EpsLaurent> {
        let (c, e) = d.as_monomial().ok_or(Error::DivisionByZero)?;
        let inv = c.recip()?;
        Ok(self.scale(&inv).shift(-e))
    }

    /// Evaluates at a numeric eps using Horner's rule on `eps^min * poly(eps)`.
    pub fn eval(&self, eps: &BigFloat) -> Result<BigFloat> {
        let prec = eps.prec();
        let (Some(lo), Some(hi)) = (self.min_exponent(), self.max_exponent()) else {
            return Ok(BigFloat::zero(prec));
        };
        if lo < 0 && eps.is_zero() {
            return Err(Error::ZeroEvaluation);
        }
        let mut acc = BigFloat::zero(prec);
        for e in (lo..=hi).rev() {
            acc = &(&acc * eps) + &BigFloat::from_rat(&self.coeff(e), prec);
        }
        Ok(&acc * &eps.powi(lo))
    }
}

impl fmt::Display for EpsLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() {
                ("-", c.abs())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match *e {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "eps^{e}")?,
                _ => write!(f, "{mag}*eps^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for EpsLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for EpsLaurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            map.serialize_entry(&e.to_string(), c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for EpsLaurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, Rat>::deserialize(deserializer)?;
        let mut p = EpsLaurent::zero();
        for (k, v) in raw {
            let e: i32 = k.parse().map_err(serde::de::Error::custom)?;
            p.add_term(e, &v);
        }
        Ok(p)
    }
}

impl From<Rat> for EpsLaurent {
    fn from(c: Rat) -> Self {
        EpsLaurent::constant(c)
    }
}

impl Add<&EpsLaurent> for &EpsLaurent {
    type Output = EpsLaurent;
    fn add(self, rhs: &EpsLaurent) -> EpsLaurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for EpsLaurent {
    type Output = EpsLaurent;
    fn add(mut self, rhs: EpsLaurent) -> EpsLaurent {
        self += &rhs;
        self
    }
}

impl AddAssign<&EpsLaurent> for EpsLaurent {
    fn add_assign(&mut self, rhs: &EpsLaurent) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, c);
        }
    }
}

impl SubAssign<&EpsLaurent> for EpsLaurent {
    fn sub_assign(&mut self, rhs: &EpsLaurent) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, &-c);
        }
    }
}

impl Sub<&EpsLaurent> for &EpsLaurent {
    type Output = EpsLaurent;
    fn sub(self, rhs: &EpsLaurent) -> EpsLaurent {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for EpsLaurent {
    type Output = EpsLaurent;
    fn sub(mut self, rhs: EpsLaurent) -> EpsLaurent {
        self -= &rhs;
        self
    }
}

impl Mul<&EpsLaurent> for &EpsLaurent {
    type Output = EpsLaurent;
    fn mul(self, rhs: &EpsLaurent) -> EpsLaurent {
        let mut out = EpsLaurent::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Mul for EpsLaurent {
    type Output = EpsLaurent;
    fn mul(self, rhs: EpsLaurent) -> EpsLaurent {
        &self * &rhs
    }
}

impl Neg for &EpsLaurent {
    type Output = EpsLaurent;
    fn neg(self) -> EpsLaurent {
        EpsLaurent {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for EpsLaurent {
    type Output = EpsLaurent;
    fn neg(self) -> EpsLaurent {
        -&self
    }
}
