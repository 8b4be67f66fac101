//! Truncated Laurent series in a single variable z.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{BigFloat, EpsLaurent, Rat};
use crate::error::{Error, Result};

use super::json::{SeriesJson, TermJson};

/// A Laurent series `sum_d c_d z^d` known exactly for `-order <= d <= top`.
///
/// `top` is a structural upper bound on the degree of the true (untruncated)
/// series, while `order` bounds the window from below: every coefficient with
/// `d >= -order` is exact, everything below is unknown. Reading a coefficient
/// below the window is an error.
#[derive(Clone)]
pub struct ZSeries {
    top: i64,
    order: i64,
    coeffs: BTreeMap<i64, EpsLaurent>,
}

impl ZSeries {
    pub fn zero(top: i64, order: i64) -> Self {
        ZSeries {
            top,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(EpsLaurent::one(), 0, order)
    }

    /// `c z^d`, exact down to `z^{-order}`.
    pub fn monomial(c: EpsLaurent, d: i64, order: i64) -> Self {
        let mut s = Self::zero(d, order);
        s.add_term(d, &c);
        s
    }

    /// Builds a series from `(degree, coefficient)` pairs. The top degree is
    /// taken from the largest degree supplied (0 if none).
    pub fn from_terms<I>(terms: I, order: i64) -> Self
    where
        I: IntoIterator<Item = (i64, EpsLaurent)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let top = terms.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut s = Self::zero(top, order);
        for (d, c) in terms {
            s.add_term(d, &c);
        }
        s
    }

    /// Same as [`ZSeries::from_terms`] but with rational coefficients.
    pub fn from_rats<I: IntoIterator<Item = (i64, Rat)>>(terms: I, order: i64) -> Self {
        Self::from_terms(terms.into_iter().map(|(d, c)| (d, EpsLaurent::constant(c))), order)
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &EpsLaurent)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// Coefficient of `z^d`; errors if `d` lies below the valid window.
    pub fn coeff(&self, d: i64) -> Result<EpsLaurent> {
        if d < -self.order {
            return Err(Error::TruncationTooSmall {
                what: format!(
                    "coefficient of z^{d} requested from a series valid down to z^{}",
                    -self.order
                ),
                suggested: -d,
            });
        }
        Ok(self.coeff_unchecked(d))
    }

    /// Coefficient of `z^d` without the window check; zero outside the window.
    pub fn coeff_unchecked(&self, d: i64) -> EpsLaurent {
        self.coeffs.get(&d).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, d: i64, c: &EpsLaurent) {
        if d > self.top {
            self.top = d;
        }
        if d < -self.order || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(d).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&d);
        }
    }

    /// Shrinks the window to `z^{-order}` (never widens it).
    pub fn truncate(&self, order: i64) -> ZSeries {
        let order = order.min(self.order);
        ZSeries {
            top: self.top,
            order,
            coeffs: self.coeffs.range(-order..).map(|(d, c)| (*d, c.clone())).collect(),
        }
    }

    /// True when the two series agree on their common window.
    pub fn eq_on_window(&self, other: &ZSeries) -> bool {
        let order = self.order.min(other.order);
        let a = self.coeffs.range(-order..);
        let b = other.coeffs.range(-order..);
        a.eq(b)
    }

    pub fn add(&self, other: &ZSeries) -> ZSeries {
        let mut out = self.truncate(self.order.min(other.order));
        out.top = self.top.max(other.top);
        for (d, c) in other.coeffs.range(-out.order..) {
            out.add_term(*d, c);
        }
        out
    }

    pub fn sub(&self, other: &ZSeries) -> ZSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ZSeries {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, c: &EpsLaurent) -> ZSeries {
        self.map_coeffs(|v| v * c)
    }

    /// Multiplies by `eps^k`.
    pub fn eps_shift(&self, k: i32) -> ZSeries {
        self.map_coeffs(|v| v.shift(k))
    }

    fn map_coeffs(&self, f: impl Fn(&EpsLaurent) -> EpsLaurent) -> ZSeries {
        let mut out = ZSeries::zero(self.top, self.order);
        for (d, c) in &self.coeffs {
            out.add_term(*d, &f(c));
        }
        out
    }

    /// Multiplies by `z^k`; the window moves with the degrees.
    pub fn z_shift(&self, k: i64) -> ZSeries {
        ZSeries {
            top: self.top + k,
            order: self.order - k,
            coeffs: self.coeffs.iter().map(|(d, c)| (d + k, c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &ZSeries) -> ZSeries {
        let order = (self.order - other.top).min(other.order - self.top);
        let mut out = ZSeries::zero(self.top + other.top, order);
        let mut acc: BTreeMap<i64, EpsLaurent> = BTreeMap::new();
        for (da, ca) in &self.coeffs {
            for (db, cb) in other.coeffs.range(-order - da..) {
                acc.entry(da + db).or_default().add_product(ca, cb);
            }
        }
        out.coeffs = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    /// The part of degree `<= -1` (drops the constant and polynomial terms).
    pub fn negative_part(&self) -> ZSeries {
        ZSeries {
            top: self.top.min(-1),
            order: self.order,
            coeffs: self.coeffs.range(..0).map(|(d, c)| (*d, c.clone())).collect(),
        }
    }

    /// Multiplicative inverse of a series of the form `1 + O(1/z)`.
    pub fn invert(&self) -> Result<ZSeries> {
        if !self.coeff_unchecked(0).is_one() || self.coeffs.range(1..).next().is_some() {
            return Err(Error::NonUnitConstant);
        }
        // b_0 = 1, b_{-j} = -sum_{i=1..j} a_{-i} b_{-(j-i)}
        let order = self.order;
        let mut b: Vec<EpsLaurent> = vec![EpsLaurent::one()];
        for j in 1..=order.max(0) {
            let mut acc = EpsLaurent::zero();
            for (d, a) in self.coeffs.range(-j..0) {
                acc.add_product(a, &b[(j + d) as usize]);
            }
            b.push(-acc);
        }
        let mut out = ZSeries::zero(0, order);
        for (j, c) in b.iter().enumerate() {
            out.add_term(-(j as i64), c);
        }
        Ok(out)
    }

    /// `exp(a)` for a series without constant or positive part.
    pub fn exp(&self) -> Result<ZSeries> {
        if let Some((d, _)) = self.coeffs.range(0..).next() {
            return Err(Error::PositivePart { top: *d });
        }
        // With w = 1/z and a = sum_k alpha_k w^k: n e_n = sum_k k alpha_k e_{n-k}.
        let order = self.order;
        let mut e: Vec<EpsLaurent> = vec![EpsLaurent::one()];
        for n in 1..=order.max(0) {
            let mut acc = EpsLaurent::zero();
            for (d, a) in self.coeffs.range(-n..0) {
                let k = -d;
                acc.add_product(&a.scale(&Rat::from_int(k)), &e[(n - k) as usize]);
            }
            e.push(acc.scale(&Rat::new(1, n)));
        }
        let mut out = ZSeries::zero(0, order);
        for (n, c) in e.iter().enumerate() {
            out.add_term(-(n as i64), c);
        }
        Ok(out)
    }

    /// Expansion of `z -> a(z + c)`, using `(z+c)^d = z^d (1 + c/z)^d`.
    pub fn argument_shift(&self, c: i64) -> ZSeries {
        if c == 0 {
            return self.clone();
        }
        let c = Rat::from_int(c);
        let mut out = ZSeries::zero(self.top, self.order);
        for (d, v) in &self.coeffs {
            let mut i = 0u32;
            let mut cpow = Rat::one();
            while d - i as i64 >= -self.order {
                let b = Rat::binomial(*d, i);
                if *d >= 0 && i as i64 > *d {
                    break;
                }
                out.add_term(d - i as i64, &v.scale(&(&b * &cpow)));
                cpow *= &c;
                i += 1;
            }
        }
        out
    }

    /// Termwise derivative. The error term `O(z^{-order-1})` differentiates to
    /// `O(z^{-order-2})`, so the window grows by one.
    pub fn derivative(&self) -> ZSeries {
        let mut out = ZSeries::zero(self.top - 1, self.order + 1);
        for (d, c) in &self.coeffs {
            out.add_term(d - 1, &c.scale(&Rat::from_int(*d)));
        }
        out
    }

    /// Formal residue at infinity, `res_{z=inf} a dz = -[z^-1] a`.
    pub fn residue_at_infinity(&self) -> Result<EpsLaurent> {
        Ok(-self.coeff(-1)?)
    }

    /// Numeric value of the truncated series at the given `z` and `eps`.
    pub fn eval(&self, z: &BigFloat, eps: &BigFloat) -> Result<BigFloat> {
        let prec = z.prec().max(eps.prec());
        let mut acc = BigFloat::zero(prec);
        for (d, c) in &self.coeffs {
            acc = &acc + &(&c.eval(eps)? * &z.powi(*d as i32));
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            vars: 1,
            top: vec![self.top],
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .rev()
                .map(|(d, c)| TermJson {
                    exp: vec![*d],
                    val: c.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Debug for ZSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZSeries[top {}, order {}] {{", self.top, self.order)?;
        for (d, c) in self.coeffs.iter().rev() {
            write!(f, " z^{d}: {c};")?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rs(terms: &[(i64, i64, i64)], order: i64) -> ZSeries {
        ZSeries::from_rats(terms.iter().map(|&(d, p, q)| (d, Rat::new(p, q))), order)
    }

    #[test]
    fn difference_of_squares() {
        let a = rs(&[(0, 1, 1), (-1, 1, 1)], 2);
        let b = rs(&[(0, 1, 1), (-1, -1, 1)], 2);
        assert!(a.mul(&b).eq_on_window(&rs(&[(0, 1, 1), (-2, -1, 1)], 2)));
    }

    #[test]
    fn z_times_inverse() {
        let p = rs(&[(1, 1, 1)], 3).mul(&rs(&[(-1, 1, 1)], 3));
        assert!(p.coeff(0).unwrap().is_one());
        assert_eq!(p.terms().count(), 1);
    }

    #[test]
    fn geometric_inverse() {
        let a = rs(&[(0, 1, 1), (-1, 1, 1)], 2);
        let inv = a.invert().unwrap();
        assert!(inv.eq_on_window(&rs(&[(0, 1, 1), (-1, -1, 1), (-2, 1, 1)], 2)));
        assert!(ZSeries::one(5).invert().unwrap().eq_on_window(&ZSeries::one(5)));
        assert_eq!(rs(&[(0, 2, 1)], 2).invert().unwrap_err(), Error::NonUnitConstant);
    }

    #[test]
    fn shifts() {
        let z = rs(&[(1, 1, 1)], 3);
        assert!(z.argument_shift(1).eq_on_window(&rs(&[(1, 1, 1), (0, 1, 1)], 3)));
        let zi = rs(&[(-1, 1, 1)], 3);
        assert!(zi
            .argument_shift(1)
            .eq_on_window(&rs(&[(-1, 1, 1), (-2, -1, 1), (-3, 1, 1)], 3)));
        let zi2 = rs(&[(-2, 1, 1)], 4);
        assert!(zi2
            .argument_shift(-1)
            .eq_on_window(&rs(&[(-2, 1, 1), (-3, 2, 1), (-4, 3, 1)], 4)));
    }

    #[test]
    fn exponentials() {
        let zero = ZSeries::zero(-1, 4);
        assert!(zero.exp().unwrap().eq_on_window(&ZSeries::one(4)));
        let e = rs(&[(-1, 1, 1)], 2).exp().unwrap();
        assert!(e.eq_on_window(&rs(&[(0, 1, 1), (-1, 1, 1), (-2, 1, 2)], 2)));
        assert!(matches!(rs(&[(0, 1, 1)], 2).exp(), Err(Error::PositivePart { .. })));
    }

    #[test]
    fn exp_reproduces_the_single_step_prefactor() {
        // (z+1) log(1 + 1/z) - 1 = sum_{m>=1} (-1)^{m+1} z^{-m} / (m (m+1))
        let m = 8;
        let ser = ZSeries::from_rats(
            (1..=m).map(|k| (-k, Rat::new(if k % 2 == 1 { 1 } else { -1 }, k * (k + 1)))),
            m,
        );
        assert_eq!(ser.coeff(-1).unwrap(), EpsLaurent::constant(Rat::new(1, 2)));
        assert_eq!(ser.coeff(-2).unwrap(), EpsLaurent::constant(Rat::new(-1, 6)));
        // Oracle: ((z+1)/z)^(z+1) / e = exp(ser); compare log-derivatives exactly.
        // d/dz log ((1+1/z)^(z+1)) = log(1+1/z) - 1/z, and d/dz ser is the same series.
        let log1p: ZSeries = ZSeries::from_rats((1..=m).map(|k| (-k, Rat::new(if k % 2 == 1 { 1 } else { -1 }, k))), m);
        let expected = log1p.sub(&rs(&[(-1, 1, 1)], m));
        assert!(ser.derivative().eq_on_window(&expected));
        // exp(ser) times exp(-ser) is one.
        let e = ser.exp().unwrap();
        let einv = ser.neg().exp().unwrap();
        assert!(e.mul(&einv).eq_on_window(&ZSeries::one(m)));
        assert!(e.invert().unwrap().eq_on_window(&einv));
    }

    #[test]
    fn residues() {
        assert_eq!(
            rs(&[(-1, 1, 1)], 3).residue_at_infinity().unwrap(),
            EpsLaurent::constant(Rat::from_int(-1))
        );
        assert!(rs(&[(0, 1, 1), (-2, 1, 1)], 3).residue_at_infinity().unwrap().is_zero());
        assert!(matches!(
            rs(&[(0, 1, 1)], 0).residue_at_infinity(),
            Err(Error::TruncationTooSmall { suggested: 1, .. })
        ));
    }

    #[test]
    fn window_bookkeeping() {
        let a = rs(&[(2, 1, 1), (0, 3, 1)], 5);
        let b = rs(&[(0, 1, 1), (-1, 1, 1)], 5);
        // a is a polynomial known down to z^-5; its product with b is valid down to z^-3.
        let p = a.mul(&b);
        assert_eq!(p.top(), 2);
        assert_eq!(p.order(), 3);
        assert!(p.coeff(-4).is_err());
    }

    fn arb_series() -> impl Strategy<Value = ZSeries> {
        (
            prop::collection::vec((-6i64..3, -9i64..10, 1i64..5, -2i32..3), 0..8),
            4i64..9,
        )
            .prop_map(|(t, m)| {
                ZSeries::from_terms(
                    t.into_iter()
                        .map(|(d, p, q, e)| (d, EpsLaurent::monomial(Rat::new(p, q), e))),
                    m,
                )
            })
    }

    proptest! {
        #[test]
        fn shift_round_trip(a in arb_series(), c in -3i64..4) {
            let back = a.argument_shift(c).argument_shift(-c);
            prop_assert!(back.eq_on_window(&a));
        }

        #[test]
        fn residue_is_linear(a in arb_series(), b in arb_series()) {
            let lhs = a.add(&b).residue_at_infinity().unwrap();
            let rhs = &a.residue_at_infinity().unwrap() + &b.residue_at_infinity().unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn residue_of_derivative_vanishes(a in arb_series()) {
            prop_assert!(a.derivative().residue_at_infinity().unwrap().is_zero());
        }

        #[test]
        fn product_is_commutative_on_window(a in arb_series(), b in arb_series()) {
            let p = a.mul(&b);
            let q = b.mul(&a);
            prop_assert_eq!(p.order(), q.order());
            prop_assert!(p.eq_on_window(&q));
        }
    }
}
