//! Power sums, monomial symmetric functions and Miwa times.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{EpsLaurent, Rat};
use crate::error::{Error, Result};

use super::multi::{Grading, MultiSeries};

/// A weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All partitions of `d`, in reverse lexicographic order.
    pub fn all(d: u32) -> Vec<Partition> {
        fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                go(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(d, d, &mut Vec::new(), &mut out);
        out
    }

    /// Coefficient of the monomial `x^lambda` in the power-sum product `p_self`:
    /// the number of ways to distribute the parts of `self` over the
    /// positions of `lambda` so that each position sums to its part.
    pub fn power_sum_to_monomial(&self, lambda: &Partition) -> u64 {
        fn go(parts: &[u32], slots: &mut [u32]) -> u64 {
            let Some((&p, rest)) = parts.split_first() else {
                return slots.iter().all(|&s| s == 0) as u64;
            };
            let mut count = 0;
            for i in 0..slots.len() {
                if slots[i] >= p {
                    slots[i] -= p;
                    count += go(rest, slots);
                    slots[i] += p;
                }
            }
            count
        }
        if self.weight() != lambda.weight() {
            return 0;
        }
        let mut slots = lambda.0.clone();
        go(&self.0, &mut slots)
    }
}

/// A polynomial in Miwa times with `EpsLaurent` coefficients.
///
/// Monomials are stored as sorted lists of time indices, so `[0, 0, 2]`
/// stands for `t_0^2 t_2`. With `scaled` the variables are `t_k` of degree
/// `k + 1`; otherwise they are `T_k` of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiwaPolynomial {
    pub scaled: bool,
    pub degree: u32,
    #[serde(with = "terms_serde")]
    pub terms: BTreeMap<Vec<u32>, EpsLaurent>,
}

mod terms_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Term {
        t: Vec<u32>,
        val: EpsLaurent,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<u32>, EpsLaurent>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Term> = m
            .iter()
            .map(|(t, val)| Term {
                t: t.clone(),
                val: val.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<u32>, EpsLaurent>, D::Error> {
        let v = Vec::<Term>::deserialize(d)?;
        Ok(v.into_iter().map(|t| (t.t, t.val)).collect())
    }
}

impl MiwaPolynomial {
    pub fn zero(scaled: bool, degree: u32) -> Self {
        MiwaPolynomial {
            scaled,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial_degree(&self, m: &[u32]) -> u32 {
        m.iter().map(|k| if self.scaled { k + 1 } else { *k }).sum()
    }

    pub fn coeff(&self, m: &[u32]) -> EpsLaurent {
        let mut key = m.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: &[u32], c: &EpsLaurent) {
        if c.is_zero() {
            return;
        }
        let mut key = m.to_vec();
        key.sort_unstable();
        let entry = self.terms.entry(key.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Terms of degree at most `d`.
    pub fn truncate(&self, d: u32) -> MiwaPolynomial {
        let mut out = MiwaPolynomial::zero(self.scaled, d.min(self.degree));
        for (m, c) in &self.terms {
            if self.monomial_degree(m) <= d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Monomials whose coefficients differ, with both values.
    pub fn diff(&self, other: &MiwaPolynomial) -> Vec<(Vec<u32>, EpsLaurent, EpsLaurent)> {
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .filter_map(|k| {
                let (a, b) = (self.coeff(k), other.coeff(k));
                (a != b).then(|| (k.clone(), a, b))
            })
            .collect()
    }
}

impl fmt::Display for MiwaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let var = if self.scaled { "t" } else { "T" };
        let mut first = true;
        let mut keys: Vec<_> = self.terms.keys().collect();
        keys.sort_by_key(|m| (self.monomial_degree(m), (*m).clone()));
        for m in keys {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", self.terms[m])?;
            let mut i = 0;
            while i < m.len() {
                let mut j = i;
                while j < m.len() && m[j] == m[i] {
                    j += 1;
                }
                match j - i {
                    1 => write!(f, "*{var}{}", m[i])?,
                    e => write!(f, "*{var}{}^{e}", m[i])?,
                }
                i = j;
            }
        }
        Ok(())
    }
}

/// Solves `sum_mu b_mu L[mu][lambda] = c_lambda` for `b` by Gaussian
/// elimination over the rationals.
fn solve_transition(parts: &[Partition], rhs: Vec<EpsLaurent>, d: u32) -> Result<Vec<EpsLaurent>> {
    let k = parts.len();
    // Row lambda, column mu.
    let mut a: Vec<Vec<Rat>> = parts
        .iter()
        .map(|lam| {
            parts
                .iter()
                .map(|mu| Rat::from_int(mu.power_sum_to_monomial(lam) as i64))
                .collect()
        })
        .collect();
    let mut b = rhs;
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::InconsistentSystem(d as i64))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip()?;
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        b[col] = b[col].scale(&inv);
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..k {
                    let v = &factor * &a[col][c];
                    a[r][c] -= &v;
                }
                let v = b[col].scale(&factor);
                b[r] -= &v;
            }
        }
    }
    Ok(b)
}

/// Rewrites a symmetric series in `z_j^{-1}` as a polynomial in Miwa times.
///
/// With `eps_scaling` the power sums `p_{k+1} = sum_j z_j^{-k-1}` become
/// `eps^k t_k / k!`; otherwise `p_k = k T_k`.
pub fn symmetric_to_miwa(sym: &MultiSeries, n: usize, degree: u32, eps_scaling: bool) -> Result<MiwaPolynomial> {
    if sym.nvars() != n {
        return Err(Error::VariableMismatch(format!(
            "{} variables, expected {n}",
            sym.nvars()
        )));
    }
    if n <= degree as usize {
        return Err(Error::StabilizationWindow {
            n,
            degree: degree as usize,
        });
    }
    if *sym.grading() != Grading::Total {
        return Err(Error::InvalidParameter(
            "symmetric input must use the total-degree grading".into(),
        ));
    }
    if let Some((e, _)) = sym.terms().find(|(e, _)| e.iter().any(|x| *x > 0)) {
        return Err(Error::PositivePart {
            top: *e.iter().max().unwrap_or(&0),
        });
    }
    sym.check_symmetric()?;
    let probe: Vec<i64> = (0..n).map(|j| if j == 0 { -(degree as i64) } else { 0 }).collect();
    sym.coeff(&probe)?;

    let mut out = MiwaPolynomial::zero(eps_scaling, degree);
    for d in 0..=degree {
        let parts = Partition::all(d);
        let rhs: Vec<EpsLaurent> = parts
            .iter()
            .map(|lam| {
                let mut e = vec![0i64; n];
                for (j, p) in lam.parts().iter().enumerate() {
                    e[j] = -(*p as i64);
                }
                sym.coeff_unchecked(&e)
            })
            .collect();
        let b = solve_transition(&parts, rhs, d)?;
        for (mu, coeff) in parts.iter().zip(b) {
            if coeff.is_zero() {
                continue;
            }
            let mut c = coeff;
            let mut mono = Vec::with_capacity(mu.len());
            for &p in mu.parts() {
                if eps_scaling {
                    c = c.scale(&Rat::factorial(p - 1).recip()?).shift(p as i32 - 1);
                    mono.push(p - 1);
                } else {
                    c = c.scale(&Rat::from_int(p as i64));
                    mono.push(p);
                }
            }
            out.add_term(&mono, &c);
        }
    }
    Ok(out)
}

/// Expands a Miwa polynomial back into a symmetric series in `n` variables,
/// exact down to total degree `-degree`.
pub fn miwa_to_symmetric(poly: &MiwaPolynomial, n: usize) -> Result<MultiSeries> {
    let order = poly.degree as i64;
    let power_sum = |k: u32| -> MultiSeries {
        let terms = (0..n).map(|j| {
            let mut e = vec![0; n];
            e[j] = -(k as i64);
            (e, EpsLaurent::one())
        });
        MultiSeries::polynomial(n, Grading::Total, terms).truncate(order)
    };
    let mut out = MultiSeries::zero(n, Grading::Total).truncate(order);
    for (mono, c) in &poly.terms {
        let mut term = MultiSeries::one(n, Grading::Total).truncate(order).scale(c);
        for &k in mono {
            let (p, factor) = if poly.scaled {
                // t_k = k!/eps^k p_{k+1}
                (k + 1, EpsLaurent::monomial(Rat::factorial(k), -(k as i32)))
            } else {
                // T_k = p_k / k
                (k, EpsLaurent::constant(Rat::new(1, k as i64)))
            };
            term = term.mul(&power_sum(p).scale(&factor))?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}
