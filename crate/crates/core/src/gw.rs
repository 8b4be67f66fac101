//! Stationary invariants `<tau_{k_1} ... tau_{k_n}>` from residues of the
//! one- and n-point series, and the free energy in Miwa times.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{EpsLaurent, Rat};
use crate::error::{Error, Result};
use crate::perm::permutations;
use crate::series::{expand_inverse_difference, Grading, MiwaPolynomial, MultiSeries, Window};
use crate::wave::{s1_log_series, Normalized};

/// One invariant: the Laurent polynomial in `eps` whose `eps^{2g-2}`
/// coefficient is the genus `g` contribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantRecord {
    pub ks: Vec<u32>,
    pub value: EpsLaurent,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by_genus: Option<GenusDegreeTable>,
}

impl InvariantRecord {
    fn new(ks: &[u32], value: EpsLaurent) -> Self {
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        InvariantRecord {
            ks,
            value,
            by_genus: None,
        }
    }

    pub fn with_genus_table(mut self) -> Result<Self> {
        self.by_genus = Some(GenusDegreeTable::decode(&self.ks, &self.value)?);
        Ok(self)
    }
}

/// `(g, d) -> coefficient`, with `k_1 + ... + k_n = 2(g - 1 + d)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenusDegreeTable {
    pub entries: BTreeMap<(i64, i64), Rat>,
}

impl GenusDegreeTable {
    pub fn decode(ks: &[u32], value: &EpsLaurent) -> Result<Self> {
        let total: i64 = ks.iter().map(|&k| k as i64).sum();
        let mut entries = BTreeMap::new();
        if value.is_zero() {
            return Ok(GenusDegreeTable { entries });
        }
        if total % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "nonzero invariant for odd total {total}"
            )));
        }
        for (e, c) in value.terms() {
            if e % 2 != 0 {
                return Err(Error::OddEpsExponent(e));
            }
            let g = (e as i64 + 2) / 2;
            let d = total / 2 + 1 - g;
            entries.insert((g, d), c.clone());
        }
        Ok(GenusDegreeTable { entries })
    }

    pub fn get(&self, g: i64, d: i64) -> Option<&Rat> {
        self.entries.get(&(g, d))
    }
}

impl Serialize for GenusDegreeTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for ((g, d), c) in &self.entries {
            map.serialize_entry(&format!("{g},{d}"), c)?;
        }
        map.end()
    }
}

fn weight(k: u32) -> Result<EpsLaurent> {
    Ok(EpsLaurent::monomial(Rat::factorial(k + 1).recip()?, k as i32 + 1))
}

/// The truncation order used for an n-point computation.
pub fn truncation_policy(ks: &[u32]) -> i64 {
    ks.iter().map(|&k| k as i64 + 2).sum::<i64>() + ks.len() as i64
}

/// `<tau_k> = -res S_1(z) eps^{k+1} z^{k+1} / (k+1)! dz`.
pub fn one_point_invariant(k: u32) -> Result<InvariantRecord> {
    let ab = Normalized::new(k as i64 + 3)?;
    Ok(InvariantRecord::new(&[k], one_point_with(&ab, k)?))
}

fn one_point_with(ab: &Normalized, k: u32) -> Result<EpsLaurent> {
    let s1 = s1_log_series(ab).into_plain()?;
    let shifted = s1.z_shift(k as i64 + 1);
    let res = shifted.residue_at_infinity()?;
    Ok(&(-res) * &weight(k)?)
}

/// Coefficient of `prod_j z_j^{target_j}` in
/// `S_n = eps^{-n} (-(1/n) sum_sigma tr R(z_s1) ... R(z_sn) / prod (z_si - z_s(i+1)) - [n = 2]/(z_1 - z_2)^2)`.
/// The cyclic product of kernels is that trace. Only the inverse-difference factors are expanded as
/// series; the trace is assembled from 2x2 coefficient matrices.
pub fn sn_coefficient(ab: &Normalized, target: &[i64], order: i64, region: &[usize]) -> Result<EpsLaurent> {
    let n = target.len();
    if n < 2 {
        return Err(Error::InvalidParameter("the cyclic formula needs n >= 2".into()));
    }
    let ab = ab.truncate(order);
    let r = ab.r_matrix();
    let depth = r.order();
    let mut rc = Vec::new();
    for d in 0..=depth {
        rc.push(r.coeff(-d)?);
    }
    let grading = Grading::Region(region.to_vec());
    let t_funcs = grading.functionals(target);

    let perms = permutations(n);
    let terms: Vec<Result<EpsLaurent>> = perms
        .par_iter()
        .map(|sigma| {
            let factors: Vec<MultiSeries> = (0..n)
                .map(|i| expand_inverse_difference(sigma[i], sigma[(i + 1) % n], region, order))
                .collect::<Result<_>>()?;
            let natural = factors
                .iter()
                .skip(1)
                .fold(factors[0].window().clone(), |w, f| w.product(f.window()));
            check_window(&natural, &t_funcs, order)?;

            // rest_tops[i] = combined tops of factors i.., used for pruning.
            let kf = t_funcs.len();
            let mut rest_tops = vec![vec![0i64; kf]; n + 1];
            for i in (0..n).rev() {
                for k in 0..kf {
                    rest_tops[i][k] = rest_tops[i + 1][k] + factors[i].window().top[k];
                }
            }
            let mut prod = MultiSeries::one(n, grading.clone());
            for (i, f) in factors.iter().enumerate() {
                prod = prod.mul_toward(f, target, &rest_tops[i + 1])?;
            }

            let mut acc = EpsLaurent::zero();
            'mono: for (delta, c) in prod.terms() {
                let mut mats = Vec::with_capacity(n);
                for &v in sigma {
                    let d = target[v] - delta[v];
                    if d > 0 {
                        continue 'mono;
                    }
                    if -d > depth {
                        return Err(Error::TruncationTooSmall {
                            what: format!("R coefficient at z^{d}"),
                            suggested: -d,
                        });
                    }
                    mats.push(&rc[(-d) as usize]);
                }
                acc.add_product(c, &trace_of_product(&mats));
            }
            Ok(acc)
        })
        .collect();
    let mut total = EpsLaurent::zero();
    for t in terms {
        total += &t?;
    }
    let mut value = total.scale(&Rat::new(-1, n as i64));
    if n == 2 {
        value -= &double_pole_coefficient(target, region);
    }
    Ok(value.shift(-(n as i32)))
}

fn check_window(w: &Window, t_funcs: &[i64], order: i64) -> Result<()> {
    for (f, s) in w.floor.iter().zip(t_funcs) {
        if let Some(f) = f {
            if *f > *s {
                return Err(Error::TruncationTooSmall {
                    what: "target coefficient outside the inverse-difference window".into(),
                    suggested: order + (f - s),
                });
            }
        }
    }
    Ok(())
}

/// Coefficient of `z^target` in `1/(z_1 - z_2)^2` expanded in the region.
fn double_pole_coefficient(target: &[i64], region: &[usize]) -> EpsLaurent {
    let (big, small) = (region[0], region[1]);
    let m = target[small];
    if m >= 0 && target[big] == -m - 2 {
        EpsLaurent::constant(Rat::from_int(m + 1))
    } else {
        EpsLaurent::zero()
    }
}

fn trace_of_product(mats: &[&[[EpsLaurent; 2]; 2]]) -> EpsLaurent {
    let mut cur = mats[0].clone();
    for m in &mats[1..] {
        let mut next: [[EpsLaurent; 2]; 2] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                let mut v = EpsLaurent::zero();
                v.add_product(&cur[i][0], &m[0][j]);
                v.add_product(&cur[i][1], &m[1][j]);
                next[i][j] = v;
            }
        }
        cur = next;
    }
    &cur[0][0] + &cur[1][1]
}

/// The n-point invariant at a fixed truncation order and region:
/// `(-1)^n prod_j res_{z_j} S_n prod_j eps^{k_j+1} z_j^{k_j+1}/(k_j+1)!`.
pub fn n_point_at(ab: &Normalized, ks: &[u32], order: i64, region: &[usize]) -> Result<EpsLaurent> {
    let target: Vec<i64> = ks.iter().map(|&k| -(k as i64) - 2).collect();
    // (-1)^n from the formula cancels the sign of the n residues.
    let mut v = sn_coefficient(ab, &target, order, region)?;
    for &k in ks {
        v = &v * &weight(k)?;
    }
    Ok(v)
}

fn n_point_checked(ab: &Normalized, ks: &[u32], region: &[usize]) -> Result<EpsLaurent> {
    let order = truncation_policy(ks);
    let v = n_point_at(ab, ks, order, region)?;
    let doubled = n_point_at(ab, ks, 2 * order, region)?;
    if v != doubled {
        return Err(Error::TruncationUnstable {
            order,
            doubled: 2 * order,
        });
    }
    Ok(v)
}

/// `<tau_{k_1} ... tau_{k_n}>` for `n >= 2`, in the region
/// `|z_1| > ... > |z_n|`, with the doubled-order stability check.
pub fn n_point_invariant(ks: &[u32]) -> Result<InvariantRecord> {
    if ks.len() < 2 {
        return Err(Error::InvalidParameter(
            "n_point_invariant needs at least two insertions".into(),
        ));
    }
    let ab = Normalized::new(2 * truncation_policy(ks))?;
    let region: Vec<usize> = (0..ks.len()).collect();
    Ok(InvariantRecord::new(ks, n_point_checked(&ab, ks, &region)?))
}

/// Same as [`n_point_invariant`] in an arbitrary region.
pub fn n_point_invariant_in(ks: &[u32], region: &[usize]) -> Result<InvariantRecord> {
    let ab = Normalized::new(2 * truncation_policy(ks))?;
    Ok(InvariantRecord::new(ks, n_point_checked(&ab, ks, region)?))
}

/// Any invariant: `S_1` for one insertion, the cyclic formula otherwise.
pub fn invariant(ks: &[u32]) -> Result<InvariantRecord> {
    match ks {
        [] => Err(Error::InvalidParameter("empty insertion list".into())),
        [k] => one_point_invariant(*k),
        _ => n_point_invariant(ks),
    }
}

pub fn invariant_by_genus(ks: &[u32]) -> Result<GenusDegreeTable> {
    let rec = invariant(ks)?;
    GenusDegreeTable::decode(&rec.ks, &rec.value)
}

/// `S_n` as a series, by multiplying out kernels and inverse differences at
/// a uniform order. Slower than [`sn_coefficient`]; meant for checks.
pub fn sn_series(ab: &Normalized, n: usize, order: i64, region: &[usize]) -> Result<MultiSeries> {
    if n < 2 {
        return Err(Error::InvalidParameter("the cyclic formula needs n >= 2".into()));
    }
    let ab = ab.truncate(order);
    let grading = Grading::Region(region.to_vec());
    let mut total: Option<MultiSeries> = None;
    for sigma in permutations(n) {
        let mut term = MultiSeries::one(n, grading.clone());
        for i in 0..n {
            let (a, b) = (sigma[i], sigma[(i + 1) % n]);
            term = term.mul(&ab.kernel_in(a, b, n, &grading)?)?.truncate(order);
            term = term
                .mul(&expand_inverse_difference(a, b, region, order)?)?
                .truncate(order);
        }
        total = Some(match total {
            None => term,
            Some(t) => t.add(&term)?,
        });
    }
    let total = total.expect("n >= 2 has permutations");
    let mut s = total.scale(&EpsLaurent::constant(Rat::new(-1, n as i64)));
    if n == 2 {
        let inv = expand_inverse_difference(0, 1, region, order)?;
        s = s.sub(&inv.mul(&inv)?.truncate(order))?;
    }
    Ok(s.scale(&EpsLaurent::monomial(Rat::one(), -(n as i32))))
}

/// All sorted tuples `ks` with `sum (k_j + 1) <= degree`.
pub fn insertion_tuples(degree: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for k in min..rest {
            if k < rest {
                cur.push(k);
                go(rest - k - 1, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(degree, 0, &mut Vec::new(), &mut out);
    out
}

/// `sum_{n>=1} sum_{ks} t_{k_1} ... t_{k_n} / n! <tau_{k_1} ... tau_{k_n}>`
/// up to degree `D` in the grading `deg t_k = k + 1`.
pub fn free_energy(degree: u32) -> Result<MiwaPolynomial> {
    if degree < 1 {
        return Err(Error::InvalidParameter("free energy needs D >= 1".into()));
    }
    let tuples = insertion_tuples(degree);
    let max_order = tuples.iter().map(|ks| 2 * truncation_policy(ks)).max().unwrap_or(4);
    let ab = Normalized::new(max_order)?;
    let values: Vec<Result<(Vec<u32>, EpsLaurent)>> = tuples
        .par_iter()
        .map(|ks| {
            let v = match ks.as_slice() {
                [k] => one_point_with(&ab.truncate(*k as i64 + 3), *k)?,
                _ => n_point_checked(&ab, ks, &(0..ks.len()).collect::<Vec<_>>())?,
            };
            Ok((ks.clone(), v))
        })
        .collect();
    let mut out = MiwaPolynomial::zero(true, degree);
    for r in values {
        let (ks, v) = r?;
        // t-monomial coefficient: value / prod (multiplicity!)
        let mut denom = Rat::one();
        let mut i = 0;
        while i < ks.len() {
            let j = (i..ks.len()).find(|&j| ks[j] != ks[i]).unwrap_or(ks.len());
            denom *= &Rat::factorial((j - i) as u32);
            i = j;
        }
        out.add_term(&ks, &v.scale(&denom.recip()?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(terms: &[(i32, i64, i64)]) -> EpsLaurent {
        EpsLaurent::from_terms(terms.iter().map(|&(e, p, q)| (e, Rat::new(p, q))))
    }

    #[test]
    fn one_point_values() {
        assert_eq!(one_point_invariant(0).unwrap().value, lp(&[(-2, 1, 1), (0, -1, 24)]));
        assert!(one_point_invariant(1).unwrap().value.is_zero());
        assert_eq!(
            one_point_invariant(2).unwrap().value,
            lp(&[(-2, 1, 4), (0, 1, 24), (2, 7, 5760)])
        );
        assert!(one_point_invariant(3).unwrap().value.is_zero());
    }

    #[test]
    fn one_point_k4() {
        // Oracle: prototype residue computation at order 8.
        let v = one_point_invariant(4).unwrap().value;
        assert_eq!(v, lp(&[(-2, 1, 36), (0, 1, 32), (2, 1, 1920), (4, -31, 967680)]));
    }

    #[test]
    fn two_and_three_point_values() {
        assert_eq!(n_point_invariant(&[0, 0]).unwrap().value, lp(&[(-2, 1, 1)]));
        assert!(n_point_invariant(&[0, 1]).unwrap().value.is_zero());
        assert_eq!(n_point_invariant(&[0, 0, 0]).unwrap().value, lp(&[(-2, 1, 1)]));
    }

    #[test]
    fn region_independence_two_points() {
        for ks in [[0u32, 0], [1, 1], [0, 2], [2, 0], [1, 3]] {
            let a = n_point_invariant_in(&ks, &[0, 1]).unwrap();
            let b = n_point_invariant_in(&ks, &[1, 0]).unwrap();
            assert_eq!(a.value, b.value, "{ks:?}");
        }
    }

    #[test]
    fn series_path_agrees_with_trace_path() {
        let ab = Normalized::new(12).unwrap();
        for region in [vec![0, 1], vec![1, 0]] {
            let s = sn_series(&ab, 2, 8, &region).unwrap();
            for t in [[-2i64, -2], [-3, -3], [-2, -4], [-4, -2]] {
                let fast = sn_coefficient(&ab, &t, 8, &region).unwrap();
                assert_eq!(s.coeff(&t).unwrap(), fast, "{t:?} {region:?}");
            }
        }
        let s3 = sn_series(&ab, 3, 7, &[0, 1, 2]).unwrap();
        let fast = sn_coefficient(&ab, &[-2, -2, -2], 7, &[0, 1, 2]).unwrap();
        assert_eq!(s3.coeff(&[-2, -2, -2]).unwrap(), fast);
    }

    #[test]
    fn two_point_numerator_is_regular_on_the_diagonal() {
        let ab = Normalized::new(8).unwrap();
        let g = Grading::Total;
        let k12 = ab.kernel_in(0, 1, 2, &g).unwrap();
        let k21 = ab.kernel_in(1, 0, 2, &g).unwrap();
        let num = k12.mul(&k21).unwrap().sub(&MultiSeries::one(2, g)).unwrap();
        let once = crate::series::divide_by_difference(&num, 0, 1).unwrap();
        crate::series::divide_by_difference(&once, 0, 1).unwrap();
    }

    #[test]
    fn genus_tables() {
        let t = invariant_by_genus(&[0]).unwrap();
        assert_eq!(t.get(0, 1), Some(&Rat::one()));
        assert_eq!(t.get(1, 0), Some(&Rat::new(-1, 24)));
        assert_eq!(t.entries.len(), 2);
        let t = invariant_by_genus(&[2]).unwrap();
        assert_eq!(t.get(0, 2), Some(&Rat::new(1, 4)));
        assert_eq!(t.get(1, 1), Some(&Rat::new(1, 24)));
        assert_eq!(t.get(2, 0), Some(&Rat::new(7, 5760)));
        assert!(invariant_by_genus(&[1]).unwrap().entries.is_empty());
        let odd = EpsLaurent::monomial(Rat::one(), -1);
        assert_eq!(
            GenusDegreeTable::decode(&[2], &odd).unwrap_err(),
            Error::OddEpsExponent(-1)
        );
    }

    #[test]
    fn record_json() {
        let rec = invariant(&[0]).unwrap().with_genus_table().unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            r#"{"ks":[0],"value":{"-2":"1","0":"-1/24"},"by_genus":{"0,1":"1","1,0":"-1/24"}}"#
        );
    }

    #[test]
    fn tuples() {
        let t = insertion_tuples(3);
        let expect: Vec<Vec<u32>> = vec![vec![0], vec![0, 0], vec![0, 0, 0], vec![0, 1], vec![1], vec![2]];
        assert_eq!(t, expect);
    }

    #[test]
    fn free_energy_low_degree() {
        let f1 = free_energy(1).unwrap();
        assert_eq!(f1.terms.len(), 1);
        assert_eq!(f1.coeff(&[0]), lp(&[(-2, 1, 1), (0, -1, 24)]));
        let f2 = free_energy(2).unwrap();
        assert_eq!(f2.coeff(&[0, 0]), lp(&[(-2, 1, 2)]));
        assert_eq!(f2.terms.len(), 2);
        let f3 = free_energy(3).unwrap();
        assert_eq!(f3.coeff(&[0, 0, 0]), lp(&[(-2, 1, 6)]));
        assert_eq!(f3.coeff(&[2]), lp(&[(-2, 1, 4), (0, 1, 24), (2, 7, 5760)]));
        assert_eq!(f3.terms.len(), 4);
    }
}
