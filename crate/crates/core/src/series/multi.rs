//! Truncated Laurent series in several variables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::arith::{EpsLaurent, Rat};
use crate::error::{Error, Result};

use super::json::{SeriesJson, TermJson};
use super::ZSeries;

pub type Exponents = Vec<i64>;

/// How truncation is measured.
///
/// `Total` uses the single functional `e_1 + ... + e_n`. `Region(order)`
/// lists the variables from the largest to the smallest modulus and uses the
/// prefix sums `e_{order[0]} + ... + e_{order[k]}`, one functional per `k`;
/// these are the degrees that stay bounded for expansions of `1/(z_i - z_j)`
/// in that region.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    Total,
    Region(Vec<usize>),
}

impl Grading {
    /// The region `|z_1| > |z_2| > ... > |z_n|`.
    pub fn standard_region(n: usize) -> Grading {
        Grading::Region((0..n).collect())
    }

    fn functional_count(&self, n: usize) -> usize {
        match self {
            Grading::Total => 1,
            Grading::Region(_) => n,
        }
    }

    /// Values of the grading functionals at an exponent vector.
    pub fn functionals(&self, e: &[i64]) -> Vec<i64> {
        match self {
            Grading::Total => vec![e.iter().sum()],
            Grading::Region(order) => {
                let mut acc = 0;
                order
                    .iter()
                    .map(|&v| {
                        acc += e[v];
                        acc
                    })
                    .collect()
            }
        }
    }

    /// For each functional, whether it involves variable `var`.
    fn involves(&self, n: usize, var: usize) -> Vec<bool> {
        match self {
            Grading::Total => vec![true],
            Grading::Region(_) => {
                let pos = self.position(var);
                (0..n).map(|k| k >= pos).collect()
            }
        }
    }

    fn position(&self, var: usize) -> usize {
        match self {
            Grading::Total => 0,
            Grading::Region(order) => order.iter().position(|&v| v == var).expect("variable not in region"),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Grading::Region(order) = self {
            let mut seen = vec![false; n];
            if order.len() != n {
                return Err(Error::VariableMismatch(format!(
                    "region lists {} variables, expected {n}",
                    order.len()
                )));
            }
            for &v in order {
                if v >= n || seen[v] {
                    return Err(Error::VariableMismatch(format!(
                        "region {order:?} is not an ordering of {n} variables"
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(())
    }

    fn permuted(&self, perm: &[usize]) -> Grading {
        match self {
            Grading::Total => Grading::Total,
            Grading::Region(order) => Grading::Region(order.iter().map(|&v| perm[v]).collect()),
        }
    }
}

/// Lower bounds (exactness window) and structural upper bounds on the
/// grading functionals. A `None` floor means the functional imposes no
/// truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub floor: Vec<Option<i64>>,
    pub top: Vec<i64>,
}

impl Window {
    fn exact(k: usize) -> Self {
        Window {
            floor: vec![None; k],
            top: vec![0; k],
        }
    }

    fn contains(&self, s: &[i64]) -> bool {
        self.floor.iter().zip(s).all(|(f, v)| f.is_none_or(|f| *v >= f))
    }

    /// Window of a product of series with these windows.
    pub fn product(&self, other: &Window) -> Window {
        let floor = (0..self.floor.len())
            .map(|k| match (self.floor[k], other.floor[k]) {
                (None, None) => None,
                (Some(a), None) => Some(a + other.top[k]),
                (None, Some(b)) => Some(b + self.top[k]),
                (Some(a), Some(b)) => Some((a + other.top[k]).max(b + self.top[k])),
            })
            .collect();
        let top = self.top.iter().zip(&other.top).map(|(a, b)| a + b).collect();
        Window { floor, top }
    }

    fn union(&self, other: &Window) -> Window {
        let floor = self
            .floor
            .iter()
            .zip(&other.floor)
            .map(|(a, b)| match (a, b) {
                (None, x) | (x, None) => *x,
                (Some(a), Some(b)) => Some(*a.max(b)),
            })
            .collect();
        let top = self.top.iter().zip(&other.top).map(|(a, b)| *a.max(b)).collect();
        Window { floor, top }
    }

    fn raise(&mut self, lower: &[Option<i64>]) {
        for (f, l) in self.floor.iter_mut().zip(lower) {
            if let Some(l) = l {
                *f = Some(f.map_or(*l, |f| f.max(*l)));
            }
        }
    }
}

/// A truncated multivariate Laurent series with `EpsLaurent` coefficients.
#[derive(Clone)]
pub struct MultiSeries {
    n: usize,
    grading: Grading,
    window: Window,
    coeffs: BTreeMap<Exponents, EpsLaurent>,
}

impl MultiSeries {
    pub fn zero(n: usize, grading: Grading) -> Self {
        let k = grading.functional_count(n);
        MultiSeries {
            n,
            grading,
            window: Window::exact(k),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n: usize, grading: Grading) -> Self {
        let mut s = Self::zero(n, grading);
        s.coeffs.insert(vec![0; n], EpsLaurent::one());
        s
    }

    /// An exact Laurent polynomial; structural tops are read off the terms.
    pub fn polynomial<I>(n: usize, grading: Grading, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, EpsLaurent)>,
    {
        let mut s = Self::zero(n, grading);
        let mut tops: Option<Vec<i64>> = None;
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length");
            let v = s.grading.functionals(&e);
            tops = Some(match tops {
                None => v,
                Some(t) => t.iter().zip(&v).map(|(a, b)| *a.max(b)).collect(),
            });
            s.add_term(e, &c);
        }
        if let Some(t) = tops {
            s.window.top = t;
        }
        s
    }

    /// Embeds a univariate series as a series in variable `var` of `n`.
    pub fn from_univariate(a: &ZSeries, var: usize, n: usize, grading: Grading) -> Self {
        let involves = grading.involves(n, var);
        let window = Window {
            floor: involves.iter().map(|&b| b.then_some(-a.order())).collect(),
            top: involves.iter().map(|&b| if b { a.top() } else { 0 }).collect(),
        };
        let mut coeffs = BTreeMap::new();
        for (d, c) in a.terms() {
            let mut e = vec![0; n];
            e[var] = d;
            coeffs.insert(e, c.clone());
        }
        MultiSeries {
            n,
            grading,
            window,
            coeffs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &EpsLaurent)> {
        self.coeffs.iter()
    }

    pub fn in_window(&self, e: &[i64]) -> bool {
        self.window.contains(&self.grading.functionals(e))
    }

    /// Coefficient of `z^e`; errors when `e` is outside the exactness window.
    pub fn coeff(&self, e: &[i64]) -> Result<EpsLaurent> {
        if e.len() != self.n {
            return Err(Error::VariableMismatch(format!(
                "exponent {e:?} for a series in {} variables",
                self.n
            )));
        }
        if !self.in_window(e) {
            let depth = -e.iter().filter(|x| **x < 0).sum::<i64>();
            return Err(Error::TruncationTooSmall {
                what: format!("coefficient of z^{e:?} lies outside the truncation window"),
                suggested: depth.max(1),
            });
        }
        Ok(self.coeff_unchecked(e))
    }

    pub fn coeff_unchecked(&self, e: &[i64]) -> EpsLaurent {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: Exponents, c: &EpsLaurent) {
        if c.is_zero() || !self.in_window(&e) {
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

    fn check_compatible(&self, other: &MultiSeries) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableMismatch(format!("{} vs {} variables", self.n, other.n)));
        }
        if self.grading != other.grading {
            return Err(Error::VariableMismatch(format!(
                "gradings {:?} vs {:?}",
                self.grading, other.grading
            )));
        }
        Ok(())
    }

    /// Drops everything outside a narrower window. Bounds only ever rise.
    pub fn raise_floor(&mut self, lower: &[Option<i64>]) {
        self.window.raise(lower);
        let (g, w) = (&self.grading, &self.window);
        self.coeffs.retain(|e, _| w.contains(&g.functionals(e)));
    }

    /// Truncates every grading functional at `-order`.
    pub fn truncate(&self, order: i64) -> MultiSeries {
        let mut out = self.clone();
        let k = out.window.floor.len();
        out.raise_floor(&vec![Some(-order); k]);
        out
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check_compatible(other)?;
        let mut out = MultiSeries {
            n: self.n,
            grading: self.grading.clone(),
            window: self.window.union(&other.window),
            coeffs: BTreeMap::new(),
        };
        let mut acc: HashMap<&Exponents, EpsLaurent> = HashMap::new();
        for (e, c) in self.coeffs.iter().chain(&other.coeffs) {
            if out.in_window(e) {
                *acc.entry(e).or_default() += c;
            }
        }
        out.coeffs = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e.clone(), c))
            .collect();
        Ok(out)
    }

    pub fn sub(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiSeries {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, c: &EpsLaurent) -> MultiSeries {
        self.map_coeffs(|v| v * c)
    }

    fn map_coeffs(&self, f: impl Fn(&EpsLaurent) -> EpsLaurent) -> MultiSeries {
        let mut out = MultiSeries {
            coeffs: BTreeMap::new(),
            ..self.clone_empty()
        };
        for (e, c) in &self.coeffs {
            let v = f(c);
            if !v.is_zero() {
                out.coeffs.insert(e.clone(), v);
            }
        }
        out
    }

    fn clone_empty(&self) -> MultiSeries {
        MultiSeries {
            n: self.n,
            grading: self.grading.clone(),
            window: self.window.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn mul(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.mul_within(other, None)
    }

    /// Product restricted to the monomials that can still reach `target`
    /// after multiplying by further factors whose combined structural tops
    /// are `rest_top`.
    pub fn mul_toward(&self, other: &MultiSeries, target: &[i64], rest_top: &[i64]) -> Result<MultiSeries> {
        let s = self.grading.functionals(target);
        let lower: Vec<Option<i64>> = s.iter().zip(rest_top).map(|(a, b)| Some(a - b)).collect();
        self.mul_within(other, Some(&lower))
    }

    fn mul_within(&self, other: &MultiSeries, lower: Option<&[Option<i64>]>) -> Result<MultiSeries> {
        self.check_compatible(other)?;
        let mut window = self.window.product(&other.window);
        if let Some(l) = lower {
            window.raise(l);
        }
        let g = &self.grading;
        let other_terms: Vec<(&Exponents, &EpsLaurent, Vec<i64>)> =
            other.coeffs.iter().map(|(e, c)| (e, c, g.functionals(e))).collect();
        let mut acc: HashMap<Exponents, EpsLaurent> = HashMap::new();
        let mut e = vec![0; self.n];
        for (ea, ca) in &self.coeffs {
            let sa = g.functionals(ea);
            for (eb, cb, sb) in &other_terms {
                let ok = window
                    .floor
                    .iter()
                    .enumerate()
                    .all(|(k, f)| f.is_none_or(|f| sa[k] + sb[k] >= f));
                if !ok {
                    continue;
                }
                for v in 0..self.n {
                    e[v] = ea[v] + eb[v];
                }
                match acc.get_mut(&e) {
                    Some(c) => c.add_product(ca, cb),
                    None => {
                        acc.insert(e.clone(), ca * cb);
                    }
                }
            }
        }
        Ok(MultiSeries {
            n: self.n,
            grading: self.grading.clone(),
            window,
            coeffs: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// Renames variable `v` to `perm[v]`. Region gradings follow the renaming.
    pub fn permute_vars(&self, perm: &[usize]) -> MultiSeries {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let mut f = vec![0; self.n];
            for v in 0..self.n {
                f[perm[v]] = e[v];
            }
            coeffs.insert(f, c.clone());
        }
        MultiSeries {
            n: self.n,
            grading: self.grading.permuted(perm),
            window: self.window.clone(),
            coeffs,
        }
    }

    fn swap_vars(&self, i: usize, j: usize) -> MultiSeries {
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.swap(i, j);
        self.permute_vars(&perm)
    }

    /// Checks `f(.., z_j, z_{j+1}, ..) = sign * f(.., z_{j+1}, z_j, ..)` for
    /// every adjacent pair, on the window.
    fn check_parity(&self, sign: i64) -> Result<()> {
        if self.grading != Grading::Total {
            return Err(Error::InvalidParameter(
                "symmetry checks need the total-degree grading".into(),
            ));
        }
        let s = EpsLaurent::constant(Rat::from_int(sign));
        for j in 0..self.n.saturating_sub(1) {
            let swapped = self.swap_vars(j, j + 1).scale(&s);
            if swapped.coeffs != self.coeffs {
                return Err(if sign == 1 {
                    Error::NotSymmetric(j, j + 1)
                } else {
                    Error::NotAntisymmetric(j, j + 1)
                });
            }
        }
        Ok(())
    }

    pub fn check_symmetric(&self) -> Result<()> {
        self.check_parity(1)
    }

    pub fn check_antisymmetric(&self) -> Result<()> {
        self.check_parity(-1)
    }

    /// Sets all variables equal: `f(z, z, ..., z)`. Needs the total grading,
    /// whose window passes directly to the univariate result.
    pub fn diagonal(&self) -> Result<ZSeries> {
        if self.grading != Grading::Total {
            return Err(Error::InvalidParameter(
                "diagonal restriction needs the total-degree grading".into(),
            ));
        }
        let order = match self.window.floor[0] {
            Some(f) => -f,
            None => i64::MAX / 4,
        };
        let mut out = ZSeries::zero(self.window.top[0], order);
        for (e, c) in &self.coeffs {
            out.add_term(e.iter().sum(), c);
        }
        Ok(out)
    }

    /// `prod_j res_{z_j = inf}` of `f * prod_j z_j^{shifts_j}`, each residue
    /// being minus the `z_j^{-1}` coefficient.
    pub fn iterated_residue(&self, shifts: &[i64]) -> Result<EpsLaurent> {
        let target: Exponents = shifts.iter().map(|s| -1 - s).collect();
        let c = self.coeff(&target)?;
        Ok(if self.n.is_multiple_of(2) { c } else { -c })
    }

    /// `log(f)` for `f = 1 + X` where `X` has total degree at most `-1`.
    pub fn log(&self) -> Result<MultiSeries> {
        if self.grading != Grading::Total {
            return Err(Error::InvalidParameter("log needs the total-degree grading".into()));
        }
        let zero = vec![0; self.n];
        if !self.coeff_unchecked(&zero).is_one() {
            return Err(Error::NonUnitConstant);
        }
        if let Some((e, _)) = self
            .coeffs
            .iter()
            .find(|(e, _)| *e != &zero && e.iter().sum::<i64>() >= 0)
        {
            return Err(Error::PositivePart { top: e.iter().sum() });
        }
        let mut x = self.sub(&MultiSeries::one(self.n, Grading::Total))?;
        x.window.top = vec![-1];
        let terms = match x.window.floor[0] {
            Some(f) => (-f).max(0),
            None => {
                return Err(Error::InvalidParameter("log of an untruncated series".into()));
            }
        };
        let mut out = MultiSeries::zero(self.n, Grading::Total);
        out.window = x.window.clone();
        out.window.top = vec![-1];
        let mut power = x.clone();
        for m in 1..=terms {
            let c = Rat::new(if m % 2 == 1 { 1 } else { -1 }, m);
            out = out.add(&power.scale(&EpsLaurent::constant(c)))?;
            power = power.mul(&x)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> SeriesJson {
        let order = self.window.floor.iter().flatten().map(|f| -f).min().unwrap_or(0);
        SeriesJson {
            vars: self.n,
            top: self.window.top.clone(),
            order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    val: c.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MultiSeries[{} vars, {:?}, {:?}] {{",
            self.n, self.grading, self.window
        )?;
        for (e, c) in &self.coeffs {
            write!(f, " {e:?}: {c};")?;
        }
        write!(f, " }}")
    }
}

/// Expansion of `1/(z_i - z_j)` in the region given by `region` (variables
/// from the largest modulus down), keeping terms whose grading functionals
/// stay at or above `-order`.
pub fn expand_inverse_difference(i: usize, j: usize, region: &[usize], order: i64) -> Result<MultiSeries> {
    if i == j {
        return Err(Error::SameIndex(i));
    }
    let n = region.len();
    let grading = Grading::Region(region.to_vec());
    grading.validate(n)?;
    if i >= n || j >= n {
        return Err(Error::VariableMismatch(format!("indices {i}, {j} for {n} variables")));
    }
    // 1/(z_i - z_j) = sum_m z_j^m / z_i^{m+1} when z_i dominates,
    // and minus the mirror otherwise.
    let (big, small, sign) = if grading.position(i) < grading.position(j) {
        (i, j, 1)
    } else {
        (j, i, -1)
    };
    let (pb, ps) = (grading.position(big), grading.position(small));
    let window = Window {
        floor: (0..n).map(|k| (pb <= k && k < ps).then_some(-order)).collect(),
        top: (0..n).map(|k| if k >= pb { -1 } else { 0 }).collect(),
    };
    let mut s = MultiSeries {
        n,
        grading,
        window,
        coeffs: BTreeMap::new(),
    };
    let c = EpsLaurent::constant(Rat::from_int(sign));
    for m in 0..order {
        let mut e = vec![0; n];
        e[big] = -m - 1;
        e[small] = m;
        s.add_term(e, &c);
    }
    Ok(s)
}

/// The Vandermonde product `prod_{a<b} (z_b - z_a)`.
pub fn vandermonde(n: usize, grading: Grading) -> MultiSeries {
    let mut v = MultiSeries::one(n, grading.clone());
    for b in 0..n {
        for a in 0..b {
            let mut eb = vec![0; n];
            eb[b] = 1;
            let mut ea = vec![0; n];
            ea[a] = 1;
            let f = MultiSeries::polynomial(n, grading.clone(), [(eb, EpsLaurent::one()), (ea, -EpsLaurent::one())]);
            v = v.mul(&f).expect("same grading");
        }
    }
    v
}

/// Exact division by `z_b - z_a`, processing monomials from the highest
/// power of `z_b` down. The remainder must vanish. Each homogeneous
/// component divides on its own, so the window just moves down by one.
pub fn divide_by_difference(num: &MultiSeries, a: usize, b: usize) -> Result<MultiSeries> {
    if num.grading != Grading::Total {
        return Err(Error::InvalidParameter(
            "division by z_b - z_a needs the total-degree grading".into(),
        ));
    }
    let mut levels: BTreeMap<i64, HashMap<Exponents, EpsLaurent>> = BTreeMap::new();
    for (e, c) in &num.coeffs {
        levels.entry(e[b]).or_default().insert(e.clone(), c.clone());
    }
    let mut quotient = MultiSeries {
        coeffs: BTreeMap::new(),
        ..num.clone_empty()
    };
    quotient.window.top[0] -= 1;
    for f in quotient.window.floor.iter_mut().flatten() {
        *f -= 1;
    }
    let Some(&emin) = levels.keys().next() else {
        return Ok(quotient);
    };
    while let Some((&level, _)) = levels.iter().next_back() {
        if level <= emin {
            break;
        }
        let group = levels.remove(&level).unwrap_or_default();
        for (e, c) in group {
            if c.is_zero() {
                continue;
            }
            let mut q = e.clone();
            q[b] -= 1;
            let mut carry = q.clone();
            carry[a] += 1;
            let slot = levels.entry(level - 1).or_default();
            let entry = slot.entry(carry).or_default();
            *entry += &c;
            quotient.coeffs.insert(q, c);
        }
    }
    if levels.values().flat_map(|g| g.values()).any(|c| !c.is_zero()) {
        return Err(Error::NonzeroRemainder { a, b });
    }
    Ok(quotient)
}

/// `num / prod_{a<b}(z_b - z_a)` for an antisymmetric `num`.
pub fn antisym_divide_vandermonde(num: &MultiSeries, n: usize) -> Result<MultiSeries> {
    if num.n != n {
        return Err(Error::VariableMismatch(format!("{} variables, expected {n}", num.n)));
    }
    num.check_antisymmetric()?;
    let mut q = num.clone();
    for b in 0..n {
        for a in 0..b {
            q = divide_by_difference(&q, a, b)?;
        }
    }
    q.check_symmetric()?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(p: i64) -> EpsLaurent {
        EpsLaurent::constant(Rat::from_int(p))
    }

    #[test]
    fn inverse_difference_dominant_first() {
        let s = expand_inverse_difference(0, 1, &[0, 1], 3).unwrap();
        let expect = MultiSeries::polynomial(
            2,
            Grading::standard_region(2),
            [(vec![-1, 0], c(1)), (vec![-2, 1], c(1)), (vec![-3, 2], c(1))],
        );
        assert_eq!(s.coeffs, expect.coeffs);
    }

    #[test]
    fn inverse_difference_mirror() {
        let s = expand_inverse_difference(0, 1, &[1, 0], 3).unwrap();
        assert_eq!(s.coeff(&[0, -1]).unwrap(), c(-1));
        assert_eq!(s.coeff(&[1, -2]).unwrap(), c(-1));
        assert_eq!(
            expand_inverse_difference(1, 1, &[0, 1], 3).unwrap_err(),
            Error::SameIndex(1)
        );
    }

    #[test]
    fn inverse_difference_times_difference() {
        for region in [[0usize, 1], [1, 0]] {
            let inv = expand_inverse_difference(0, 1, &region, 6).unwrap();
            let g = Grading::Region(region.to_vec());
            let diff = MultiSeries::polynomial(2, g.clone(), [(vec![1, 0], c(1)), (vec![0, 1], c(-1))]);
            let p = inv.mul(&diff).unwrap();
            assert_eq!(p.coeffs, MultiSeries::one(2, g).coeffs);
        }
    }

    #[test]
    fn vandermonde_division() {
        let g = Grading::Total;
        let num = MultiSeries::polynomial(2, g.clone(), [(vec![0, 1], c(1)), (vec![1, 0], c(-1))]);
        let q = antisym_divide_vandermonde(&num, 2).unwrap();
        assert_eq!(q.coeffs, MultiSeries::one(2, g.clone()).coeffs);

        let num = MultiSeries::polynomial(2, g.clone(), [(vec![0, 2], c(1)), (vec![2, 0], c(-1))]);
        let q = antisym_divide_vandermonde(&num, 2).unwrap();
        let expect = MultiSeries::polynomial(2, g.clone(), [(vec![1, 0], c(1)), (vec![0, 1], c(1))]);
        assert_eq!(q.coeffs, expect.coeffs);

        let sym = MultiSeries::polynomial(2, g, [(vec![0, 2], c(1)), (vec![2, 0], c(1))]);
        assert_eq!(
            antisym_divide_vandermonde(&sym, 2).unwrap_err(),
            Error::NotAntisymmetric(0, 1)
        );
    }

    #[test]
    fn nonzero_remainder_is_reported() {
        // z_2^2 + z_1 leaves the remainder z_1^2 + z_1.
        let g = Grading::Total;
        let num = MultiSeries::polynomial(2, g, [(vec![0, 2], c(1)), (vec![1, 0], c(1))]);
        assert_eq!(
            divide_by_difference(&num, 0, 1).unwrap_err(),
            Error::NonzeroRemainder { a: 0, b: 1 }
        );
    }

    #[test]
    fn log_of_exponential_pieces() {
        // log(1 + x) with x = 1/z_1 + 1/z_2, checked against -x^2/2 at degree 2.
        let g = Grading::Total;
        let one_plus = MultiSeries::polynomial(
            2,
            g.clone(),
            [(vec![0, 0], c(1)), (vec![-1, 0], c(1)), (vec![0, -1], c(1))],
        )
        .truncate(3);
        let l = one_plus.log().unwrap();
        assert_eq!(l.coeff(&[-1, 0]).unwrap(), c(1));
        assert_eq!(l.coeff(&[-1, -1]).unwrap(), c(-1));
        assert_eq!(l.coeff(&[-2, 0]).unwrap(), EpsLaurent::constant(Rat::new(-1, 2)));
        assert_eq!(l.coeff(&[-2, -1]).unwrap(), c(1));
        assert!(l.coeff(&[-2, -2]).is_err());
    }

    #[test]
    fn diagonal_restriction() {
        let g = Grading::Total;
        let s = MultiSeries::polynomial(2, g, [(vec![1, -1], c(1)), (vec![-1, 1], c(-1)), (vec![0, 0], c(2))]);
        let d = s.diagonal().unwrap();
        assert_eq!(d.coeff(0).unwrap(), c(2));
        assert_eq!(d.terms().count(), 1);
    }

    fn arb_symmetric(n: usize) -> impl Strategy<Value = MultiSeries> {
        prop::collection::vec((prop::collection::vec(-3i64..3, n), -5i64..6), 0..5).prop_map(move |raw| {
            let mut s = MultiSeries::zero(n, Grading::Total);
            for (e, v) in raw {
                // symmetrize by summing over all permutations of the exponent vector
                for p in permutations(n) {
                    let f: Vec<i64> = p.iter().map(|&i| e[i]).collect();
                    let term = MultiSeries::polynomial(n, Grading::Total, [(f, c(v))]);
                    s = s.add(&term).unwrap();
                }
            }
            s
        })
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn vandermonde_round_trip(q in arb_symmetric(3)) {
            let num = q.mul(&vandermonde(3, Grading::Total)).unwrap();
            let back = antisym_divide_vandermonde(&num, 3).unwrap();
            prop_assert_eq!(&back.coeffs, &q.coeffs);
        }

        #[test]
        fn inverse_difference_antisymmetry(order in 1i64..8, i in 0usize..3, j in 0usize..3) {
            prop_assume!(i != j);
            let region = [0usize, 1, 2];
            let fij = expand_inverse_difference(i, j, &region, order).unwrap();
            let fji = expand_inverse_difference(j, i, &region, order).unwrap();
            prop_assert_eq!(&fji.coeffs, &fij.neg().coeffs);

            // Swapping the pair in the region and relabelling i <-> j gives f_ij back.
            let mut swapped = region.to_vec();
            swapped.swap(i, j);
            let mirrored = expand_inverse_difference(j, i, &swapped, order).unwrap();
            let mut perm: Vec<usize> = (0..3).collect();
            perm.swap(i, j);
            let relabelled = mirrored.permute_vars(&perm);
            prop_assert_eq!(relabelled.grading(), fij.grading());
            prop_assert_eq!(&relabelled.coeffs, &fij.coeffs);
        }
    }
}
