//! Arbitrary precision numerics: Gamma and Bessel J, the functions `f` and
//! `g` behind the wave expansions, Charlier polynomials and their ensemble.

use serde::Serialize;

use crate::arith::{BigFloat, Rat};
use crate::error::{Error, Result};
use crate::perm::{permutations, sign};
use crate::wave::{solve_formal_wave, Sigma};

/// `Gamma(x)` rounded to `prec` bits.
pub fn gamma_real(x: &BigFloat, prec: u32) -> Result<BigFloat> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite argument {x}")));
    }
    if !(x > &BigFloat::zero(prec)) && x.floor() == *x {
        return Err(Error::PoleInput(x.to_string_digits(10)));
    }
    Ok(x.with_prec(prec).gamma())
}

/// `J_nu(x) = sum_m (-1)^m (x/2)^{nu+2m} / (m! Gamma(nu+m+1))` for `x > 0`.
///
/// The series is summed at raised precision until the next term, which
/// bounds the alternating tail once the term ratio is below 1/2, is under
/// the target precision. The guard is raised if cancellation eats it.
pub fn bessel_j(nu: &BigFloat, x: &BigFloat, prec: u32) -> Result<BigFloat> {
    if !(x > &BigFloat::zero(prec)) {
        return Err(Error::InvalidParameter(format!(
            "Bessel argument must be positive, got {x}"
        )));
    }
    let nu_neg_int = nu.is_sign_negative() && nu.floor() == *nu;
    if nu_neg_int {
        // J_{-n} = (-1)^n J_n
        let n = -nu;
        let j = bessel_j(&n, x, prec)?;
        let odd = n.to_f64() % 2.0 != 0.0;
        return Ok(if odd { -j } else { j });
    }
    let mut guard = 32u32;
    for _ in 0..6 {
        let wp = prec + guard;
        let (sum, cancel) = bessel_series(&nu.with_prec(wp), &x.with_prec(wp), wp)?;
        if cancel + 16.0 < guard as f64 {
            let lead = (x.with_prec(wp) / BigFloat::from_int(2, wp)).pow(&nu.with_prec(wp));
            return Ok((sum * lead).with_prec(prec));
        }
        guard = cancel.ceil() as u32 + 48;
    }
    Err(Error::TailBound(format!(
        "cancellation in J_{nu}({x}) exceeds the guard bits"
    )))
}

/// `sum_m (-1)^m (x/2)^{2m} / (m! Gamma(nu+m+1))` and the number of bits
/// lost to cancellation.
fn bessel_series(nu: &BigFloat, x: &BigFloat, wp: u32) -> Result<(BigFloat, f64)> {
    let one = BigFloat::one(wp);
    let h2 = {
        let h = x / &BigFloat::from_int(2, wp);
        &h * &h
    };
    let arg = nu + &one;
    let mut rg = if !(arg > BigFloat::zero(wp)) && arg.floor() == arg {
        BigFloat::zero(wp)
    } else {
        BigFloat::one(wp) / arg.gamma()
    };
    let mut term = rg.clone();
    let mut sum = term.clone();
    let mut max_log = term.log2_abs();
    let mut m = 0i64;
    loop {
        let mf = BigFloat::from_int(m, wp);
        let denom = &(&mf + &one) * &(nu + &(&mf + &one));
        let next = if denom.is_zero() {
            // only when 1/Gamma(nu+m+1) is already zero, so the recurrence restarts
            rg = BigFloat::one(wp) / (nu + &BigFloat::from_int(m + 2, wp)).gamma();
            let fact = BigFloat::from_int(m + 1, wp).gamma();
            let sign = if (m + 1) % 2 == 0 { one.clone() } else { -one.clone() };
            sign * h2.powi(m as i32 + 1) * rg.clone() / fact
        } else {
            -(&(&term * &h2) / &denom)
        };
        let ratio_small = denom > BigFloat::zero(wp) && (&h2 / &denom) < BigFloat::from_f64(0.5, wp);
        if ratio_small && next.log2_abs() < sum.log2_abs() - wp as f64 {
            break;
        }
        m += 1;
        if m > 1_000_000 {
            return Err(Error::TailBound("Bessel series did not converge".into()));
        }
        term = next;
        max_log = max_log.max(term.log2_abs());
        sum = &sum + &term;
    }
    let cancel = if sum.is_zero() {
        f64::INFINITY
    } else {
        (max_log - sum.log2_abs()).max(0.0)
    };
    Ok((sum, cancel))
}

fn check_order(z: &BigFloat) -> Result<()> {
    let nu = z + &BigFloat::from_f64(0.5, z.prec());
    if nu.near_integer(1e-8).is_some() {
        return Err(Error::NearIntegerOrder(z.to_string_digits(12)));
    }
    Ok(())
}

/// `(f(z), g(z))` with `g(z) = sqrt(2 pi/eps) J_{z+1/2}(2/eps)` and
/// `f(z) = sqrt(pi/(2 eps)) J_{-z-1/2}(2/eps) / cos(pi z)`.
///
/// This `f` differs from the real part of the Hankel-function solution by a
/// 1-periodic multiple of `g`, so it solves the same difference equation,
/// has the same Wronskian with `g` and the same expansion for large `z`.
pub fn numeric_f_g(z: &BigFloat, eps: &BigFloat, prec: u32) -> Result<(BigFloat, BigFloat)> {
    check_order(z)?;
    if !(eps > &BigFloat::zero(prec)) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let wp = prec + 32;
    let z = z.with_prec(wp);
    let eps = eps.with_prec(wp);
    let pi = BigFloat::pi(wp);
    let x = BigFloat::from_int(2, wp) / eps.clone();
    let nu = &z + &BigFloat::from_f64(0.5, wp);
    let g = (&(&pi * &BigFloat::from_int(2, wp)) / &eps).sqrt() * bessel_j(&nu, &x, wp)?;
    let f = (&pi / &(&eps * &BigFloat::from_int(2, wp))).sqrt() * bessel_j(&-nu, &x, wp)? / (&pi * &z).cos();
    Ok((f.with_prec(prec), g.with_prec(prec)))
}

/// Relative residuals of `h(z+1) + h(z-1) - eps (z+1/2) h(z)` for `h = f, g`,
/// each scaled by the largest of the three terms.
pub fn difference_residuals(z: &BigFloat, eps: &BigFloat, prec: u32) -> Result<(BigFloat, BigFloat)> {
    let one = BigFloat::one(prec);
    let (fp, gp) = numeric_f_g(&(z + &one), eps, prec)?;
    let (f0, g0) = numeric_f_g(z, eps, prec)?;
    let (fm, gm) = numeric_f_g(&(z - &one), eps, prec)?;
    let coef = eps * &(z + &BigFloat::from_f64(0.5, prec));
    let rel = |p: BigFloat, c: BigFloat, m: BigFloat| {
        let mid = &coef * &c;
        let scale = p.abs().max(m.abs()).max(mid.abs());
        ((&(&p + &m) - &mid).abs()) / scale
    };
    Ok((rel(fp, f0, fm), rel(gp, g0, gm)))
}

/// `f(z) g(z-1) - f(z-1) g(z)`.
pub fn numeric_wronskian(z: &BigFloat, eps: &BigFloat, prec: u32) -> Result<BigFloat> {
    let (f0, g0) = numeric_f_g(z, eps, prec)?;
    let (fm, gm) = numeric_f_g(&(z - &BigFloat::one(prec)), eps, prec)?;
    Ok(&(&f0 * &gm) - &(&fm * &g0))
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub z: BigFloat,
    pub eps: BigFloat,
    pub order: i64,
    pub numeric: BigFloat,
    pub formal: BigFloat,
    pub rel_error: BigFloat,
    pub rel_error_doubled_z: BigFloat,
    /// `rel_error / rel_error_doubled_z`, ideally near `2^{order+1}`.
    pub ratio: BigFloat,
}

fn normalized_f(z: &BigFloat, eps: &BigFloat, prec: u32) -> Result<BigFloat> {
    let (f, _) = numeric_f_g(z, eps, prec)?;
    // (eps z / e)^{-z}
    let pre = (-(z * &(&(eps * z).ln() - &BigFloat::one(prec)))).exp();
    Ok(f * pre)
}

/// Compares `(eps z/e)^{-z} f(z)` with the formal series truncated at `z^{-M}`,
/// at `z` and at `2z`.
pub fn asymptotic_match_check(z: &BigFloat, eps: &BigFloat, order: i64, prec: u32) -> Result<AsymptoticReport> {
    let a = solve_formal_wave(Sigma::Plus, order)?.h;
    let err_at = |z: &BigFloat| -> Result<(BigFloat, BigFloat, BigFloat)> {
        let numeric = normalized_f(z, eps, prec)?;
        let formal = a.eval(&z.with_prec(prec), &eps.with_prec(prec))?;
        let rel = (&numeric - &formal).abs() / numeric.abs();
        Ok((numeric, formal, rel))
    };
    let (numeric, formal, rel_error) = err_at(z)?;
    let (_, _, rel_error_doubled_z) = err_at(&(z * &BigFloat::from_int(2, prec)))?;
    let ratio = &rel_error / &rel_error_doubled_z;
    Ok(AsymptoticReport {
        z: z.clone(),
        eps: eps.clone(),
        order,
        numeric,
        formal,
        rel_error,
        rel_error_doubled_z,
        ratio,
    })
}

/// Monic Charlier polynomial for the Poisson weight on `n + 1/2`,
/// `pi_l(x; a) = (-a)^l 2F0(-l, 1/2 - x; ; -1/a)`. `coeffs[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharlierPolynomial {
    pub degree: usize,
    pub a: Rat,
    pub coeffs: Vec<Rat>,
}

impl CharlierPolynomial {
    pub fn eval_rat(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval(&self, x: &BigFloat) -> BigFloat {
        let prec = x.prec();
        self.coeffs.iter().rev().fold(BigFloat::zero(prec), |acc, c| {
            &(&acc * x) + &BigFloat::from_rat(c, prec)
        })
    }
}

fn check_a(a: &Rat) -> Result<()> {
    if a.is_negative() || a.is_zero() {
        return Err(Error::InvalidParameter(format!(
            "Charlier parameter must be positive, got {a}"
        )));
    }
    Ok(())
}

pub fn charlier_poly(l: usize, a: &Rat) -> Result<CharlierPolynomial> {
    check_a(a)?;
    // (-a)^l sum_i (-l)_i (1/2-x)_i / i! (-1/a)^i = (-1)^l sum_i C(l,i) (1/2-x)_i a^{l-i}
    let mut coeffs = vec![Rat::zero(); l + 1];
    let mut poch = vec![Rat::one()];
    for i in 0..=l {
        let w = Rat::binomial(l as i64, i as u32) * a.pow((l - i) as u32);
        for (k, c) in poch.iter().enumerate() {
            coeffs[k] += &(c.clone() * &w);
        }
        // multiply by (1/2 + i - x)
        let shift = Rat::new(1, 2) + Rat::from_int(i as i64);
        let mut next = vec![Rat::zero(); poch.len() + 1];
        for (k, c) in poch.iter().enumerate() {
            next[k] += &(c.clone() * &shift);
            next[k + 1] -= c;
        }
        poch = next;
    }
    if l % 2 == 1 {
        for c in &mut coeffs {
            *c = -c.clone();
        }
    }
    Ok(CharlierPolynomial {
        degree: l,
        a: a.clone(),
        coeffs,
    })
}

/// `pi_l(x; a)` from the hypergeometric sum directly, without expanding in `x`.
pub fn charlier_value(l: usize, x: &Rat, a: &Rat) -> Result<Rat> {
    check_a(a)?;
    let base = Rat::new(1, 2) - x;
    let mut poch = Rat::one();
    let mut acc = Rat::zero();
    for i in 0..=l {
        acc += &(Rat::binomial(l as i64, i as u32) * &poch * a.pow((l - i) as u32));
        poch *= &(base.clone() + Rat::from_int(i as i64));
    }
    Ok(if l % 2 == 1 { -acc } else { acc })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub l: usize,
    pub lp: usize,
    pub a: Rat,
    pub value: BigFloat,
    pub target: BigFloat,
    pub abs_error: BigFloat,
    pub tail_bound: BigFloat,
    pub terms: usize,
    pub passed: bool,
}

/// `sum_{n >= 0} pi_l(n+1/2) pi_l'(n+1/2) e^{-a} a^n / n!` against `a^l l! delta`.
///
/// The truncated sum is exact up to the factor `e^{-a}`. With `S` the sum of
/// absolute coefficients of the product polynomial `P` of degree `d`, the
/// terms from `N` on are bounded by `h(n) = S x_n^d a^n / n!`, whose ratio is
/// at most `r = (1 + 1/x_N)^d a/(N+1)`, so the tail is below `h(N)/(1-r)`.
pub fn charlier_orthogonality_check(
    l: usize,
    lp: usize,
    a: &Rat,
    tol: &BigFloat,
    prec: u32,
) -> Result<OrthogonalityReport> {
    if !(tol > &BigFloat::zero(prec)) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if tol.log2_abs() < 8.0 - prec as f64 {
        return Err(Error::TailBound(format!(
            "tolerance {tol} is below {prec}-bit precision"
        )));
    }
    let p = charlier_poly(l, a)?;
    let q = charlier_poly(lp, a)?;
    let d = (l + lp) as i32;
    let s: Rat = p.coeffs.iter().map(|c| c.abs()).sum::<Rat>() * q.coeffs.iter().map(|c| c.abs()).sum::<Rat>();
    let af = BigFloat::from_rat(a, prec);
    let sf = BigFloat::from_rat(&s, prec);
    let mut partial = Rat::zero();
    let mut weight = Rat::one();
    let mut n = 0usize;
    let tail = loop {
        let x = Rat::new(2 * n as i64 + 1, 2);
        let xf = BigFloat::from_rat(&x, prec);
        let r = (&BigFloat::one(prec) + &(BigFloat::one(prec) / xf.clone())).powi(d) * af.clone()
            / BigFloat::from_int(n as i64 + 1, prec);
        if r < BigFloat::from_f64(0.5, prec) {
            let h = &(&sf * &xf.powi(d)) * &BigFloat::from_rat(&weight, prec);
            let bound = h / (BigFloat::one(prec) - r);
            if bound < tol / &BigFloat::from_int(4, prec) {
                break bound;
            }
        }
        if n > 100_000 {
            return Err(Error::TailBound(format!(
                "orthogonality sum for a = {a} needs too many terms"
            )));
        }
        partial += &(p.eval_rat(&x) * q.eval_rat(&x) * &weight);
        weight = weight * a / Rat::from_int(n as i64 + 1);
        n += 1;
    };
    let value = BigFloat::from_rat(&partial, prec) * (-af).exp();
    let target = if l == lp {
        BigFloat::from_rat(&(a.pow(l as u32) * Rat::factorial(l as u32)), prec)
    } else {
        BigFloat::zero(prec)
    };
    let abs_error = (&value - &target).abs();
    let passed = &abs_error + &tail <= *tol;
    Ok(OrthogonalityReport {
        l,
        lp,
        a: a.clone(),
        value,
        target,
        abs_error,
        tail_bound: tail,
        terms: n,
        passed,
    })
}

fn vandermonde_value(xs: &[BigFloat]) -> Result<BigFloat> {
    let prec = xs.iter().map(|x| x.prec()).max().unwrap_or(64);
    let mut v = BigFloat::one(prec);
    for k in 0..xs.len() {
        for j in 0..k {
            let d = &xs[k] - &xs[j];
            if d.is_zero() {
                return Err(Error::InvalidParameter(format!("coincident points u_{j} = u_{k}")));
            }
            v = v * d;
        }
    }
    Ok(v)
}

/// `<prod_j det(u_j - M)>_{L,a} = det(pi_{L+k-1}(u_j)) / Delta(u)`.
pub fn char_poly_expectation(l_size: usize, a: &Rat, us: &[BigFloat]) -> Result<BigFloat> {
    if l_size == 0 || us.is_empty() {
        return Err(Error::InvalidParameter("need L >= 1 and at least one point".into()));
    }
    let n = us.len();
    let delta = vandermonde_value(us)?;
    let polys: Vec<CharlierPolynomial> = (0..n).map(|k| charlier_poly(l_size + k, a)).collect::<Result<_>>()?;
    let m: Vec<Vec<BigFloat>> = us.iter().map(|u| polys.iter().map(|p| p.eval(u)).collect()).collect();
    let prec = delta.prec();
    let mut det = BigFloat::zero(prec);
    for p in permutations(n) {
        let mut t = BigFloat::one(prec);
        for (j, &k) in p.iter().enumerate() {
            t = t * m[j][k].clone();
        }
        det = if sign(&p) < 0 { det - t } else { det + t };
    }
    Ok(det / delta)
}

#[derive(Clone, Debug, Serialize)]
pub struct BruteForce {
    pub value: BigFloat,
    pub tail_bound: BigFloat,
}

/// Direct sum of `prod_{i,j} (u_j - x_i) Delta(x)^2 prod w(n_i)` over atoms
/// `x_i = n_i + 1/2` with `n_i < n_max`, divided by the same sum without the
/// characteristic polynomials. Cost is `n_max^L`.
///
/// Tail bound: for `x >= 1/2`, `x_i + x_j <= 4 x_i x_j`, so each summand is at
/// most `16^{L(L-1)/2} prod_i h(n_i)` with `h(n) = (U + x)^N x^{2(L-1)} a^n/n!`,
/// `U = max |u_j|`. The tuples with some `n_i >= n_max` then contribute at most
/// `C L H_tail H^{L-1}`, and likewise for the normalization.
pub fn brute_force_expectation(l_size: usize, a: &Rat, us: &[BigFloat], n_max: usize) -> Result<BruteForce> {
    check_a(a)?;
    if l_size == 0 || us.is_empty() || n_max == 0 {
        return Err(Error::InvalidParameter(
            "need L >= 1, n_max >= 1 and at least one point".into(),
        ));
    }
    let prec = us.iter().map(|u| u.prec()).max().unwrap_or(64);
    let weights: Vec<Rat> = {
        let mut w = vec![Rat::one()];
        for n in 1..n_max {
            let prev = w[n - 1].clone();
            w.push(prev * a / Rat::from_int(n as i64));
        }
        w
    };
    let atoms: Vec<Rat> = (0..n_max).map(|n| Rat::new(2 * n as i64 + 1, 2)).collect();
    let atoms_f: Vec<BigFloat> = atoms.iter().map(|x| BigFloat::from_rat(x, prec)).collect();

    let mut num = BigFloat::zero(prec);
    let mut z = Rat::zero();
    let mut idx = vec![0usize; l_size];
    loop {
        let mut w = Rat::one();
        for &i in &idx {
            w *= &weights[i];
        }
        for b in 0..l_size {
            for c in 0..b {
                let d = atoms[idx[b]].clone() - &atoms[idx[c]];
                w *= &(d.clone() * &d);
            }
        }
        if !w.is_zero() {
            z += &w;
            let mut t = BigFloat::from_rat(&w, prec);
            for &i in &idx {
                for u in us {
                    t = t * (u - &atoms_f[i]);
                }
            }
            num = num + t;
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == l_size {
                let zf = BigFloat::from_rat(&z, prec);
                let value = &num / &zf;
                let tail_bound = brute_force_tail(l_size, a, us, n_max, &num, &zf, prec)?;
                return Ok(BruteForce { value, tail_bound });
            }
            idx[pos] += 1;
            if idx[pos] < n_max {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn brute_force_tail(
    l_size: usize,
    a: &Rat,
    us: &[BigFloat],
    n_max: usize,
    num: &BigFloat,
    z: &BigFloat,
    prec: u32,
) -> Result<BigFloat> {
    let one = BigFloat::one(prec);
    let u_max = us.iter().map(|u| u.abs()).fold(BigFloat::zero(prec), BigFloat::max);
    let n = us.len() as i32;
    let dv = 2 * (l_size as i32 - 1);
    let af = BigFloat::from_rat(a, prec);
    // (head, tail) of sum_n h(n) for h(n) = (U + x)^p x^dv a^n / n!
    let sums = |p: i32| -> Result<(BigFloat, BigFloat)> {
        let mut head = BigFloat::zero(prec);
        let mut w = BigFloat::one(prec);
        for k in 0..n_max {
            let x = BigFloat::from_f64(k as f64 + 0.5, prec);
            head = head + (&u_max + &x).powi(p) * x.powi(dv) * w.clone();
            w = w * af.clone() / BigFloat::from_int(k as i64 + 1, prec);
        }
        let x = BigFloat::from_f64(n_max as f64 + 0.5, prec);
        let h = (&u_max + &x).powi(p) * x.powi(dv) * w;
        let r =
            (&one + &(one.clone() / (&u_max + &x))).powi(p) * (&one + &(one.clone() / x.clone())).powi(dv) * af.clone()
                / BigFloat::from_int(n_max as i64 + 1, prec);
        if !(r < one) {
            return Err(Error::TailBound(format!(
                "n_max = {n_max} is too small for a geometric tail bound"
            )));
        }
        Ok((head, h / (&one - &r)))
    };
    let c =
        BigFloat::from_int(16, prec).powi((l_size * (l_size - 1) / 2) as i32) * BigFloat::from_int(l_size as i64, prec);
    let bound =
        |(head, tail): (BigFloat, BigFloat)| -> BigFloat { &c * &(&tail * &(&head + &tail).powi(l_size as i32 - 1)) };
    let b_num = bound(sums(n)?);
    let b_z = bound(sums(0)?);
    if !(&b_z < z) {
        return Err(Error::TailBound(format!(
            "normalization tail exceeds the truncated sum at n_max = {n_max}"
        )));
    }
    let value = num / z;
    Ok((b_num + value.abs() * b_z.clone()) / (z - &b_z))
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub l_size: u64,
    pub value: BigFloat,
    pub target: BigFloat,
    pub abs_error: BigFloat,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingLimitReport {
    pub zeta: Rat,
    pub ell: i64,
    pub eps: Rat,
    pub target: BigFloat,
    pub rows: Vec<LimitRow>,
    pub monotone: bool,
    /// Fitted `p` in `error ~ L^{-p}` from the last two rows.
    pub observed_rate: Option<f64>,
}

/// `pi_{L+l}(L + zeta; 1/(L eps^2)) / Gamma(L + zeta + 1/2)` against
/// `eps^{zeta-l-1/2} J_{zeta-l-1/2}(2/eps)`. The polynomial is evaluated
/// exactly, so only the Gamma value and the target are rounded.
pub fn charlier_scaling_limit_check(
    zeta: &Rat,
    ell: i64,
    eps: &Rat,
    ls: &[u64],
    prec: u32,
) -> Result<ScalingLimitReport> {
    check_a(eps)?;
    if let Some(l) = ls.iter().find(|&&l| (l as i64) < ell + 1) {
        return Err(Error::InvalidParameter(format!("L = {l} is below l + 1 = {}", ell + 1)));
    }
    let epsf = BigFloat::from_rat(eps, prec);
    let nu = BigFloat::from_rat(&(zeta.clone() - Rat::from_int(ell) - Rat::new(1, 2)), prec);
    let x = BigFloat::from_int(2, prec) / epsf.clone();
    let target = epsf.pow(&nu) * bessel_j(&nu, &x, prec)?;
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        let lr = Rat::from_int(l as i64);
        let a = (lr.clone() * eps * eps).recip()?;
        let p = charlier_value((l as i64 + ell) as usize, &(lr.clone() + zeta), &a)?;
        let g = gamma_real(&BigFloat::from_rat(&(lr + zeta + Rat::new(1, 2)), prec), prec)?;
        let value = BigFloat::from_rat(&p, prec) / g;
        let abs_error = (&value - &target).abs();
        rows.push(LimitRow {
            l_size: l,
            value,
            target: target.clone(),
            abs_error,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].abs_error < w[0].abs_error);
    let observed_rate = match rows.as_slice() {
        [.., p, q] if !p.abs_error.is_zero() && !q.abs_error.is_zero() => {
            let de = q.abs_error.log2_abs() - p.abs_error.log2_abs();
            let dl = (q.l_size as f64).log2() - (p.l_size as f64).log2();
            Some(-de / dl)
        }
        _ => None,
    };
    Ok(ScalingLimitReport {
        zeta: zeta.clone(),
        ell,
        eps: eps.clone(),
        target,
        rows,
        monotone,
        observed_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn bf(x: f64) -> BigFloat {
        BigFloat::from_f64(x, P)
    }

    fn close(a: &BigFloat, b: &BigFloat, tol: f64) -> bool {
        a.approx_eq(b, tol)
    }

    #[test]
    fn gamma_values() {
        assert!(close(&gamma_real(&bf(1.0), P).unwrap(), &bf(1.0), 1e-35));
        let sqrt_pi = BigFloat::pi(P).sqrt();
        assert!(close(&gamma_real(&bf(0.5), P).unwrap(), &sqrt_pi, 1e-35));
        assert!(close(&gamma_real(&bf(2.5), P).unwrap(), &(sqrt_pi * bf(0.75)), 1e-35));
        assert!(matches!(gamma_real(&bf(-3.0), P), Err(Error::PoleInput(_))));
        assert!(matches!(gamma_real(&bf(0.0), P), Err(Error::PoleInput(_))));
    }

    #[test]
    fn bessel_half_integer_orders() {
        let x = bf(2.0);
        let pi = BigFloat::pi(P);
        let j_half = bessel_j(&bf(0.5), &x, P).unwrap();
        let closed = (bf(2.0) / (&pi * &x)).sqrt() * x.sin();
        assert!(close(&j_half, &closed, 1e-35));
        let j_mhalf = bessel_j(&bf(-0.5), &x, P).unwrap();
        let closed = (BigFloat::one(P) / pi).sqrt() * x.cos();
        assert!(close(&j_mhalf, &closed, 1e-35));
    }

    #[test]
    fn bessel_small_argument_and_integer_order() {
        let x = bf(1e-6);
        let nu = bf(1.5);
        let j = bessel_j(&nu, &x, P).unwrap();
        let lead = (&x / &bf(2.0)).pow(&nu) / gamma_real(&bf(2.5), P).unwrap();
        assert!(((&j - &lead) / lead).abs() < bf(1e-12));
        let jm = bessel_j(&bf(-1.0), &bf(3.0), P).unwrap();
        let jp = bessel_j(&bf(1.0), &bf(3.0), P).unwrap();
        assert!(close(&jm, &-jp, 1e-35));
    }

    #[test]
    fn difference_equation_and_wronskian() {
        for &e in &[0.5, 1.0, 2.0] {
            for &z in &[5.25, 10.25, 20.25] {
                let (rf, rg) = difference_residuals(&bf(z), &bf(e), P).unwrap();
                assert!(rf < bf(2f64.powi(-64)), "f residual {rf} at z={z} eps={e}");
                assert!(rg < bf(2f64.powi(-64)), "g residual {rg} at z={z} eps={e}");
            }
        }
        let w = numeric_wronskian(&bf(7.25), &bf(1.0), P).unwrap();
        assert!(close(&w, &bf(1.0), 1e-30), "{w}");
        assert!(matches!(
            numeric_f_g(&bf(0.5), &bf(1.0), P),
            Err(Error::NearIntegerOrder(_))
        ));
    }

    #[test]
    fn asymptotics_decay() {
        let r = asymptotic_match_check(&bf(20.0), &bf(1.0), 3, P).unwrap();
        assert!(r.rel_error < bf(1e-4), "{:?}", r);
        assert!(r.ratio > bf(8.0) && r.ratio < bf(32.0), "{:?}", r);
        let r0 = asymptotic_match_check(&bf(20.0), &bf(1.0), 0, P).unwrap();
        let first = bf(23.0 / 24.0 / 20.0);
        assert!(((&r0.rel_error - &first) / first).abs() < bf(0.1), "{:?}", r0);
    }

    #[test]
    fn charlier_low_degree() {
        let a = Rat::one();
        assert_eq!(charlier_poly(0, &a).unwrap().coeffs, vec![Rat::one()]);
        assert_eq!(charlier_poly(1, &a).unwrap().coeffs, vec![Rat::new(-3, 2), Rat::one()]);
        assert!(charlier_poly(2, &Rat::zero()).is_err());
        assert!(charlier_poly(2, &Rat::new(-1, 2)).is_err());
    }

    #[test]
    fn charlier_three_term_recurrence() {
        // x pi_n = pi_{n+1} + (n + a + 1/2) pi_n + n a pi_{n-1}
        let a = Rat::new(3, 7);
        let mut prev = vec![Rat::zero()];
        let mut cur = vec![Rat::one()];
        for n in 0..6usize {
            let mut next = vec![Rat::zero(); cur.len() + 1];
            let b = Rat::from_int(n as i64) + &a + Rat::new(1, 2);
            let c = Rat::from_int(n as i64) * &a;
            for (k, v) in cur.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= &(v.clone() * &b);
            }
            for (k, v) in prev.iter().enumerate() {
                next[k] -= &(v.clone() * &c);
            }
            assert_eq!(charlier_poly(n + 1, &a).unwrap().coeffs, next, "degree {}", n + 1);
            prev = cur;
            cur = next;
        }
    }

    #[test]
    fn direct_value_matches_polynomial() {
        let a = Rat::new(1, 5);
        let x = Rat::new(17, 3);
        for l in 0..8 {
            assert_eq!(
                charlier_value(l, &x, &a).unwrap(),
                charlier_poly(l, &a).unwrap().eval_rat(&x)
            );
        }
    }

    #[test]
    fn orthogonality() {
        let tol = bf(1e-20);
        let a = Rat::one();
        let r = charlier_orthogonality_check(0, 0, &a, &tol, P).unwrap();
        assert!(r.passed && close(&r.value, &bf(1.0), 1e-20));
        assert!(charlier_orthogonality_check(0, 1, &a, &tol, P).unwrap().passed);
        assert!(charlier_orthogonality_check(1, 1, &a, &tol, P).unwrap().passed);
        let a = Rat::new(5, 2);
        assert!(charlier_orthogonality_check(3, 3, &a, &tol, P).unwrap().passed);
        assert!(charlier_orthogonality_check(2, 4, &a, &tol, P).unwrap().passed);
        assert!(charlier_orthogonality_check(1, 1, &a, &bf(1e-60), P).is_err());
    }

    #[test]
    fn expectation_small_cases() {
        let a = Rat::one();
        let v = char_poly_expectation(1, &a, &[bf(3.0)]).unwrap();
        assert!(close(&v, &bf(1.5), 1e-35));
        let b = brute_force_expectation(1, &a, &[bf(3.0)], 60).unwrap();
        assert!(close(&b.value, &bf(1.5), 1e-30), "{:?}", b);
        assert!(b.tail_bound < bf(1e-30));
        assert!(char_poly_expectation(2, &a, &[bf(1.0), bf(1.0)]).is_err());
    }

    #[test]
    fn expectation_matches_brute_force() {
        let a = Rat::new(1, 2);
        let us = [bf(0.3), bf(-1.7)];
        for l in 1..=2 {
            for n in 1..=2 {
                let det = char_poly_expectation(l, &a, &us[..n]).unwrap();
                let bf_ = brute_force_expectation(l, &a, &us[..n], 50).unwrap();
                assert!(bf_.tail_bound < bf(1e-15), "{:?}", bf_);
                assert!(close(&det, &bf_.value, 1e-15), "L={l} N={n}: {det} vs {:?}", bf_);
            }
        }
    }

    #[test]
    fn scaling_limit() {
        let r = charlier_scaling_limit_check(&Rat::zero(), 0, &Rat::one(), &[20, 40, 80], P).unwrap();
        let expect = (BigFloat::one(P) / BigFloat::pi(P)).sqrt() * bf(2.0).cos();
        assert!(close(&r.target, &expect, 1e-35));
        assert!((r.target.to_f64() + 0.2348).abs() < 5e-5);
        assert!(r.monotone, "{:?}", r.rows);
        assert!(r.observed_rate.is_some());
        let s = charlier_scaling_limit_check(&Rat::from_int(2), 2, &Rat::new(1, 2), &[10], P).unwrap();
        let half = bf(0.5);
        let expect = half.pow(&bf(-0.5)) * bessel_j(&bf(-0.5), &bf(4.0), P).unwrap();
        assert!(close(&s.target, &expect, 1e-35));
        assert!(charlier_scaling_limit_check(&Rat::zero(), 5, &Rat::one(), &[3], P).is_err());
    }
}
