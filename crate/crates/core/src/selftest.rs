//! The acceptance checks as a runnable table, for the `selftest` command.

use std::time::Instant;

use serde::Serialize;

use crate::arith::{BigFloat, EpsLaurent, Rat};
use crate::charlier::{
    asymptotic_match_check, brute_force_expectation, char_poly_expectation, charlier_orthogonality_check,
    charlier_scaling_limit_check,
};
use crate::error::{Error, Result};
use crate::gw::{free_energy, invariant, GenusDegreeTable};
use crate::series::{MiwaPolynomial, ZSeries};
use crate::wave::{kernel_khat, s1_log_series, solve_formal_wave, stirling_g_oracle, Normalized, Sigma};
use crate::zmodel::{characteristic_det_check, stabilization_check, zmodel_expansion, zmodel_log_in_times};

pub const CHECKS: [&str; 14] = [
    "wave-coefficients",
    "stirling-oracle",
    "one-point",
    "multi-point",
    "worked-example",
    "free-energy",
    "stabilization",
    "projector",
    "characteristic-matrix",
    "structural",
    "orthogonality",
    "charpoly",
    "scaling-limit",
    "asymptotics",
];

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub only: Option<String>,
    /// Degree for the stabilization check (default 3).
    pub degree: Option<u32>,
    pub prec: u32,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            only: None,
            degree: None,
            prec: 128,
        }
    }
}

type Outcome = std::result::Result<String, String>;

fn lp(terms: &[(i32, i64, i64)]) -> EpsLaurent {
    EpsLaurent::from_terms(terms.iter().map(|&(e, p, q)| (e, Rat::new(p, q))))
}

fn expect_eq(what: &str, got: &EpsLaurent, want: &EpsLaurent) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn e<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn run(opts: &Options) -> Result<Vec<CheckResult>> {
    let selected: Vec<usize> = match &opts.only {
        None => (0..CHECKS.len()).collect(),
        Some(name) => match CHECKS.iter().position(|c| c == name) {
            Some(i) => vec![i],
            None => {
                return Err(Error::InvalidParameter(format!(
                    "unknown check {name:?}; known: {}",
                    CHECKS.join(", ")
                )))
            }
        },
    };
    Ok(selected
        .into_iter()
        .map(|i| {
            let start = Instant::now();
            let outcome = run_one(i, opts);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                id: i + 1,
                name: CHECKS[i],
                passed,
                detail,
                seconds,
            }
        })
        .collect())
}

fn run_one(i: usize, opts: &Options) -> Outcome {
    match i {
        0 => wave_coefficients(),
        1 => stirling_oracle(),
        2 => one_point(),
        3 => multi_point(),
        4 => worked_example(),
        5 => free_energy_check(),
        6 => stabilization(opts.degree.unwrap_or(3)),
        7 => projector(),
        8 => characteristic(),
        9 => structural(),
        10 => orthogonality(opts.prec),
        11 => charpoly(opts.prec),
        12 => scaling_limit(opts.prec),
        13 => asymptotics(opts.prec),
        _ => Err(format!("no check {i}")),
    }
}

fn wave_coefficients() -> Outcome {
    let a = e(solve_formal_wave(Sigma::Plus, 3))?.h;
    expect_eq("z^-1", &a.coeff_unchecked(-1), &lp(&[(-2, 1, 1), (0, -1, 24)]))?;
    expect_eq(
        "z^-2",
        &a.coeff_unchecked(-2),
        &lp(&[(0, 1, 1152), (-2, 11, 24), (-4, 1, 2)]),
    )?;
    expect_eq(
        "z^-3",
        &a.coeff_unchecked(-3),
        &lp(&[(0, 1003, 414720), (-2, 265, 1152), (-4, 47, 48), (-6, 1, 6)]),
    )?;
    Ok("three coefficients exact".into())
}

fn stirling_oracle() -> Outcome {
    let b = e(solve_formal_wave(Sigma::Minus, 8))?;
    let o = e(stirling_g_oracle(8))?;
    for (m, (x, y)) in b.coefficients().iter().zip(o.coefficients()).enumerate() {
        expect_eq(&format!("z^-{m}"), x, &y)?;
    }
    Ok("B = Stirling oracle through z^-8".into())
}

fn one_point() -> Outcome {
    expect_eq("<tau_0>", &e(invariant(&[0]))?.value, &lp(&[(-2, 1, 1), (0, -1, 24)]))?;
    expect_eq(
        "<tau_2>",
        &e(invariant(&[2]))?.value,
        &lp(&[(-2, 1, 4), (0, 1, 24), (2, 7, 5760)]),
    )?;
    Ok("<tau_0>, <tau_2> exact".into())
}

fn multi_point() -> Outcome {
    let eps_m2 = lp(&[(-2, 1, 1)]);
    expect_eq("<tau_0 tau_0>", &e(invariant(&[0, 0]))?.value, &eps_m2)?;
    expect_eq("<tau_0 tau_0 tau_0>", &e(invariant(&[0, 0, 0]))?.value, &eps_m2)?;
    expect_eq("<tau_0 tau_1>", &e(invariant(&[0, 1]))?.value, &EpsLaurent::zero())?;
    Ok("stable under doubling the truncation".into())
}

fn worked_example() -> Outcome {
    let z = e(zmodel_expansion(4, 3))?;
    let one = lp(&[(-2, 1, 1), (0, -1, 24)]);
    let two = lp(&[(0, 1, 1152), (-2, 11, 24), (-4, 1, 2)]);
    let three = lp(&[(0, 1003, 414720), (-2, 265, 1152), (-4, 47, 48), (-6, 1, 6)]);
    let mixed = lp(&[(0, -1, 27648), (-2, 169, 384), (-4, 23, 16), (-6, 1, 2)]);
    let twice = |x: &EpsLaurent| x.scale(&Rat::from_int(2));
    let cases: [(&[u32], EpsLaurent); 7] = [
        (&[1], one),
        (&[2], two.clone()),
        (&[1, 1], twice(&two)),
        (&[3], three),
        (&[2, 1], mixed.clone()),
        (&[1, 2], mixed.clone()),
        (&[1, 1, 1], twice(&mixed)),
    ];
    for (m, want) in &cases {
        expect_eq(&format!("z^-{m:?}"), &e(z.coeff(m))?, want)?;
    }
    Ok("N = 4 block exact".into())
}

fn fp1_display() -> MiwaPolynomial {
    let mut m = MiwaPolynomial::zero(true, 3);
    m.add_term(&[0], &lp(&[(-2, 1, 1), (0, -1, 24)]));
    m.add_term(&[0, 0], &lp(&[(-2, 1, 2)]));
    m.add_term(&[0, 0, 0], &lp(&[(-2, 1, 6)]));
    m.add_term(&[2], &lp(&[(-2, 1, 4), (0, 1, 24), (2, 7, 5760)]));
    m
}

fn free_energy_check() -> Outcome {
    let z = e(zmodel_log_in_times(4, 3))?;
    let f = e(free_energy(3))?;
    let d = z.diff(&f);
    if !d.is_empty() {
        return Err(format!(
            "log Z_4 and the free energy differ at {:?}",
            d.iter().map(|x| &x.0).collect::<Vec<_>>()
        ));
    }
    let d = f.diff(&fp1_display());
    if !d.is_empty() {
        return Err(format!(
            "free energy differs from the display at {:?}",
            d.iter().map(|x| &x.0).collect::<Vec<_>>()
        ));
    }
    Ok(format!("log Z_4 = F = {f}"))
}

fn stabilization(degree: u32) -> Outcome {
    let d = e(stabilization_check(degree))?;
    if d.is_empty() {
        Ok(format!(
            "N = {} and N = {} agree through degree {degree}",
            degree + 1,
            degree + 2
        ))
    } else {
        Err(format!(
            "differences at {:?}",
            d.iter().map(|x| &x.0).collect::<Vec<_>>()
        ))
    }
}

fn projector() -> Outcome {
    let ab = e(Normalized::new(8))?;
    let r = ab.r_matrix();
    if r.order() < 8 {
        return Err(format!("R known only to order {}", r.order()));
    }
    if !r.trace().eq_on_window(&ZSeries::one(8)) {
        return Err("tr R != 1".into());
    }
    if !r.mul(&r).sub(&r).is_zero() {
        return Err("R^2 != R".into());
    }
    if !r.det().is_zero() {
        return Err("det R != 0".into());
    }
    if !e(e(kernel_khat(8))?.diagonal())?.eq_on_window(&ZSeries::one(8)) {
        return Err("K(z, z) != 1".into());
    }
    let log = s1_log_series(&ab);
    if !log.logpart.is_zero() || log.logpart.order() < 8 {
        return Err("log part of S_1 does not vanish".into());
    }
    Ok("tr R = 1, R^2 = R, det R = 0, K(z,z) = 1, S_1 log-free, order 8".into())
}

fn characteristic() -> Outcome {
    for n in 1..=2 {
        let bad = e(characteristic_det_check(n, 4))?;
        if !bad.is_empty() {
            return Err(format!("N = {n}: mismatch at {bad:?}"));
        }
    }
    Ok("det G_N = det(phi_k(z_j)) for N = 1, 2 at order 4".into())
}

/// Sorted tuples of at most `n` entries with sum at most `s`.
pub fn small_tuples(n: usize, s: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, min: u32, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == n {
            return;
        }
        for k in min..=rest {
            cur.push(k);
            go(n, k, rest - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 0, s, &mut Vec::new(), &mut out);
    out
}

/// The structural properties of one invariant: parity, even eps exponents
/// in `[-2, sum k]`, nonnegative degrees, and symmetry under reversal.
pub fn structural_properties(ks: &[u32]) -> std::result::Result<(), String> {
    let total: u32 = ks.iter().sum();
    let rec = e(invariant(ks))?;
    if total % 2 == 1 {
        return if rec.value.is_zero() {
            Ok(())
        } else {
            Err(format!("{ks:?}: odd total but value {}", rec.value))
        };
    }
    for (x, _) in rec.value.terms() {
        if x % 2 != 0 || x < -2 || x > total as i32 {
            return Err(format!("{ks:?}: eps exponent {x} outside the even range [-2, {total}]"));
        }
    }
    let table = e(GenusDegreeTable::decode(ks, &rec.value))?;
    if let Some(((g, d), _)) = table.entries.iter().find(|((_, d), _)| *d < 0) {
        return Err(format!("{ks:?}: negative degree {d} at genus {g}"));
    }
    let rev: Vec<u32> = ks.iter().rev().copied().collect();
    if rev != ks {
        let other = e(invariant(&rev))?;
        if other.value != rec.value {
            return Err(format!("{ks:?}: not symmetric, {} vs {}", rec.value, other.value));
        }
    }
    Ok(())
}

fn structural() -> Outcome {
    let tuples = small_tuples(4, 6);
    for ks in &tuples {
        structural_properties(ks)?;
    }
    Ok(format!("{} tuples with n <= 4, sum k <= 6", tuples.len()))
}

fn orthogonality(prec: u32) -> Outcome {
    let tol = BigFloat::from_f64(1e-20, prec);
    let a = Rat::one();
    let mut worst = BigFloat::zero(prec);
    for l in 0..=4 {
        for lp in 0..=4 {
            let r = e(charlier_orthogonality_check(l, lp, &a, &tol, prec))?;
            if !r.passed {
                return Err(format!("({l}, {lp}): {} vs {}", r.value, r.target));
            }
            worst = worst.max(r.abs_error);
        }
    }
    Ok(format!("max abs error {}", worst.to_string_digits(3)))
}

fn charpoly(prec: u32) -> Outcome {
    let a = Rat::new(1, 2);
    let us = [BigFloat::from_f64(0.3, prec), BigFloat::from_f64(-1.7, prec)];
    let tol = BigFloat::from_f64(1e-15, prec);
    let mut worst = BigFloat::zero(prec);
    for l in 1..=2 {
        for n in 1..=2 {
            let det = e(char_poly_expectation(l, &a, &us[..n]))?;
            let bf = e(brute_force_expectation(l, &a, &us[..n], 50))?;
            let err = (&det - &bf.value).abs();
            if !(err < tol && bf.tail_bound < tol) {
                return Err(format!(
                    "L = {l}, N = {n}: {det} vs {} (tail {})",
                    bf.value, bf.tail_bound
                ));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("max abs error {}", worst.to_string_digits(3)))
}

fn scaling_limit(prec: u32) -> Outcome {
    let r = e(charlier_scaling_limit_check(
        &Rat::zero(),
        0,
        &Rat::one(),
        &[20, 40, 80],
        prec,
    ))?;
    let pi = BigFloat::pi(prec);
    let target = (BigFloat::one(prec) / pi).sqrt() * BigFloat::from_int(2, prec).cos();
    if !r.target.approx_eq(&target, 1e-30) {
        return Err(format!("target {} != sqrt(1/pi) cos 2", r.target));
    }
    let errs: Vec<String> = r.rows.iter().map(|x| x.abs_error.to_string_digits(3)).collect();
    if !r.monotone {
        return Err(format!("errors not decreasing: {errs:?}"));
    }
    Ok(format!(
        "errors {errs:?}, observed rate {:.3}",
        r.observed_rate.unwrap_or(f64::NAN)
    ))
}

fn asymptotics(prec: u32) -> Outcome {
    let r = e(asymptotic_match_check(
        &BigFloat::from_int(20, prec),
        &BigFloat::one(prec),
        3,
        prec,
    ))?;
    let ratio = r.ratio.to_f64();
    if !(r.rel_error < BigFloat::from_f64(1e-4, prec)) {
        return Err(format!("relative error {}", r.rel_error));
    }
    if !(8.0..=32.0).contains(&ratio) {
        return Err(format!("error ratio {ratio}"));
    }
    Ok(format!(
        "relative error {}, ratio {ratio:.3}",
        r.rel_error.to_string_digits(3)
    ))
}
