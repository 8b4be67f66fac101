//! Formal solutions of `f(z+1) + f(z-1) = eps (z + 1/2) f(z)` and the
//! objects built from them: shifts, the projector `R`, the kernel `K` and
//! the one-point series `S_1`.

use crate::arith::{bernoulli_numbers, EpsLaurent, Rat};
use crate::error::{Error, Result};
use crate::series::{Grading, LogSeries, MultiSeries, ZSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn value(self) -> i64 {
        match self {
            Sigma::Plus => 1,
            Sigma::Minus => -1,
        }
    }
}

/// `(eps z / e)^{sigma z} h(z)`.
///
/// `Sigma::Plus` with `h = A` is the `f`-type solution; `Sigma::Minus` with
/// `h = B` is `g(z-1)`.
#[derive(Clone, Debug)]
pub struct WaveExpansion {
    pub sigma: Sigma,
    pub h: ZSeries,
}

impl WaveExpansion {
    /// The `z^{-m}` coefficients of `h` for `m = 0..=order`.
    pub fn coefficients(&self) -> Vec<EpsLaurent> {
        (0..=self.h.order()).map(|m| self.h.coeff_unchecked(-m)).collect()
    }

    /// Derivative with the prefactor stripped: since
    /// `d/dz (eps z / e)^{sigma z} = sigma log(eps z) (eps z / e)^{sigma z}`,
    /// this is `h' + sigma log(eps z) h`.
    pub fn stripped_derivative(&self) -> LogSeries {
        let s = self.sigma.value();
        let order = self.h.order() + 1;
        let z = ZSeries::monomial(EpsLaurent::one(), 1, order);
        // exponent sigma z (log(eps z) - 1)
        let exponent = LogSeries::new(z.scale(&int(-s)), z.scale(&int(s)));
        LogSeries::from_plain(self.h.clone())
            .derivative()
            .add(&exponent.derivative().mul_plain(&self.h))
    }
}

fn int(n: i64) -> EpsLaurent {
    EpsLaurent::constant(Rat::from_int(n))
}

/// `E_c(z) = (z + c) log(1 + c/z) - c`, so that the prefactor satisfies
/// `P(z+c)/P(z) = (eps z)^c exp(E_c(z))` for `P(z) = (eps z / e)^z`.
pub fn shift_exponent(c: i64, order: i64) -> ZSeries {
    let c = Rat::from_int(c);
    let terms = (1..=order.max(0)).map(|m| {
        let sign = if m % 2 == 1 { Rat::one() } else { -Rat::one() };
        (-m, sign * c.pow(m as u32 + 1) / Rat::from_int(m * (m + 1)))
    });
    let mut s = ZSeries::from_rats(terms, order);
    if s.is_zero() {
        s = ZSeries::zero(-1, order);
    }
    s
}

/// Expansion of `z -> W(z + c)` on the base `(eps z / e)^{sigma z}`:
/// `h -> (eps z)^{sigma c} exp(sigma E_c) h(z + c)`.
pub fn wave_shift(w: &WaveExpansion, c: i64) -> WaveExpansion {
    if c == 0 {
        return w.clone();
    }
    let s = w.sigma.value();
    let ratio = shift_exponent(c, w.h.order())
        .scale(&int(s))
        .exp()
        .expect("shift exponent has no constant term");
    let k = s * c;
    let h = ratio.mul(&w.h.argument_shift(c)).z_shift(k).eps_shift(k as i32);
    WaveExpansion { sigma: w.sigma, h }
}

/// `L(h) = h_{+1} + h_{-1} - eps (z + sigma/2) h` with all terms on the
/// common base `(eps z / e)^{sigma z}`. The shift by `sigma/2` is the
/// equation satisfied by `g(z-1)` when `sigma = -1`.
pub fn difference_operator(sigma: Sigma, h: &ZSeries) -> ZSeries {
    let w = WaveExpansion { sigma, h: h.clone() };
    let up = wave_shift(&w, 1).h;
    let down = wave_shift(&w, -1).h;
    let linear = ZSeries::from_terms(
        [
            (1, EpsLaurent::monomial(Rat::one(), 1)),
            (0, EpsLaurent::monomial(Rat::new(sigma.value(), 2), 1)),
        ],
        h.order() + 1,
    );
    up.add(&down).sub(&linear.mul(h))
}

/// Solves `L(h) = 0` for `h = 1 + a_1/z + ... + a_M/z^M`.
pub fn solve_formal_wave(sigma: Sigma, order: i64) -> Result<WaveExpansion> {
    if order < 0 {
        return Err(Error::InvalidParameter(format!(
            "order must be nonnegative, got {order}"
        )));
    }
    let work = order + 2;
    let basis = |j: i64| difference_operator(sigma, &ZSeries::monomial(EpsLaurent::one(), -j, work));

    // L is linear: L(h) = L(1) + sum_j a_j L(z^-j).
    let mut residual = basis(0);
    let mut a = vec![EpsLaurent::one()];
    for m in 1..=order {
        if !residual.coeff(1 - m)?.is_zero() {
            return Err(Error::InconsistentSystem(1 - m));
        }
        let lm = basis(m);
        if !lm.coeff(1 - m)?.is_zero() {
            return Err(Error::InconsistentSystem(1 - m));
        }
        let pivot = lm.coeff(-m)?;
        let am = (-residual.coeff(-m)?)
            .div_monomial(&pivot)
            .map_err(|_| Error::InconsistentSystem(-m))?;
        residual = residual.add(&lm.scale(&am));
        a.push(am);
    }
    if !residual.coeff(-order)?.is_zero() {
        return Err(Error::InconsistentSystem(-order));
    }
    let h = ZSeries::from_terms(a.into_iter().enumerate().map(|(m, c)| (-(m as i64), c)), order);
    Ok(WaveExpansion { sigma, h })
}

/// The `sigma = -1` solution computed independently from the Bessel series
/// of `g(z-1)` and the Stirling series of `1/Gamma(z + 1/2 + m)`:
/// `B(z) = sum_m (-1)^m eps^{-2m} z^{-m} / m! * exp(-sum_k (-1)^{k+1} B_{k+1}(1/2+m) / (k(k+1) z^k))`.
pub fn stirling_g_oracle(order: i64) -> Result<WaveExpansion> {
    if order < 0 {
        return Err(Error::InvalidParameter(format!(
            "order must be nonnegative, got {order}"
        )));
    }
    let bern = bernoulli_numbers(order as usize + 1);
    let bern_poly = |n: usize, x: &Rat| -> Rat {
        (0..=n)
            .map(|k| Rat::binomial(n as i64, k as u32) * &bern[k] * x.pow((n - k) as u32))
            .sum()
    };
    let mut h = ZSeries::zero(0, order);
    for m in 0..=order {
        let x = Rat::new(1, 2) + Rat::from_int(m);
        let stirling = ZSeries::from_rats(
            (1..=order).map(|k| {
                let sign = if k % 2 == 1 { -Rat::one() } else { Rat::one() };
                (-k, sign * bern_poly(k as usize + 1, &x) / Rat::from_int(k * (k + 1)))
            }),
            order,
        );
        let factor = stirling.exp()?;
        let sign = if m % 2 == 0 { Rat::one() } else { -Rat::one() };
        let lead = EpsLaurent::monomial(sign * Rat::factorial(m as u32).recip()?, -2 * m as i32);
        h = h.add(&factor.z_shift(-m).truncate(order).scale(&lead));
    }
    Ok(WaveExpansion {
        sigma: Sigma::Minus,
        h: h.truncate(order),
    })
}

/// The four prefactor-free series `A`, `B`, `A~`, `B~`:
/// `f(z) = (eps z/e)^z A`, `g(z-1) = (eps z/e)^{-z} B`,
/// `f(z-1) = (eps z/e)^z A~`, `g(z) = (eps z/e)^{-z} B~`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub a: ZSeries,
    pub b: ZSeries,
    pub a_tilde: ZSeries,
    pub b_tilde: ZSeries,
}

impl Normalized {
    pub fn new(order: i64) -> Result<Self> {
        let a = solve_formal_wave(Sigma::Plus, order)?;
        let b = solve_formal_wave(Sigma::Minus, order)?;
        let a_tilde = wave_shift(&a, -1).h;
        let b_tilde = wave_shift(&b, 1).h;
        Ok(Normalized {
            a: a.h,
            b: b.h,
            a_tilde,
            b_tilde,
        })
    }

    pub fn order(&self) -> i64 {
        self.a.order()
    }

    /// The same data as `Normalized::new(order)` would produce, for `order`
    /// not above the current one.
    pub fn truncate(&self, order: i64) -> Normalized {
        Normalized {
            a: self.a.truncate(order),
            b: self.b.truncate(order),
            a_tilde: self.a_tilde.truncate(order + 1),
            b_tilde: self.b_tilde.truncate(order + 1),
        }
    }

    /// `A B - A~ B~`, identically one.
    pub fn wronskian(&self) -> ZSeries {
        self.a.mul(&self.b).sub(&self.a_tilde.mul(&self.b_tilde))
    }

    /// `K(z_i, z_j) = A(z_i) B(z_j) - A~(z_i) B~(z_j)` inside a series in `n` variables.
    pub fn kernel_in(&self, i: usize, j: usize, n: usize, grading: &Grading) -> Result<MultiSeries> {
        let emb = |s: &ZSeries, v: usize| MultiSeries::from_univariate(s, v, n, grading.clone());
        let first = emb(&self.a, i).mul(&emb(&self.b, j))?;
        let second = emb(&self.a_tilde, i).mul(&emb(&self.b_tilde, j))?;
        first.sub(&second)
    }

    pub fn r_matrix(&self) -> RMatrix {
        let (a, b, at, bt) = (&self.a, &self.b, &self.a_tilde, &self.b_tilde);
        RMatrix {
            entries: [[b.mul(a), b.mul(at).neg()], [bt.mul(a), bt.mul(at).neg()]],
        }
    }
}

/// `K(z, w) = A(z) B(w) - A~(z) B~(w)` in two variables, total-degree truncated.
pub fn kernel_khat(order: i64) -> Result<MultiSeries> {
    Normalized::new(order)?.kernel_in(0, 1, 2, &Grading::Total)
}

/// The rank-one projector `R = (B, B~)^T (A, -A~)`.
#[derive(Clone, Debug)]
pub struct RMatrix {
    pub entries: [[ZSeries; 2]; 2],
}

impl RMatrix {
    pub fn order(&self) -> i64 {
        self.entries.iter().flatten().map(ZSeries::order).min().unwrap_or(0)
    }

    pub fn trace(&self) -> ZSeries {
        self.entries[0][0].add(&self.entries[1][1])
    }

    pub fn det(&self) -> ZSeries {
        let e = &self.entries;
        e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        let (x, y) = (&self.entries, &other.entries);
        let entry = |i: usize, j: usize| x[i][0].mul(&y[0][j]).add(&x[i][1].mul(&y[1][j]));
        RMatrix {
            entries: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        }
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        let (x, y) = (&self.entries, &other.entries);
        let entry = |i: usize, j: usize| x[i][j].sub(&y[i][j]);
        RMatrix {
            entries: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        }
    }

    /// The 2x2 matrix of `z^d` coefficients.
    pub fn coeff(&self, d: i64) -> Result<[[EpsLaurent; 2]; 2]> {
        let e = &self.entries;
        Ok([
            [e[0][0].coeff(d)?, e[0][1].coeff(d)?],
            [e[1][0].coeff(d)?, e[1][1].coeff(d)?],
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(ZSeries::is_zero)
    }
}

pub fn r_matrix(order: i64) -> Result<RMatrix> {
    Ok(Normalized::new(order)?.r_matrix())
}

/// The log-extended combination `(1/eps)[A D(B) - A~ D(B~) + log(eps z)]`,
/// with `D` the stripped derivative. Its log part cancels by the Wronskian.
pub fn s1_log_series(ab: &Normalized) -> LogSeries {
    let order = ab.order();
    let db = WaveExpansion {
        sigma: Sigma::Minus,
        h: ab.b.clone(),
    }
    .stripped_derivative();
    let dbt = WaveExpansion {
        sigma: Sigma::Minus,
        h: ab.b_tilde.clone(),
    }
    .stripped_derivative();
    db.mul_plain(&ab.a)
        .sub(&dbt.mul_plain(&ab.a_tilde))
        .add(&LogSeries::log(order + 2))
        .scale(&EpsLaurent::monomial(Rat::one(), -1))
}

/// `S_1 = (1/eps)[A B' - A~ B~']`, exact down to `z^{-order-1}`.
pub fn s1_series(order: i64) -> Result<ZSeries> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!("S_1 needs order >= 2, got {order}")));
    }
    let ab = Normalized::new(order)?;
    s1_log_series(&ab).into_plain()
}
