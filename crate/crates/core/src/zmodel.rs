//! The determinantal model `Z_N = det(phi_k(z_j)) / Delta(z)` as a formal
//! expansion in `z_j^{-1}`, its logarithm in Miwa times, and the
//! characteristic-matrix form of the same determinant.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::EpsLaurent;
use crate::error::{Error, Result};
use crate::perm::{permutations, sign};
use crate::series::{
    antisym_divide_vandermonde, symmetric_to_miwa, Grading, MiwaPolynomial, MultiSeries, SeriesJson, ZSeries,
};
use crate::wave::{solve_formal_wave, wave_shift, Normalized, Sigma, WaveExpansion};

/// `eps^{-(k-1)} (eps z/e)^{-z} f(z + k - 1)` as a series with leading term `z^{k-1}`.
pub fn zmodel_entry(k: usize, order: i64) -> Result<ZSeries> {
    if k == 0 {
        return Err(Error::InvalidParameter("column index starts at 1".into()));
    }
    let a = solve_formal_wave(Sigma::Plus, order)?;
    Ok(column(&a.h, k))
}

fn column(a: &ZSeries, k: usize) -> ZSeries {
    let c = k as i64 - 1;
    let w = WaveExpansion {
        sigma: Sigma::Plus,
        h: a.clone(),
    };
    wave_shift(&w, c).h.eps_shift(-(c as i32))
}

/// `sum_sigma sign(sigma) prod_j cols[sigma(j)](z_j)` in the total grading.
pub fn leibniz_det(cols: &[ZSeries]) -> Result<MultiSeries> {
    let n = cols.len();
    let entries: Vec<Vec<MultiSeries>> = (0..n)
        .map(|j| {
            cols.iter()
                .map(|c| MultiSeries::from_univariate(c, j, n, Grading::Total))
                .collect()
        })
        .collect();
    let terms: Vec<Result<MultiSeries>> = permutations(n)
        .par_iter()
        .map(|p| {
            let mut prod = MultiSeries::one(n, Grading::Total);
            for (j, &k) in p.iter().enumerate() {
                prod = prod.mul(&entries[j][k])?;
            }
            Ok(if sign(p) < 0 { prod.neg() } else { prod })
        })
        .collect();
    let mut det = MultiSeries::zero(n, Grading::Total);
    for t in terms {
        det = det.add(&t?)?;
    }
    Ok(det)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZModelExpansion {
    pub n: usize,
    pub degree: u32,
    pub numerator: SeriesJson,
    pub quotient: SeriesJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub miwa: Option<MiwaPolynomial>,
    #[serde(skip)]
    quotient_series: MultiSeries,
}

impl ZModelExpansion {
    pub fn quotient(&self) -> &MultiSeries {
        &self.quotient_series
    }

    /// Coefficient of `prod_j z_j^{-m_j}` in the quotient.
    pub fn coeff(&self, m: &[u32]) -> Result<EpsLaurent> {
        if m.len() > self.n {
            return Err(Error::VariableMismatch(format!(
                "{} exponents for {} variables",
                m.len(),
                self.n
            )));
        }
        let mut e = vec![0i64; self.n];
        for (x, &p) in e.iter_mut().zip(m) {
            *x = -(p as i64);
        }
        self.quotient_series.coeff(&e)
    }
}

/// Expansion of `Z_N` down to total degree `-D`.
pub fn zmodel_expansion(n: usize, degree: u32) -> Result<ZModelExpansion> {
    if n <= degree as usize {
        return Err(Error::StabilizationWindow {
            n,
            degree: degree as usize,
        });
    }
    let order = degree as i64;
    let a = solve_formal_wave(Sigma::Plus, order)?;
    let cols: Vec<ZSeries> = (1..=n).map(|k| column(&a.h, k)).collect();
    let numerator = leibniz_det(&cols)?;
    let quotient = antisym_divide_vandermonde(&numerator, n)?.truncate(order);
    if !quotient.coeff(&vec![0; n])?.is_one() {
        return Err(Error::NonUnitConstant);
    }
    Ok(ZModelExpansion {
        n,
        degree,
        numerator: numerator.to_json(),
        quotient: quotient.to_json(),
        miwa: None,
        quotient_series: quotient,
    })
}

/// `log Z_N` in the scaled Miwa times, through degree `D`.
pub fn zmodel_log_in_times(n: usize, degree: u32) -> Result<MiwaPolynomial> {
    let z = zmodel_expansion(n, degree)?;
    let log = z.quotient().log()?;
    symmetric_to_miwa(&log, n, degree, true)
}

/// Monomials where `log Z_{D+1}` and `log Z_{D+2}` disagree, with both values.
pub fn stabilization_check(degree: u32) -> Result<Vec<(Vec<u32>, EpsLaurent, EpsLaurent)>> {
    if degree < 1 {
        return Err(Error::InvalidParameter("stabilization needs D >= 1".into()));
    }
    let d = degree as usize;
    let (small, big) = rayon::join(
        || zmodel_log_in_times(d + 1, degree),
        || zmodel_log_in_times(d + 2, degree),
    );
    Ok(small?.diff(&big?))
}

/// Columns of the characteristic matrix: entry `(j, k)` is `gamma_k(z_j)`,
/// the `z^{-k}` coefficient of `K(z_j, z) / (z - z_j)` expanded at `z = inf`,
/// where `K(x, z) = A(x) B(z) - A~(x) B~(z)`.
#[derive(Clone, Debug)]
pub struct CharMatrix {
    pub columns: Vec<ZSeries>,
}

impl CharMatrix {
    pub fn new(n: usize, order: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix size must be positive".into()));
        }
        let ab = Normalized::new(order.max(n as i64))?.truncate(order);
        let kernel_coeff = |i: i64| -> Result<ZSeries> {
            let bi = ab.b.coeff(-i)?;
            let bti = if -i > ab.b_tilde.top() {
                EpsLaurent::zero()
            } else {
                ab.b_tilde.coeff(-i)?
            };
            Ok(ab.a.scale(&bi).sub(&ab.a_tilde.scale(&bti)))
        };
        let mut columns = Vec::with_capacity(n);
        for k in 1..=n as i64 {
            let mut col = ZSeries::zero(k - 1, order);
            for i in 0..k {
                col = col.add(&kernel_coeff(i)?.z_shift(k - 1 - i));
            }
            columns.push(col);
        }
        Ok(CharMatrix { columns })
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn det(&self) -> Result<MultiSeries> {
        leibniz_det(&self.columns)
    }
}

/// Checks `det G_N = det(phi_k(z_j))` on the common truncation window.
/// Returns the offending exponents, if any.
pub fn characteristic_det_check(n: usize, order: i64) -> Result<Vec<Vec<i64>>> {
    let g = CharMatrix::new(n, order)?;
    let a = solve_formal_wave(Sigma::Plus, order)?;
    let cols: Vec<ZSeries> = (1..=n).map(|k| column(&a.h, k)).collect();
    let lhs = g.det()?;
    let rhs = leibniz_det(&cols)?;
    let diff = lhs.sub(&rhs)?;
    Ok(diff
        .terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, _)| e.clone())
        .collect())
}
