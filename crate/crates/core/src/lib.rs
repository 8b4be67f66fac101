//! Exact and numeric tools for stationary Gromov-Witten invariants of the
//! projective line: formal wave solutions of a Bessel-type difference
//! equation, n-point series, a determinantal model in Miwa times, and the
//! Charlier ensemble.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod charlier;
pub mod error;
pub mod gw;
pub mod perm;
pub mod selftest;
pub mod series;
pub mod wave;
pub mod zmodel;

pub use arith::{BigFloat, EpsLaurent, Rat};
pub use error::{Error, Result};
pub use gw::{free_energy, invariant, GenusDegreeTable, InvariantRecord};
pub use series::{MiwaPolynomial, MultiSeries, ZSeries};
pub use wave::{solve_formal_wave, stirling_g_oracle, Sigma, WaveExpansion};
pub use zmodel::{zmodel_expansion, zmodel_log_in_times};
