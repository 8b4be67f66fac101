//! Coefficient rings: exact rationals, Laurent polynomials in eps, and
//! fixed-precision floats for the numeric side.

mod eps;
mod float;
mod rat;

pub use eps::EpsLaurent;
pub use float::BigFloat;
pub use rat::{bernoulli_numbers, bernoulli_polynomial, Rat};
