//! Truncated formal series in one and several variables.

mod json;
mod log;
mod multi;
mod symmetric;
mod zseries;

pub use json::{SeriesJson, TermJson};
pub use log::LogSeries;
pub use multi::{
    antisym_divide_vandermonde, divide_by_difference, expand_inverse_difference, vandermonde, Exponents, Grading,
    MultiSeries, Window,
};
pub use symmetric::{miwa_to_symmetric, symmetric_to_miwa, MiwaPolynomial, Partition};
pub use zseries::ZSeries;
