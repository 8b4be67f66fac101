use serde::{Deserialize, Serialize};

use crate::arith::EpsLaurent;

/// Serialized form shared by one- and many-variable series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: usize,
    pub top: Vec<i64>,
    pub order: i64,
    pub coeffs: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub val: EpsLaurent,
}
