use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot evaluate at eps = 0: negative powers of eps are present")]
    ZeroEvaluation,

    #[error("series constant term is not 1")]
    NonUnitConstant,

    #[error("series has a constant or positive part (top degree {top})")]
    PositivePart { top: i64 },

    #[error("coefficient outside the valid truncation window: {what}; increase the truncation order to at least {suggested}")]
    TruncationTooSmall { what: String, suggested: i64 },

    #[error("variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("indices must differ (got {0} twice)")]
    SameIndex(usize),

    #[error("input is not antisymmetric under swapping variables {0} and {1}")]
    NotAntisymmetric(usize, usize),

    #[error("input is not symmetric under swapping variables {0} and {1}")]
    NotSymmetric(usize, usize),

    #[error("nonzero remainder dividing by (z{b} - z{a})")]
    NonzeroRemainder { a: usize, b: usize },

    #[error("need more variables than the degree bound (n = {n}, D = {degree})")]
    StabilizationWindow { n: usize, degree: usize },

    #[error("inconsistent triangular system at order {0}")]
    InconsistentSystem(i64),

    #[error("log(eps z) part does not cancel at z^{0}")]
    LogPartNonzero(i64),

    #[error("result changed when the truncation order was doubled ({order} -> {doubled})")]
    TruncationUnstable { order: i64, doubled: i64 },

    #[error("odd eps exponent {0} in an invariant")]
    OddEpsExponent(i32),

    #[error("pole of the Gamma function at {0}")]
    PoleInput(String),

    #[error("Bessel order too close to an integer at z = {0}; perturb z")]
    NearIntegerOrder(String),

    #[error("tail bound not achievable: {0}")]
    TailBound(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
