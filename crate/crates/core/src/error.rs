use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("degree overflow: {p} + {q} exceeds dimension {n}")]
    DegreeOverflow { p: usize, q: usize, n: usize },

    #[error("invalid degree {k} for dimension {n}")]
    InvalidDegree { k: usize, n: usize },

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("dimension {n} exceeds the configured cap {cap}")]
    DimensionCap { n: usize, cap: usize },

    #[error("length {got} does not match the expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("double form is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("double form is not traceless (relative contraction {0:e})")]
    NotTraceless(f64),

    #[error("first Bianchi identity fails (relative residual {0:e})")]
    BianchiResidual(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is not Einstein (|Ric°| = {0:e})")]
    NotEinstein(f64),

    #[error("minimizer certificate unavailable: {0}")]
    YamabeUnavailable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("report decoding failed: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
