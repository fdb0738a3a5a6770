use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty instance: n must be at least 1")]
    Empty,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("clique enumeration exceeded the cap of {cap} cliques")]
    EnumerationBudgetExceeded { cap: usize },

    #[error("instance too large for {what}: n = {n}, limit = {limit}")]
    SizeLimitExceeded { what: &'static str, n: usize, limit: usize },

    #[error("lower bound {bound} exceeds the smallest diagonal entry {min_diag}")]
    InvalidBound { bound: f64, min_diag: f64 },

    #[error("model has no variables with role {0}")]
    UnknownVariable(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure in LP solver: {0}")]
    NumericalFailure(String),

    #[error("rejection sampling gave up after {0} attempts")]
    RejectionCapExceeded(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
