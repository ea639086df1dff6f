use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry count {count} does not match a {rows}x{cols} matrix")]
    EntryCount { rows: usize, cols: usize, count: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("eigensolver did not converge (dim {dim}, condition estimate {condition:e})")]
    NonConvergence { dim: usize, condition: f64 },
    #[error("function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },
    #[error("operator index {index} out of range for a tuple of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("stereographic projection is undefined at the north pole")]
    NorthPole,
    #[error("coherent state tail {tail:e} exceeds 1e-8 at N = {n}; use a larger truncation")]
    TailTooHeavy { tail: f64, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Load(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
