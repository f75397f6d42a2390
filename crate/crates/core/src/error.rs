use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix dimension {dim} exceeds the limit of {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary: max |L^dag L - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian: max |M - M^dag| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("vector is not normalized: norm^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("bit {index} of the input pattern is already 0")]
    BitNotSet { index: usize },

    #[error("index {index} out of range for {len} modes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("mode index {index} appears more than once")]
    DuplicateIndex { index: usize },

    #[error("photon totals differ: rows carry {rows}, columns carry {cols}")]
    TotalMismatch { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation tail norm {tail:e} exceeds {limit:e}; raise the cutoff")]
    Truncation { tail: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
