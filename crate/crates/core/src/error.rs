use thiserror::Error;

/// Pivot and row indices carried by errors are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (entry ({row}, {col}) differs from its mirror)")]
    NotHermitian { row: usize, col: usize },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("zero pivot at index {pivot}")]
    ZeroPivot { pivot: usize },
    #[error("singular triangular diagonal at index {index}")]
    SingularDiagonal { index: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("invalid Q format: {0}")]
    InvalidFormat(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
