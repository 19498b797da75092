use thiserror::Error;

use crate::spaces::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry in vector")]
    NonFinite,

    #[error("invalid norm specification: {0}")]
    InvalidNorm(ValidationReport),

    #[error("basis matrix is singular")]
    Singular,

    #[error("basis matrix is ill-conditioned (condition number {cond:e} exceeds {bound:e})")]
    IllConditioned { cond: f64, bound: f64 },

    #[error("biorthogonality residual {residual:e} exceeds {tol:e}")]
    Biorthogonality { residual: f64, tol: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("N = {n} out of range 0..={dim}")]
    CardinalityOutOfRange { n: usize, dim: usize },

    #[error("selection is not a valid greedy set for this vector")]
    InvalidSelection,

    #[error("dimension {dim} exceeds the enumeration cap {cap}")]
    DimensionGuard { dim: usize, cap: usize },

    #[error("eigen solver failure: {0}")]
    Eigen(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("instance error: {0}")]
    Instance(String),
}
