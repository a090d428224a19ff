//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by kernel evaluation, matrix assembly, solvers and training.
#[derive(Debug, Error)]
pub enum Error {
    /// Two inputs that must share a dimensionality do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A vector argument has the wrong length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A parameter is outside its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The same matrix entry was inserted twice; blocks must tile disjointly.
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    /// An iterative solver hit a NaN, nonpositive curvature or similar.
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// Sparsity constraint violated at initialization of a constrained run.
    #[error("sparsity constraint violated: bound {bound:.6} not below requirement {requirement:.6}")]
    ConstraintViolated { bound: f64, requirement: f64 },

    /// Malformed Matrix Market input.
    #[error("matrix market parse error at line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
