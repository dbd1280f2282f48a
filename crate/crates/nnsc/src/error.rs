//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by matrix operations, solvers, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Two matrices had incompatible shapes for the requested operation.
    #[error("{op}: dimension mismatch, {lr}x{lc} vs {rr}x{rc}", lr = .left.0, lc = .left.1, rr = .right.0, rc = .right.1)]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    /// A matrix was constructed with inconsistent or empty dimensions.
    #[error("invalid shape: {rows}x{cols} with data length {len}")]
    InvalidShape { rows: usize, cols: usize, len: usize },

    /// An operation produced or received a NaN or infinite value.
    #[error("{op}: non-finite value")]
    NonFinite { op: &'static str },

    /// A column that must have positive norm was entirely zero.
    #[error("column {index} has zero norm")]
    ZeroColumn { index: usize },

    /// Data matrix entry violated the non-negativity precondition.
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    /// A configuration value was outside its allowed range.
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// An iterative method hit its iteration cap before reaching tolerance.
    #[error("no convergence after {iterations} iterations, residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Eigensolver input was not symmetric.
    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed CSV input.
    #[error("CSV parse error at line {line}: {message}")]
    Csv { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
