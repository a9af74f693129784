//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("entry list has length {found}, expected {expected}")]
    BadEntryCount { expected: usize, found: usize },

    #[error("matrix is not positive definite (eigenvalue range [{min_eig:.6e}, {max_eig:.6e}])")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {off_diag:.6e})")]
    EigenNonConvergence { sweeps: usize, off_diag: f64 },

    #[error("scalar function is not finite at eigenvalue {eigenvalue:.6e}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("barycenter solve did not converge: residual {residual:.6e} after {iterations} iterations")]
    SolverDidNotConverge { residual: f64, iterations: usize },

    #[error("transport solver failed: {0}")]
    Transport(String),

    #[error("curve aborted at t = {at_t}: {cause}")]
    CurveAborted {
        at_t: f64,
        cause: Box<Error>,
        /// Points computed before the failing grid value.
        partial: Box<crate::trotter::TrotterCurve>,
    },

    #[error("malformed measure file: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
