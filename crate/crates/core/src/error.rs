use thiserror::Error;

/// Errors produced by the polynomial, unitary, state and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("index {index} exceeds the configured maximum {max}")]
    IndexOutOfBounds { index: usize, max: usize },

    #[error("singular kernel: |1 - 4 y t^2 v| = {0:e}")]
    Singular(f64),

    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    NonConvergent { terms: usize, last_term: f64 },

    #[error("outside the domain of this formula: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix norm {0:e} is too large to exponentiate")]
    NormOverflow(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, FockError>;
