use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {x}")]
    Pole { x: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature did not converge after {refinements} refinements (estimate {estimate:e}, tol {tol:e})")]
    NoConvergence { refinements: u32, estimate: f64, tol: f64 },

    #[error("normalization bracket {value} is not positive (alpha = {alpha}, q = {q}, n = {n})")]
    InternalSign { alpha: f64, q: i32, n: usize, value: f64 },

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("ladder/eigenfunction ratio is not constant (spread {spread:e})")]
    NonConstantRatio { spread: f64 },

    #[error("coherent state is not normalizable at |z| = {z_abs}")]
    NotNormalizableAt { z_abs: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
