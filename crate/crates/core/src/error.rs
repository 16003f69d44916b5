use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the numerical layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole: |{lhs} - {rhs}| is within the collision tolerance ({what})")]
    Pole {
        what: &'static str,
        lhs: Complex64,
        rhs: Complex64,
    },

    #[error("logarithm of a vanishing argument {0}")]
    ZeroArg(Complex64),

    #[error("non-finite value {0}")]
    NonFinite(Complex64),

    #[error("sector mismatch: {0}")]
    SectorMismatch(String),

    #[error("newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("bethe roots collided: {0}")]
    Collision(String),

    #[error("roots collided along the twist path at step {step}")]
    PathCollision { step: usize },

    #[error("singular jacobian")]
    JacobianSingular,

    #[error("states are {distance:e} apart: too close to separate same-state and distinct-state branches")]
    NearDegenerate { distance: f64 },

    #[error("eigenvalue is degenerate inside the weight sector")]
    DegenerateEigenvalue,

    #[error("normalizing matrix element vanishes")]
    ZeroDenominator,

    #[error("transfer-matrix eigenvalue vanishes at {0}")]
    ZeroTau(Complex64),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
