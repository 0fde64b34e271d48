use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid proposal spec: {0}")]
    InvalidSpec(String),

    #[error("no analytic Fisher information for component `{0}`")]
    UnsupportedComponent(String),

    #[error("quadrature did not converge: achieved error {achieved:e} > tolerance {tolerance:e}")]
    QuadratureFailure { achieved: f64, tolerance: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("Monte Carlo size {0} too small (need at least {1})")]
    SampleTooSmall(usize, usize),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
