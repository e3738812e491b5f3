use thiserror::Error;

use crate::fock::BasisTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode index {0} (expected 1 or 2)")]
    InvalidMode(usize),

    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: BasisTag, right: BasisTag },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("steady state is not unique (null space dimension > 1)")]
    DegenerateSteadyState,

    #[error("solver did not converge (relative residual {residual:.3e})")]
    NonConvergence { residual: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("quantity undefined: {0}")]
    Undefined(String),

    #[error("objective failed at {point:?}: {source}")]
    Objective {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
