use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range 0..={max}")]
    InvalidIndex { index: usize, max: usize },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("invalid degree: {0}")]
    InvalidDegree(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The root iteration hit its iteration cap. Carries the best-effort state.
    #[error("root iteration did not converge after {iterations} iterations (max correction {max_correction:e})")]
    NonConvergence {
        iterations: usize,
        max_correction: f64,
        roots: Vec<Complex64>,
        residuals: Vec<f64>,
    },

    #[error("hypothesis violated: {reason}")]
    HypothesisViolated {
        reason: String,
        offending: Option<Complex64>,
        signed_distance: Option<f64>,
    },

    /// A verified theorem failed numerically. Signals a bug or a tolerance that is too tight.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("diagonal polynomial minus the target value is a nonzero constant")]
    DegenerateDiagonal,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

impl Error {
    pub(crate) fn hypothesis(reason: impl Into<String>) -> Self {
        Error::HypothesisViolated {
            reason: reason.into(),
            offending: None,
            signed_distance: None,
        }
    }
}
