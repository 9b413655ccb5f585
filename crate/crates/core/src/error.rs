use thiserror::Error;

/// Errors raised by the arithmetic, the systems and the detectors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("continued fraction terminates")]
    Terminates,

    /// An error bound grew past the safety margin, or a comparison could not
    /// be decided from the tracked error intervals.
    #[error("precision exhausted{}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    PrecisionExhausted { step: Option<u64> },

    #[error("crossing budget exceeded")]
    CrossingBudgetExceeded,

    #[error("return budget exceeded")]
    ReturnBudgetExceeded,

    #[error("resonant frequency")]
    ResonantFrequency,

    #[error("observable vanishes at the starting point")]
    ZeroAtStart,

    #[error("starting point is outside the target set")]
    OutsideTarget,

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl LabError {
    pub(crate) fn precision() -> Self {
        LabError::PrecisionExhausted { step: None }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::Invalid(msg.into())
    }

    /// Attach the orbit step at which a precision failure happened.
    pub fn at_step(self, n: u64) -> Self {
        match self {
            LabError::PrecisionExhausted { step: None } => {
                LabError::PrecisionExhausted { step: Some(n) }
            }
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
