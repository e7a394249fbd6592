use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rate exponent {exponent} exceeds the representable range (|e| <= {limit})")]
    RateOverflow { exponent: f64, limit: f64 },

    #[error("state is not valid for this loop: {0}")]
    InvalidState(String),

    #[error("operation requires k = {expected} types, got k = {got}")]
    UnsupportedTypeCount { expected: usize, got: usize },

    #[error(
        "state space of 2^{sites} configurations exceeds the enumeration guard (k*N <= {limit})"
    )]
    EnumerationGuard { sites: usize, limit: usize },

    #[error("absorbing state reached at t = {time}: total jump rate is zero")]
    AbsorbingState { time: f64 },

    #[error("step size underflow at t = {time} (h = {step:e})")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("non-finite state encountered at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("trajectory covers [{start}, {end}] but [0, {required}] is needed")]
    InsufficientCoverage { start: f64, end: f64, required: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "closed form and numerical evaluation disagree by {residual:e} (tolerance {tolerance:e})"
    )]
    ConsistencyCheck { residual: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
