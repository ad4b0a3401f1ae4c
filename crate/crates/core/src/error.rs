use thiserror::Error;

/// Errors produced by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("loss of accuracy evaluating {what}: estimated relative error {estimate:e}")]
    LossOfAccuracy { what: String, estimate: f64 },

    #[error("linear solver failed: {reason} (condition estimate {condition_estimate:e})")]
    Solver {
        reason: String,
        condition_estimate: f64,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("conjugate symmetry violated: max |Im| = {max_imag:e} exceeds bound {bound:e}")]
    Symmetry { max_imag: f64, bound: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
