use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Support violations in divergence computations are usually reported as
/// values (`f64::INFINITY`); the [`Error::SupportViolation`] variant is only
/// used where a finite answer is required (variances, third moments).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("support condition violated: {0}")]
    SupportViolation(String),

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("dimension budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: String,
        needed: usize,
        limit: usize,
    },

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
