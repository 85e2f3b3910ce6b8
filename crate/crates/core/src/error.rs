use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("`{name}` = {value} is outside the domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("strategy does not match the scenario: {0}")]
    StrategyMismatch(String),

    #[error("shadow value has not been resolved for a constrained scenario")]
    UnresolvedShadow,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("shadow solver failed: {0}")]
    SolverFailure(String),
}

impl Error {
    /// Whether the error stems from user input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::SolverFailure(_))
    }

    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::OutOfDomain {
            name,
            value,
            domain,
        }
    }
}
