use std::fmt;

use thiserror::Error;

/// A single broken invariant, named by its dotted parameter path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub requirement: String,
}

impl Violation {
    pub fn new(field: &'static str, requirement: impl Into<String>) -> Self {
        Self {
            field,
            requirement: requirement.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} must be {}", self.field, self.requirement)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Every violated invariant, not just the first one found.
    #[error("invalid scenario: {}", join(.0))]
    Validation(Vec<Violation>),

    #[error("{quantity} out of domain: {reason}")]
    Domain {
        quantity: &'static str,
        reason: String,
    },

    #[error("modulation index {index} exceeds the first-order cap {cap}; use transmitted_power_series with an explicit large-index model instead")]
    IndexTooLarge { index: f64, cap: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            reason: reason.into(),
        }
    }

    /// Configuration and validation problems, as opposed to numeric failures.
    pub fn is_config_class(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
