//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by model validation, evaluators, simulators and solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A model or configuration parameter violates its constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation was requested outside the domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical guard tripped (overflow cap, non-finite value, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A time-stepping stability certificate was violated.
    #[error("stability violation: {0}")]
    Unstable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
