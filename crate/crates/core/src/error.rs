//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by samplers, planners, bound calculators and oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside its documented domain (e.g. a nonpositive precision).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A mathematical precondition of a formula is violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The potential or configuration lacks a capability the operation needs.
    #[error("missing capability: {0}")]
    Capability(String),

    /// A tuning recipe produced parameters violating a theorem precondition.
    #[error("infeasible plan: constraint `{constraint}` violated ({detail})")]
    Infeasible { constraint: String, detail: String },

    /// The requested algorithm/metric pair has no tabulated complexity.
    #[error("unsupported combination: {0}")]
    Unsupported(String),

    /// A chain produced a non-finite state.
    #[error("divergence at step {step}: non-finite state (last finite state {last_state:?})")]
    Divergence { step: usize, last_state: Vec<f64> },

    /// The 4x4 kinetic noise covariance could not be factored, even after jitter.
    #[error("noise covariance degenerate for gamma={gamma}, h={h}")]
    NumericDegeneracy { gamma: f64, h: f64 },

    /// A quadrature or iterative routine failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An input exceeds a hard size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {value}")))
    }
}

pub(crate) fn ensure_nonnegative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be nonnegative and finite, got {value}")))
    }
}
