use thiserror::Error;

pub type Result<T> = std::result::Result<T, RtfError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RtfError {
    #[error("norm overflows u64; use log_norm instead")]
    NormOverflow,

    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: String },

    #[error("{what}: value {value} outside its domain")]
    Domain { what: &'static str, value: String },

    #[error("place {0} lies in the support of the conductor of eta")]
    RamifiedOverlap(String),

    #[error("character mod {0} is not primitive")]
    NonPrimitive(u64),

    #[error("trivial character has a pole at s = 1")]
    TrivialCharacter,

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("stencil widths disagree on {quantity} by {difference:e} (limit {limit:e})")]
    StencilDisagreement {
        quantity: &'static str,
        difference: f64,
        limit: f64,
    },

    #[error("enumeration needs {count} assignments, cap is {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("{0} does not divide {1}")]
    Divisibility(String, String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl RtfError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        RtfError::Invalid(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        RtfError::Parse(msg.into())
    }

    /// Errors caused by the arithmetic rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            RtfError::NormOverflow
                | RtfError::Pole { .. }
                | RtfError::NonConvergence { .. }
                | RtfError::StencilDisagreement { .. }
                | RtfError::CapExceeded { .. }
        )
    }
}
