use thiserror::Error;

/// Errors raised by the algebra, simulation and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QauthError {
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("limit exceeded: {what} is {value}, limit is {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),

    #[error("invalid Pauli literal {literal:?}: {reason}")]
    PauliParse { literal: String, reason: String },

    #[error("invalid Clifford tableau: {0}")]
    InvalidTableau(String),

    #[error("unknown subsystem label {0:?}")]
    UnknownLabel(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not a projector (residual {0:e})")]
    NotProjector(f64),

    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("duplicate Pauli in allowed set: {0}")]
    DuplicatePauli(String),

    #[error("identity Pauli not allowed here")]
    IdentityPauli,

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("oracle disagreement in {check}: {residual:e} exceeds {tolerance:e}")]
    OracleDisagreement {
        check: String,
        residual: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, QauthError>;

pub(crate) fn ensure_size(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(QauthError::SizeMismatch { expected, actual })
    }
}
