//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants map onto the CLI exit-code contract: anything except
/// [`Error::Numerical`] is an input problem (exit 1), `Numerical` signals a
/// failed computation (exit 3).
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An enumeration request above the configured cap.
    #[error("{what}: n = {n} exceeds the enumeration cap {cap}")]
    CapacityExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    /// Operation not defined for this chaos kind.
    #[error("unsupported for {kind} chaos: {what}")]
    UnsupportedKind {
        kind: crate::spectral::ChaosKind,
        what: &'static str,
    },

    /// A mathematical hypothesis of the criterion does not hold for the input.
    #[error("precondition failed: {hypothesis} ({detail})")]
    PreconditionFailed { hypothesis: String, detail: String },

    /// A numerical procedure failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(hypothesis: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::PreconditionFailed {
            hypothesis: hypothesis.into(),
            detail: detail.into(),
        }
    }
}
