use thiserror::Error;

/// Errors reported by the evaluators.
///
/// Divergence is an explicit value rather than an infinity so that callers
/// cannot silently feed it into further quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "divergent: the entropy of order {order} is infinite \
         (the left tail makes the integral of F^(1+s) diverge for s <= {threshold})"
    )]
    Divergent { order: f64, threshold: f64 },

    #[error("not integrable: {0}")]
    NonIntegrable(String),

    #[error("series truncation did not converge after {terms} terms (tail estimate {tail:e})")]
    TruncationNotConverged { terms: usize, tail: f64 },

    #[error("{0} did not converge")]
    NotConverged(String),

    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
