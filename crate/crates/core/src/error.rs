//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot invert a series whose constant term is zero")]
    InvertNonUnit,

    #[error("series truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("division by zero")]
    DivByZero,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix truncation too small: need at least {needed}, have {have}")]
    TruncationTooSmall { needed: usize, have: usize },

    #[error("matrix band {lo}..={hi} exceeds the requested degree bound {max_deg}")]
    NotBanded { lo: isize, hi: isize, max_deg: usize },

    #[error("operator does not have certified finite support")]
    NotFinite,

    #[error("element ordering incompatible with the requested operation")]
    OrderIncompatible,

    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),

    #[error("re-expansion solve is inconsistent: {0}")]
    SolveInconsistent(String),

    #[error("kernel projection disagrees with the Gram projection: {0}")]
    MismatchWithGram(String),

    #[error("the two kernel computations disagree: {0}")]
    FactorizationMismatch(String),

    #[error("no derivative convention matches the operator route:\n{0}")]
    NoConventionMatches(String),

    #[error("several derivative conventions match the operator route: {0}")]
    AmbiguousConvention(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
