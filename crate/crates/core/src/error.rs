use thiserror::Error;

use crate::order::Sort;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order is not antisymmetric: `{0}` and `{1}` lie below each other")]
    NotAntisymmetric(String, String),

    #[error("sort {sort} has {size} elements, the cap is {cap}")]
    CarrierTooLarge { sort: Sort, size: usize, cap: usize },

    #[error("duplicate element name `{0}`")]
    DuplicateName(String),

    #[error("sort mismatch: {0}")]
    SortMismatch(String),

    #[error("map is not monotone: `{0}` <= `{1}` but their images are unordered")]
    NotMonotone(String, String),

    #[error("map is not surjective: `{0}` has no preimage")]
    NotSurjective(String),

    #[error("no factorisation: `{left}` <= `{right}` in the kernel of f but not of g")]
    NoFactorisation { left: String, right: String },

    #[error("not a congruence ordering: {0}")]
    NotCongruence(String),

    #[error("algebra laws violated: {0}")]
    LawViolation(String),

    #[error("set is not upward closed: `{0}` is missing")]
    NotUpwardClosed(String),

    #[error("language is not recognised by the syntactic morphism: {0}")]
    NotRecognised(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("deciders disagree: {0}")]
    Disagreement(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
