use thiserror::Error;

use crate::model::MatchingViolation;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by parsing, validation, and the exhaustive operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Input text is not valid JSON.
    #[error("malformed JSON: {0}")]
    Json(String),

    /// A field of an input document or constructed value is invalid.
    /// `path` locates the offending field (for example `agents[2].weight`).
    #[error("invalid input at {path}: {message}")]
    Invalid { path: String, message: String },

    /// A matching offered as input breaks a problem invariant.
    #[error("invalid matching: {0}")]
    Matching(MatchingViolation),

    /// An exhaustive operation would exceed its configured cap.
    #[error("resource cap exceeded: {what} needs {needed}, limit is {limit}")]
    Resource {
        what: &'static str,
        needed: u64,
        limit: u64,
    },

    /// An operation's precondition does not hold for the given arguments.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn resource(what: &'static str, needed: u64, limit: u64) -> Self {
        Error::Resource {
            what,
            needed,
            limit,
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}
