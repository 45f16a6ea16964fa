use thiserror::Error;

/// Errors produced by the tiling library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The simplex method could not certify a result within its tolerances
    /// or iteration cap.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("branch-and-bound node limit of {limit} exceeded")]
    NodeLimit { limit: u64 },

    /// An exhaustive search would need more candidates than its guard allows.
    #[error("{what}: {count} candidates exceed the limit of {limit}")]
    Budget {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by malformed input rather than by the solver or
    /// a resource guard.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
