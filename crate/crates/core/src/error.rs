use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or semantically invalid input, with a location when known.
    #[error("input error: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    /// Two independent computations that must agree did not.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Pack generation could not certify its own output.
    #[error("generation error: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
