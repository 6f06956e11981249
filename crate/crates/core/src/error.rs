use thiserror::Error;

/// Crate-wide error. The variants line up with CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("cutoff overflow: {0}")]
    Cutoff(String),
    #[error("math failure: {0}")]
    Math(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(s: impl Into<String>) -> Self {
        Error::Input(s.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(e.to_string())
    }
}
