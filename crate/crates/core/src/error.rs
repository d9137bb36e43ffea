use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("neatness violation: setwise stabilizer acts nontrivially on {0}")]
    Neatness(String),
    #[error("cone mismatch: {0}")]
    ConeMismatch(String),
    #[error("inconclusive truncation: {0}")]
    InconclusiveTruncation(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("undecided comparison: {0}")]
    Undecided(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
