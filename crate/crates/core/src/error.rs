use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),

    /// A zero diagonal entry was met while building a reducing matrix.
    #[error("degenerate pivot in column {0}")]
    DegeneratePivot(usize),

    #[error("degenerate corner at column {0}")]
    DegenerateCorner(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
