use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arithmetic outside the domain of an operation, e.g. inverting zero.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("construction failed: {0}")]
    Construction(String),
    /// An internal invariant did not hold; indicates a bug or a corrupted input.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("completeness audit failed: {0}")]
    Completeness(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
