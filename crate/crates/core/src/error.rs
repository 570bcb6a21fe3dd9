use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced at the library boundary.
///
/// Shape mismatches inside the autodiff tape are programming errors and
/// panic instead; everything reachable from user data or configuration
/// comes through here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("ingest error: missing column {0}")]
    MissingColumn(String),

    #[error("labeling error for cell {cell}: {reason}")]
    Labeling { cell: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{0} scores not available for architecture {1}")]
    ScoresNotAvailable(&'static str, String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn ingest(msg: impl Into<String>) -> Self {
        Error::Ingest(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
