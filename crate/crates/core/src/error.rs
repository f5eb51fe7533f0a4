use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} exceeds the limit {max}")]
    Size {
        what: &'static str,
        value: u64,
        max: u64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} outside table range 1..={limit}")]
    Index { index: u64, limit: u64 },

    #[error("state error: {0}")]
    State(&'static str),

    #[error("configuration error in {field}: {detail}")]
    Config { field: &'static str, detail: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid sieve cache: {0}")]
    Cache(String),

    /// Two independent routes to the same quantity disagreed.
    #[error("cross-check failed: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
