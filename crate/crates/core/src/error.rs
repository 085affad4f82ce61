//! Error types shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, diagonalization, and measurement routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented constraint.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical tolerance was exceeded; the message carries the residual.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An operator expected to commute with chain reflection does not.
    #[error("symmetry violation: {0}")]
    Symmetry(String),

    /// Reading or writing a cache file failed.
    #[error("cache i/o at {path}: {source}")]
    CacheIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A cache file exists but its contents are not understood.
    #[error("cache format at {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },
}
