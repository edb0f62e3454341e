use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `gcd(c, d) > 1` where coprime arguments are required.
    #[error("arguments not coprime: gcd({c}, {d}) = {gcd}")]
    NotCoprime { c: String, d: String, gcd: String },

    /// `-1` lies in a subgroup where the mean square formula requires `-1 ∉ H`.
    #[error("-1 belongs to the subgroup of modulus {0}")]
    MinusOneInSubgroup(u64),

    /// A proven identity failed to hold; this indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// A floating point evaluation could not certify its result.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// Malformed text input (rational literals, checkpoints, record files).
    #[error("parse error: {0}")]
    Parse(String),

    /// A checkpoint does not belong to the requested scan.
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
