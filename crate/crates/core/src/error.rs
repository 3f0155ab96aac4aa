//! Error type shared across the pipeline stages.

use std::path::PathBuf;

/// Errors produced by any pipeline stage.
///
/// Variants are grouped by the kind of failure so callers (notably the CLI)
/// can map them to exit codes without string matching.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A file or stream had the wrong shape or content.
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// Bin calibration could not proceed.
    #[error("calibration error: {0}")]
    Calibration(String),

    /// Shortlist model training failed.
    #[error("training error: {0}")]
    Training(String),

    /// Exemplar selection failed.
    #[error("selection error: {0}")]
    Selection(String),

    /// Prompt assembly failed.
    #[error("prompt assembly error: {0}")]
    Assembly(String),

    /// Feature quantization failed.
    #[error("quantization error: feature `{feature}`: {reason}")]
    Quantization { feature: String, reason: String },

    /// The remote endpoint could not be reached or kept failing.
    #[error("transport error after {attempts} attempt(s): {reason}")]
    Transport { attempts: u32, reason: String },

    /// Filesystem failure, annotated with the path involved.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefix the failing query's id onto the message, keeping the variant
    /// so exit-code mapping still sees the original failure kind.
    pub fn with_query(self, query_id: &str) -> Self {
        let tag = |reason: String| format!("query `{query_id}`: {reason}");
        match self {
            Error::InvalidArgument(r) => Error::InvalidArgument(tag(r)),
            Error::Calibration(r) => Error::Calibration(tag(r)),
            Error::Training(r) => Error::Training(tag(r)),
            Error::Selection(r) => Error::Selection(tag(r)),
            Error::Assembly(r) => Error::Assembly(tag(r)),
            Error::Quantization { feature, reason } => Error::Quantization {
                feature,
                reason: tag(reason),
            },
            Error::Transport { attempts, reason } => Error::Transport {
                attempts,
                reason: tag(reason),
            },
            // Path-carrying variants already identify the query's file.
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
