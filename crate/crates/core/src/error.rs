use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the watermarking pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A netpbm file could not be parsed; `field` names the offending part.
    #[error("malformed {field}: {message}")]
    Format {
        field: &'static str,
        message: String,
    },

    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),

    #[error("watermark must be 16×16, got {width}×{height}")]
    WatermarkSize { width: usize, height: usize },

    #[error("I/O error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Image dimensions incompatible with the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Pyramids, tallies or detectors that do not fit together.
    #[error("structure error: {0}")]
    Structure(String),

    /// Invalid embedding configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Unknown attack kind or invalid attack parameters.
    #[error("invalid attack spec: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn format(field: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
