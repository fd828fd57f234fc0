use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Invariant,
    Internal,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Input => 2,
            ErrorCategory::Invariant => 3,
            ErrorCategory::Internal => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Input => "input",
            ErrorCategory::Invariant => "invariant",
            ErrorCategory::Internal => "internal",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid arithmetic: non-finite value {0}")]
    InvalidArithmetic(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("mask selects no pixels")]
    DegenerateRegion,

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("missing frame index {index} in {dir}")]
    MissingFrame { index: usize, dir: PathBuf },

    #[error("lossy frame source rejected: {0}")]
    LossySource(PathBuf),

    #[error("expected {expected} frames in {dir}, found {found}")]
    FrameCount {
        expected: usize,
        found: usize,
        dir: PathBuf,
    },

    #[error("bad tensor magic {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported tensor version {0}")]
    UnsupportedVersion(u8),

    #[error("unknown tensor dtype code {0}")]
    UnknownDtype(u8),

    #[error("tensor payload length mismatch: expected {expected} bytes, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("tensor dtype mismatch: expected {expected}, found {found}")]
    DtypeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("metrics table error: {0}")]
    Table(String),

    #[error("every averaged column is constant; nothing to normalize")]
    DegenerateNormalization,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidArithmetic(_)
            | Error::DegenerateRegion
            | Error::DegenerateNormalization => ErrorCategory::Invariant,
            Error::Json(_) => ErrorCategory::Internal,
            Error::Io { source, .. } if source.kind() != std::io::ErrorKind::NotFound => {
                ErrorCategory::Internal
            }
            _ => ErrorCategory::Input,
        }
    }
}
