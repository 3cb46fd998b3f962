use std::io;
use std::path::{Path, PathBuf};

use crate::formats::FormatError;
use crate::xml::ParseError;

/// Everything the command-line pipeline can fail with.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad invocation or configuration; exit code 1.
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Xml {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] namesake_core::Error),
}

impl AppError {
    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        AppError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn format(path: impl AsRef<Path>, source: FormatError) -> Self {
        match source {
            FormatError::Io(source) => AppError::io(path, source),
            source => AppError::Format {
                path: path.as_ref().to_path_buf(),
                source,
            },
        }
    }

    /// 1 for usage errors, 2 for anything wrong with the data or files.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
