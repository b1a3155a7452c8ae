use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: isac_fbl_core::Error,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: isac_fbl_core::Error,
    },
}

impl RunError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        RunError::Validation { field: field.into(), message: message.into() }
    }

    /// Wraps a library error, tagging it with the sweep point it came from.
    pub fn from_core(context: impl Into<String>, source: isac_fbl_core::Error) -> Self {
        let context = context.into();
        if source.is_numerical() {
            RunError::Numerical { context, source }
        } else {
            RunError::Core { context, source }
        }
    }

    /// Process exit status: 1 for input problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Numerical { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, RunError>;
