use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolError {
    /// Inconsistent or unsupported flags.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A file parsed but does not follow its schema.
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] tcmm_core::Error),
}

impl ToolError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ToolError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for usage errors, 3 for I/O and format errors.
    pub fn exit_code(&self) -> u8 {
        use tcmm_core::Error as E;
        match self {
            ToolError::Usage(_) => 2,
            ToolError::Io { .. } | ToolError::Format(_) => 3,
            ToolError::Core(e) => match e {
                E::DimensionMismatch(_)
                | E::InputLength { .. }
                | E::EntryTooWide { .. }
                | E::MissingInput(_)
                | E::NotAdjacency
                | E::BadLabel(_)
                | E::InvalidStructure(_) => 3,
                _ => 2,
            },
        }
    }
}

impl From<serde_json::Error> for ToolError {
    fn from(e: serde_json::Error) -> Self {
        ToolError::Format(e.to_string())
    }
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
