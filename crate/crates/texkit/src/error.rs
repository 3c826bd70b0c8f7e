use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Filesystem failure, tagged with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Unreadable or structurally invalid file content (images, tables,
    /// manifests, model containers).
    #[error("{0}")]
    Format(String),

    /// A caller-supplied argument or configuration value is out of range.
    /// These map to usage errors (exit code 2) in the CLI.
    #[error("{0}")]
    Invalid(String),

    /// Data violates a processing precondition: empty regions, degenerate
    /// clusters, classes too small for a split, duplicate entries.
    #[error("{0}")]
    Data(String),

    /// Numeric failure while fitting a model.
    #[error("{0}")]
    Training(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// True for errors the CLI should report as usage problems (exit 2)
    /// rather than data or processing failures (exit 1).
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Invalid(_))
    }
}
