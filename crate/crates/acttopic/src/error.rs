use std::io;
use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{source_name}:{line}: {message}")]
    Format {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] acttopic_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("write failed: {0}")]
    Write(#[from] io::Error),
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}
