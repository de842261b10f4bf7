use std::io;
use std::path::{Path, PathBuf};

use flowcnn_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: no frames found", .0.display())]
    MissingFrames(PathBuf),
    #[error("{}: {reason}", path.display())]
    MalformedFile { path: PathBuf, reason: String },
    #[error("{}: frames have different dimensions", .0.display())]
    InconsistentDims(PathBuf),
    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for data and IO
    /// problems, 4 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Core(e) => match e {
                CoreError::NonFiniteLoss => 4,
                CoreError::ConfigInvalid(_)
                | CoreError::OddCount(_)
                | CoreError::KernelTooDeep { .. }
                | CoreError::PoolTooLarge
                | CoreError::ArchitectureUnderflow => 2,
                _ => 3,
            },
            _ => 3,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
        move |source| Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(path: &Path, reason: impl Into<String>) -> Error {
        Error::MalformedFile {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }
}
