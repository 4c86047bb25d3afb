use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: pwflow::Error },

    #[error("{}: row {row}, column {column}: {reason}", path.display())]
    Csv {
        path: PathBuf,
        row: usize,
        column: usize,
        reason: String,
    },

    #[error(transparent)]
    Library(#[from] pwflow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Usage(_) => 1,
            Self::Input { .. } | Self::Csv { .. } => 2,
            Self::Library(e) => library_code(e),
        })
    }
}

fn library_code(e: &pwflow::Error) -> u8 {
    use pwflow::Error::*;
    match e {
        InvalidParameter { .. } | UnsupportedDirection(..) => 1,
        NonFinite { .. } | InvalidPartition { .. } => 3,
        _ => 2,
    }
}

/// Attaches the offending path to file-level failures.
pub trait WithPath<T> {
    fn at(self, path: &Path) -> Result<T, CliError>;
}

impl<T> WithPath<T> for pwflow::Result<T> {
    fn at(self, path: &Path) -> Result<T, CliError> {
        self.map_err(|source| match source {
            e @ (pwflow::Error::Io(_) | pwflow::Error::Image(_)) => CliError::Input {
                path: path.to_path_buf(),
                source: e,
            },
            e => CliError::Library(e),
        })
    }
}
