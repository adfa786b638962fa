use std::fmt;
use std::path::{Path, PathBuf};

use sentishift_core::{Error as CoreError, ErrorKind};

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: no feature bundle at {}; run `features train` first", path.display())]
    MissingBundle { stage: &'static str, path: PathBuf },
    #[error("{stage}: no estimated model at {}; run `econ vecm` first", path.display())]
    MissingModel { stage: &'static str, path: PathBuf },
    #[error("{stage}: missing input {}; {hint}", path.display())]
    MissingInput {
        stage: &'static str,
        path: PathBuf,
        hint: String,
    },
    #[error("{stage}: {message}")]
    Data { stage: &'static str, message: String },
    #[error("{stage}: {}{message}", Location(.path, .line))]
    Format {
        stage: &'static str,
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },
    #[error("{stage}: {}{source}", Location(.path, &None))]
    Core {
        stage: &'static str,
        path: Option<PathBuf>,
        source: CoreError,
    },
    #[error("{stage}: {}: {source}", .path.display())]
    Io {
        stage: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
}

struct Location<'a, P>(&'a P, &'a Option<usize>);

impl<P: OptionalPath> fmt::Display for Location<'_, P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.0.path() {
            write!(f, "{}", p.display())?;
            if let Some(l) = self.1 {
                write!(f, ":{l}")?;
            }
            write!(f, ": ")?;
        }
        Ok(())
    }
}

trait OptionalPath {
    fn path(&self) -> Option<&Path>;
}

impl OptionalPath for PathBuf {
    fn path(&self) -> Option<&Path> {
        Some(self)
    }
}

impl OptionalPath for Option<PathBuf> {
    fn path(&self) -> Option<&Path> {
        self.as_deref()
    }
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::MissingBundle { .. }
            | CliError::MissingModel { .. }
            | CliError::MissingInput { .. } => EXIT_CONFIG,
            CliError::Format { .. } | CliError::Io { .. } | CliError::Data { .. } => EXIT_DATA,
            CliError::Core { source, .. } => match source {
                CoreError::InvalidConfig(_) | CoreError::InvalidSpec(_) => EXIT_CONFIG,
                e => match e.kind() {
                    ErrorKind::Data => EXIT_DATA,
                    ErrorKind::Numerical => EXIT_NUMERICAL,
                },
            },
        }
    }

    pub fn format(stage: &'static str, path: &Path, line: Option<usize>, message: impl Into<String>) -> Self {
        CliError::Format {
            stage,
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn io(stage: &'static str, path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            stage,
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Attaches a stage name (and optionally the input path) to core errors.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
    fn stage_at(self, stage: &'static str, path: &Path) -> Result<T>;
}

impl<T> StageContext<T> for std::result::Result<T, CoreError> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| CliError::Core {
            stage,
            path: None,
            source,
        })
    }

    fn stage_at(self, stage: &'static str, path: &Path) -> Result<T> {
        self.map_err(|source| CliError::Core {
            stage,
            path: Some(path.to_path_buf()),
            source,
        })
    }
}
