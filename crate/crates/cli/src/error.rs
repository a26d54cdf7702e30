use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: parse error at byte {offset}: {message}")]
    Parse {
        path: String,
        offset: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    InvalidInput { path: String, message: String },
    #[error("dimension mismatch: {what} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Core(#[from] quasiherm_core::Error),
}

impl CliError {
    pub fn qualified_name(&self) -> String {
        match self {
            CliError::Parse { .. } => "cli::ParseError".into(),
            CliError::Io { .. } => "cli::Io".into(),
            CliError::InvalidInput { .. } => "cli::InvalidInput".into(),
            CliError::DimensionMismatch { .. } => "cli::DimensionMismatch".into(),
            CliError::InvalidGrid(_) => "cli::InvalidGrid".into(),
            CliError::InvalidArgument(_) => "cli::InvalidArgument".into(),
            CliError::Core(e) => e.qualified_name(),
        }
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })*
    };
}

from_core!(
    quasiherm_core::KernelError,
    quasiherm_core::BiorthoError,
    quasiherm_core::KreinError,
    quasiherm_core::MetricError,
    quasiherm_core::DysonError,
    quasiherm_core::DynamicsError,
    quasiherm_core::ModelError
);
