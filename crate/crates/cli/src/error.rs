use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments; nothing was simulated.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] jcpulse_core::Error),

    /// Artifacts were written but the search stopped before its tolerance.
    #[error("search did not converge within max_sweeps; artifacts written to {0}")]
    NotConverged(PathBuf),
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation { field: field.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit status: 2 validation, 3 non-converged, 4 numeric
    /// invariant, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use jcpulse_core::Error as E;
        match self {
            CliError::Validation { .. } | CliError::Parse { .. } => 2,
            CliError::NotConverged(_) => 3,
            CliError::Core(E::Numeric(_) | E::CutoffTooSmall { .. }) => 4,
            CliError::Core(E::InvalidArgument(_) | E::InvalidGrid(_) | E::InvalidState(_) | E::Regime(_) | E::Unsupported(_)) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
