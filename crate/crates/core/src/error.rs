use thiserror::Error;

/// Errors raised by the simulation and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    /// The Fock cutoff cannot hold the state; `required` is a cutoff that would.
    #[error("Fock cutoff n_max={n_max} too small ({detail}); use n_max >= {required}")]
    CutoffTooSmall { n_max: usize, required: usize, detail: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A numerical invariant (norm, tail weight) failed during a run.
    #[error("numeric invariant violated: {0}")]
    Numeric(String),

    #[error("circuit outside the weak-coupling approximation: {0}")]
    Regime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
