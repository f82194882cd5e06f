//! Batch front-end: JSON run configs, optimization and replay drivers, and
//! the artifact files they leave behind.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod tables;

pub use commands::{cmd_circuit_map, cmd_compare, cmd_optimize, cmd_replay, cmd_wigner};
pub use config::{AmpMode, CompareEntry, RunConfig};
pub use error::{CliError, CliResult};
