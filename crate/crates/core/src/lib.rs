//! Simulation and pulse-time optimization for transient quadrature squeezing
//! in the Jaynes-Cummings model.

pub mod analysis;
pub mod circuitqed;
pub mod dynamics;
pub mod error;
pub mod optimize;
pub mod pulse;
pub mod quantum;

pub use error::{Error, Result};
