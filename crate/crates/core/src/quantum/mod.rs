//! Hilbert space, operators, states and closed-form references for the
//! Jaynes-Cummings system in units `ℏ = g = 1`.

mod analytic;
mod operators;
mod space;
mod state;

pub use analytic::{analytic_branches, analytic_jc_evolution};
pub use operators::{drive_operator, jc_hamiltonian, OperatorMatrix};
pub use space::{build_space, HilbertSpace, Qubit, SystemParams};
pub use state::{
    coherent_amplitudes, coherent_excited_state, partial_trace_qubit, poisson_tail, quadrature_variance, required_cutoff, tail_levels,
    FieldDensityMatrix, FieldMoments, StateVector, COHERENT_TAIL_LIMIT, TAIL_WEIGHT_LIMIT,
};

/// Shot-noise variance of `X = (a + a†)/2`.
pub const SHOT_NOISE: f64 = 0.25;
