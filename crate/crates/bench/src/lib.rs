//! Shared fixtures for the criterion benches.

use jcpulse_core::dynamics::{EvolveOptions, Evolver, TimeGrid};
use jcpulse_core::optimize::CostModel;
use jcpulse_core::pulse::{calibrate_pi_amplitude, PulseTrain};
use jcpulse_core::quantum::{build_space, coherent_excited_state, StateVector, SystemParams};
use num_complex::Complex64 as C64;

/// Fifteen well-separated centers on the standard window.
pub const SPREAD_CENTERS: [f64; 15] = [0.3, 0.9, 1.5, 2.1, 2.7, 3.3, 3.9, 4.5, 5.1, 5.7, 6.3, 6.9, 7.5, 8.1, 8.7];

/// Initial `|e⟩|α⟩` with real `α = √alpha_squared`, its model and an empty
/// π-calibrated template at `gσ = 0.05`.
pub struct Fixture {
    pub params: SystemParams,
    pub state: StateVector,
    pub template: PulseTrain,
}

impl Fixture {
    pub fn new(alpha_squared: f64, n_max: usize) -> Self {
        let params = SystemParams::default().with_n_max(n_max);
        let state = coherent_excited_state(C64::new(alpha_squared.sqrt(), 0.0), build_space(n_max).expect("cutoff")).expect("state");
        let template =
            PulseTrain::empty(0.05, calibrate_pi_amplitude(0.05, 100.0).expect("amplitude"), 100.0, (0.0, 10.0)).expect("template");
        Self { params, state, template }
    }

    pub fn train(&self, pulses: usize) -> PulseTrain {
        self.template.with_centers(SPREAD_CENTERS[..pulses].to_vec()).expect("centers")
    }

    pub fn evolver(&self) -> Evolver {
        Evolver::new(self.params, TimeGrid::standard(), EvolveOptions::default()).expect("evolver")
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel::new(self.state.clone(), self.params, self.template.clone(), TimeGrid::standard(), EvolveOptions::default())
            .expect("model")
    }
}
