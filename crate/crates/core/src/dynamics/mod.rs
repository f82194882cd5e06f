//! Time-dependent Schrödinger propagation of the driven Jaynes-Cummings model
//!
//! `H(t) = ω a†a + (ω₀/2) σ_z + (σ₋a† + σ₊a) + Ω(t) σ_x`
//!
//! The default propagator works in the frame rotating at the field frequency
//! `ω` for both subsystems, generated by `ω (a†a + σ_z/2)`. This is an exact
//! change of variables: what remains is the detuning `(ω₀-ω)/2 σ_z`, the
//! time-independent coupling, and the drive `Ω(t)(e^{iωt} σ₊ + e^{-iωt} σ₋)`
//! with its full carrier. States handed back to callers are always in the
//! lab frame. A direct lab-frame stepper is kept for cross-checks at small
//! cutoffs.

mod evolver;
mod stepper;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::StateVector;

pub use evolver::{evolve, Evolver};
pub(crate) use stepper::{DriveCache, DriveProfile, DriveReuse};

/// Pulses are switched off in the integrator beyond this many widths from
/// their center (relative envelope `e^{-32}`).
pub const DRIVE_CUTOFF_SIGMAS: f64 = 8.0;
/// Default allowed norm drift over one run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
/// Minimum number of integrator steps per carrier period.
pub const MIN_STEPS_PER_CARRIER_PERIOD: f64 = 20.0;

/// Fixed-step integration grid with a sampling stride.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub dt_step: f64,
    pub sample_stride: usize,
}

impl TimeGrid {
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_STRIDE: usize = 10;

    pub fn new(t_start: f64, t_end: f64, dt_step: f64, sample_stride: usize) -> Self {
        Self { t_start, t_end, dt_step, sample_stride }
    }

    /// `[0, 10]` with `dt = 0.001` sampled every `0.01`.
    pub fn standard() -> Self {
        Self::new(0.0, 10.0, Self::DEFAULT_DT, Self::DEFAULT_STRIDE)
    }

    /// Same window and sampling interval with the step halved.
    pub fn halved(&self) -> Self {
        Self::new(self.t_start, self.t_end, self.dt_step / 2.0, self.sample_stride * 2)
    }

    pub fn steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt_step).round() as usize
    }

    pub fn time_of_step(&self, step: usize) -> f64 {
        self.t_start + step as f64 * self.dt_step
    }

    /// Step indices at which samples are recorded; both endpoints included.
    pub fn sample_steps(&self) -> Vec<usize> {
        let n = self.steps();
        let mut v: Vec<usize> = (0..=n).step_by(self.sample_stride.max(1)).collect();
        if *v.last().unwrap() != n {
            v.push(n);
        }
        v
    }

    pub fn sample_times(&self) -> Vec<f64> {
        self.sample_steps().into_iter().map(|s| self.time_of_step(s)).collect()
    }

    /// Validates the grid against the carrier frequency.
    pub fn validate(&self, omegap: f64) -> Result<()> {
        let span = self.t_end - self.t_start;
        if !(self.t_start.is_finite() && self.t_end.is_finite() && span > 0.0) {
            return Err(Error::InvalidGrid(format!("empty window [{}, {}]", self.t_start, self.t_end)));
        }
        if !(self.dt_step.is_finite() && self.dt_step > 0.0) {
            return Err(Error::InvalidGrid(format!("dt_step must be positive, got {}", self.dt_step)));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidGrid("sample_stride must be >= 1".into()));
        }
        let n = span / self.dt_step;
        if (n - n.round()).abs() > 1e-6 {
            return Err(Error::InvalidGrid(format!("window length {span} is not a multiple of dt_step {}", self.dt_step)));
        }
        if omegap.abs() > 0.0 {
            let limit = 2.0 * std::f64::consts::PI / omegap.abs() / MIN_STEPS_PER_CARRIER_PERIOD;
            if self.dt_step > limit {
                return Err(Error::InvalidGrid(format!(
                    "dt_step {} exceeds {limit:.6} ({MIN_STEPS_PER_CARRIER_PERIOD} steps per carrier period)",
                    self.dt_step
                )));
            }
        }
        Ok(())
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::standard()
    }
}

/// Which equation of motion is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    /// Frame rotating at `ω`; see the module docs.
    #[default]
    CoRotating,
    /// The lab-frame Hamiltonian as written. Needs `dt·ω·n_max ≪ 1`.
    Direct,
}

/// Stepper used while a pulse is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Fourth-order symmetric splitting of the exact doublet rotation and
    /// the exact two-level drive propagator. Unitary to rounding.
    #[default]
    Split4,
    /// Classic fixed-step fourth-order Runge-Kutta.
    Rk4,
}

/// Frame in which the field quadrature `X = (a + a†)/2` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureFrame {
    /// Field quadrature in the frame rotating at `ω` (slowly varying).
    #[default]
    Rotating,
    /// Lab-frame quadrature, oscillating at `2ω`.
    Lab,
}

/// How stretches without any active pulse are propagated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeSegments {
    /// Closed-form rotation inside each excitation doublet.
    #[default]
    Exact,
    /// Step through them with the integrator.
    Integrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    #[serde(default)]
    pub propagator: Propagator,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default)]
    pub quadrature_frame: QuadratureFrame,
    #[serde(default)]
    pub free_segments: FreeSegments,
    /// Largest tolerated change of the norm over one run.
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
}

fn default_norm_tolerance() -> f64 {
    NORM_DRIFT_LIMIT
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            propagator: Propagator::default(),
            integrator: Integrator::default(),
            quadrature_frame: QuadratureFrame::default(),
            free_segments: FreeSegments::default(),
            norm_tolerance: NORM_DRIFT_LIMIT,
        }
    }
}

impl EvolveOptions {
    /// Classic RK4 on every step, the reference configuration.
    pub fn rk4_everywhere() -> Self {
        Self { integrator: Integrator::Rk4, free_segments: FreeSegments::Integrate, ..Self::default() }
    }

    /// Direct lab-frame RK4 (validation path).
    pub fn direct() -> Self {
        Self { propagator: Propagator::Direct, ..Self::rk4_everywhere() }
    }

    pub fn with_norm_tolerance(self, norm_tolerance: f64) -> Self {
        Self { norm_tolerance, ..self }
    }
}

/// Sampled `ΔX²(t)` over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationTrace {
    pub times: Vec<f64>,
    pub var_x: Vec<f64>,
    pub final_state: StateVector,
}

impl FluctuationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `gt,var_x`; values use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 32);
        out.push_str("gt,var_x\n");
        for (t, v) in self.times.iter().zip(&self.var_x) {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }

    pub fn min_fluctuation(&self) -> Result<(f64, f64)> {
        min_fluctuation(self)
    }
}

/// Parses the `gt,var_x` CSV written by [`FluctuationTrace::to_csv`].
pub fn parse_trace_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some("gt,var_x") => {}
        other => return Err(Error::InvalidArgument(format!("unexpected trace header {other:?}"))),
    }
    let mut times = Vec::new();
    let mut vars = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let (t, v) = line.split_once(',').ok_or_else(|| Error::InvalidArgument(format!("malformed trace row {line:?}")))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::InvalidArgument(format!("{s:?}: {e}")));
        times.push(parse(t)?);
        vars.push(parse(v)?);
    }
    Ok((times, vars))
}

/// Earliest sample attaining the minimum `ΔX²`.
pub fn min_fluctuation(trace: &FluctuationTrace) -> Result<(f64, f64)> {
    argmin_first(&trace.var_x)
        .map(|i| (trace.times[i], trace.var_x[i]))
        .ok_or_else(|| Error::InvalidArgument("empty fluctuation trace".into()))
}

/// Index of the first minimum; `None` for an empty slice.
pub(crate) fn argmin_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if v >= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseTrain;
    use crate::quantum::{build_space, coherent_excited_state, Qubit, SystemParams};
    use num_complex::Complex64 as C64;

    fn empty_train() -> PulseTrain {
        PulseTrain::empty(0.05, 25.0, 100.0, (0.0, 10.0)).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::standard().validate(100.0).is_ok());
        assert!(TimeGrid::new(0.0, 10.0, 0.004, 1).validate(100.0).is_err());
        assert!(TimeGrid::new(0.0, 10.0, 0.003, 1).validate(100.0).is_err());
        assert!(TimeGrid::new(0.0, 10.0, 0.0025, 4).validate(100.0).is_ok());
        assert!(TimeGrid::new(0.0, 0.0, 0.001, 1).validate(100.0).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0.001, 0).validate(100.0).is_err());
        let g = TimeGrid::standard();
        assert_eq!(g.steps(), 10_000);
        assert_eq!(g.sample_steps().len(), 1001);
        assert_eq!(*g.sample_steps().last().unwrap(), 10_000);
        let odd = TimeGrid::new(0.0, 1.0, 0.001, 300);
        assert_eq!(odd.sample_steps(), vec![0, 300, 600, 900, 1000]);
    }

    #[test]
    fn min_fluctuation_tie_break() {
        let space = build_space(1).unwrap();
        let s = StateVector::basis(space, Qubit::Ground, 0);
        let flat = FluctuationTrace { times: vec![0.0, 1.0, 2.0], var_x: vec![0.25; 3], final_state: s.clone() };
        assert_eq!(min_fluctuation(&flat).unwrap(), (0.0, 0.25));
        let t = FluctuationTrace { times: vec![0.0, 1.0, 2.0], var_x: vec![0.25, 0.10, 0.20], final_state: s.clone() };
        assert_eq!(min_fluctuation(&t).unwrap(), (1.0, 0.10));
        let e = FluctuationTrace { times: vec![], var_x: vec![], final_state: s };
        assert!(matches!(min_fluctuation(&e), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn vacuum_rabi_oscillation() {
        let params = SystemParams::default().with_n_max(4);
        let ev = Evolver::new(params, TimeGrid::new(0.0, 10.0, 1e-3, 10), EvolveOptions::rk4_everywhere()).unwrap();
        let s0 = StateVector::basis(ev.space(), Qubit::Excited, 0);
        for (t, s) in ev.sample_states(&s0, &empty_train()).unwrap() {
            assert!((s.excited_population() - t.cos().powi(2)).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let params = SystemParams::default().with_n_max(20);
        let grid = TimeGrid::new(0.0, 1.0, 1e-3, 100);
        let s0 = coherent_excited_state(C64::new(1.0, 0.0), build_space(20).unwrap()).unwrap();
        let trace = evolve(&s0, &params, &empty_train(), &grid, EvolveOptions::default()).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("gt,var_x\n"));
        let (t, v) = parse_trace_csv(&csv).unwrap();
        assert_eq!(t, trace.times);
        assert_eq!(v, trace.var_x);
    }

    #[test]
    fn rejects_mismatched_state() {
        let params = SystemParams::default().with_n_max(10);
        let ev = Evolver::new(params, TimeGrid::standard(), EvolveOptions::default()).unwrap();
        let s = StateVector::basis(build_space(5).unwrap(), Qubit::Excited, 0);
        assert!(ev.evolve(&s, &empty_train()).is_err());
    }

    #[test]
    fn cutoff_violation_detected() {
        // all weight in the top tenth of the ladder
        let params = SystemParams::default().with_n_max(9);
        let space = build_space(9).unwrap();
        let mut amps = ndarray::Array1::zeros(space.dim());
        amps[space.index(Qubit::Excited, 8)] = C64::new(1.0, 0.0);
        let s0 = StateVector::from_amplitudes(space, amps).unwrap();
        let r = evolve(&s0, &params, &empty_train(), &TimeGrid::new(0.0, 1.0, 1e-3, 10), EvolveOptions::default());
        assert!(matches!(r, Err(Error::CutoffTooSmall { .. })));
    }
}
