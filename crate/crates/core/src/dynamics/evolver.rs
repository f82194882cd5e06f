use num_complex::Complex64 as C64;

use super::stepper::{rk4_step, split_run, split_step, DriveProfile, DriveReuse, Kernel, Workspace};
use super::{EvolveOptions, FluctuationTrace, FreeSegments, Integrator, Propagator, QuadratureFrame, TimeGrid};
use crate::error::{Error, Result};
use crate::pulse::PulseTrain;
use crate::quantum::{
    build_space, partial_trace_qubit, tail_levels, FieldDensityMatrix, FieldMoments, HilbertSpace, StateVector, SystemParams,
    TAIL_WEIGHT_LIMIT,
};

/// Reusable propagator for one parameter set, grid and option set.
#[derive(Debug, Clone)]
pub struct Evolver {
    params: SystemParams,
    space: HilbertSpace,
    grid: TimeGrid,
    options: EvolveOptions,
    kernel: Kernel,
    sample_steps: Vec<usize>,
}

impl Evolver {
    pub fn new(params: SystemParams, grid: TimeGrid, options: EvolveOptions) -> Result<Self> {
        params.validate()?;
        grid.validate(params.omegap_over_g)?;
        let space = build_space(params.n_max)?;
        Ok(Self {
            kernel: Kernel::new(params.omega_over_g, params.omega0_over_g, params.n_max),
            sample_steps: grid.sample_steps(),
            params,
            space,
            grid,
            options,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn options(&self) -> EvolveOptions {
        self.options
    }

    /// Propagates `state0` (given at `t_start`) and records `ΔX²` at every sample.
    pub fn evolve(&self, state0: &StateVector, train: &PulseTrain) -> Result<FluctuationTrace> {
        let mut psi = self.initial(state0, train)?;
        let profile = DriveProfile::new(train);
        let mut var_x = Vec::with_capacity(self.sample_steps.len());
        var_x.push(self.variance(self.sample_steps[0], &psi));
        self.run(&mut psi, &profile, 0, |k, p| {
            var_x.push(self.variance(self.sample_steps[k], p));
            Ok(true)
        })?;
        let last = *self.sample_steps.last().unwrap();
        Ok(FluctuationTrace { times: self.grid.sample_times(), var_x, final_state: self.to_lab(psi, last) })
    }

    /// Lab-frame states at every sample time.
    pub fn sample_states(&self, state0: &StateVector, train: &PulseTrain) -> Result<Vec<(f64, StateVector)>> {
        let mut psi = self.initial(state0, train)?;
        let profile = DriveProfile::new(train);
        let mut out = Vec::with_capacity(self.sample_steps.len());
        out.push((self.grid.time_of_step(0), self.to_lab(psi.clone(), self.sample_steps[0])));
        self.run(&mut psi, &profile, 0, |k, p| {
            let s = self.sample_steps[k];
            out.push((self.grid.time_of_step(s), self.to_lab(p.to_vec(), s)));
            Ok(true)
        })?;
        Ok(out)
    }

    /// Lab-frame states at the requested times, each snapped to the nearest
    /// sample.
    pub fn states_at(&self, state0: &StateVector, train: &PulseTrain, times: &[f64]) -> Result<Vec<StateVector>> {
        let samples = self.sample_states(state0, train)?;
        let dt = self.grid.dt_step * self.grid.sample_stride as f64;
        times
            .iter()
            .map(|&t| {
                if !(t >= self.grid.t_start - 1e-12 && t <= self.grid.t_end + 1e-12) {
                    return Err(Error::InvalidArgument(format!("time {t} outside the grid window")));
                }
                let k = (((t - self.grid.t_start) / dt).round() as usize).min(samples.len() - 1);
                Ok(samples[k].1.clone())
            })
            .collect()
    }

    /// Propagates a lab-frame state from `t0` to `t1` in `steps` equal steps
    /// (backwards when `t1 < t0`).
    pub fn propagate(&self, state: &StateVector, train: &PulseTrain, t0: f64, t1: f64, steps: usize) -> Result<StateVector> {
        self.check_space(state)?;
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be >= 1".into()));
        }
        let profile = DriveProfile::new(train);
        let mut psi = self.to_working_at(state.as_slice(), t0);
        let mut ws = Workspace::new(psi.len());
        let h = (t1 - t0) / steps as f64;
        for j in 0..steps {
            self.step(&mut psi, &profile, t0 + j as f64 * h, h, &mut ws);
        }
        let mut out = psi;
        self.working_to_lab_at(&mut out, t1);
        Ok(StateVector::from_vec_unchecked(self.space, out))
    }

    /// Reduced field state of the lab-frame `state` at time `t`, expressed in
    /// the configured quadrature frame so that its `X` statistics match the
    /// recorded `ΔX²`.
    pub fn quadrature_field(&self, state: &StateVector, t: f64) -> FieldDensityMatrix {
        let rho = partial_trace_qubit(state);
        match self.options.quadrature_frame {
            QuadratureFrame::Lab => rho,
            QuadratureFrame::Rotating => rho.rotated(self.params.omega_over_g * t),
        }
    }

    /// Sample step indices (both window ends included).
    pub(crate) fn sample_steps(&self) -> &[usize] {
        &self.sample_steps
    }

    pub(crate) fn sample_time(&self, k: usize) -> f64 {
        self.grid.time_of_step(self.sample_steps[k])
    }

    /// Last sample whose history cannot be touched by a pulse centered at `tau`.
    pub(crate) fn last_sample_before(&self, tau: f64, reach: f64) -> usize {
        let limit = tau - reach - 2.0 * self.grid.dt_step;
        self.sample_steps.iter().rposition(|&s| self.grid.time_of_step(s) < limit).unwrap_or(0)
    }

    /// Validated initial state in the working frame.
    pub(crate) fn initial(&self, state0: &StateVector, train: &PulseTrain) -> Result<Vec<C64>> {
        self.check_space(state0)?;
        state0.check_normalized()?;
        train.validate()?;
        Ok(self.to_working_at(state0.as_slice(), self.grid.t_start))
    }

    /// `ΔX²` of a working-frame state at grid step `step`.
    pub(crate) fn variance(&self, step: usize, psi: &[C64]) -> f64 {
        let wt = self.params.omega_over_g * self.grid.time_of_step(step);
        let theta = match (self.options.propagator, self.options.quadrature_frame) {
            (Propagator::CoRotating, QuadratureFrame::Rotating) => 0.0,
            (Propagator::CoRotating, QuadratureFrame::Lab) => wt,
            (Propagator::Direct, QuadratureFrame::Lab) => 0.0,
            (Propagator::Direct, QuadratureFrame::Rotating) => -wt,
        };
        FieldMoments::of(psi).quadrature_variance_at(theta)
    }

    /// Advances the working-frame `psi`, currently at sample `from`, through
    /// every later sample. `visit(k, psi)` sees the state at sample `k` and
    /// may stop the run by returning `false`.
    pub(crate) fn run<F>(&self, psi: &mut [C64], profile: &DriveProfile, from: usize, visit: F) -> Result<()>
    where
        F: FnMut(usize, &[C64]) -> Result<bool>,
    {
        self.run_with(psi, profile, from, DriveReuse::Compute, visit)
    }

    /// [`Evolver::run`] with control over stored drive propagators.
    pub(crate) fn run_with<F>(
        &self,
        psi: &mut [C64],
        profile: &DriveProfile,
        from: usize,
        mut reuse: DriveReuse,
        mut visit: F,
    ) -> Result<()>
    where
        F: FnMut(usize, &[C64]) -> Result<bool>,
    {
        let norm0 = norm_sqr(psi).sqrt();
        let mut ws = Workspace::new(psi.len());
        let dt = self.grid.dt_step;
        let exact_free = self.exact_free();
        for k in from + 1..self.sample_steps.len() {
            let (sa, sb) = (self.sample_steps[k - 1], self.sample_steps[k]);
            let (ta, tb) = (self.grid.time_of_step(sa), self.grid.time_of_step(sb));
            if exact_free && profile.is_free(ta, tb) {
                ws.free_evolution(&self.kernel, psi, (sb - sa) as f64 * dt);
            } else if self.options.propagator == Propagator::CoRotating && self.options.integrator == Integrator::Split4 {
                let times: Vec<f64> = (sa..sb).map(|s| self.grid.time_of_step(s)).collect();
                let reuse = match &mut reuse {
                    DriveReuse::Compute => DriveReuse::Compute,
                    DriveReuse::Record(cache) => DriveReuse::Record(cache),
                    DriveReuse::Reuse { cache, lo, hi } => DriveReuse::Reuse { cache, lo: *lo, hi: *hi },
                };
                split_run(&self.kernel, psi, profile, sa, &times, dt, exact_free, &mut ws, reuse);
            } else {
                for s in sa..sb {
                    self.step(psi, profile, self.grid.time_of_step(s), dt, &mut ws);
                }
            }
            self.check_health(psi, norm0, tb)?;
            if !visit(k, psi)? {
                break;
            }
        }
        Ok(())
    }

    fn exact_free(&self) -> bool {
        self.options.propagator == Propagator::CoRotating && self.options.free_segments == FreeSegments::Exact
    }

    fn step(&self, psi: &mut [C64], profile: &DriveProfile, t: f64, h: f64, ws: &mut Workspace) {
        match self.options.propagator {
            Propagator::Direct => rk4_step(&self.kernel, true, psi, profile, t, h, ws),
            Propagator::CoRotating => {
                if self.exact_free() && profile.is_free(t, t + h) {
                    ws.free_evolution(&self.kernel, psi, h);
                } else {
                    match self.options.integrator {
                        Integrator::Split4 => split_step(&self.kernel, psi, profile, t, h, ws),
                        Integrator::Rk4 => rk4_step(&self.kernel, false, psi, profile, t, h, ws),
                    }
                }
            }
        }
    }

    fn check_health(&self, psi: &[C64], norm0: f64, t: f64) -> Result<()> {
        let norm = norm_sqr(psi).sqrt();
        if !norm.is_finite() || (norm - norm0).abs() > self.options.norm_tolerance {
            return Err(Error::Numeric(format!("norm drifted from {norm0} to {norm} by t = {t:.4}; reduce dt_step")));
        }
        let n_max = self.space.n_max();
        let first = n_max + 1 - tail_levels(n_max);
        let tail: f64 = psi[2 * first..].iter().map(|c| c.norm_sqr()).sum();
        if tail > TAIL_WEIGHT_LIMIT {
            return Err(Error::CutoffTooSmall {
                n_max,
                required: n_max + n_max / 2 + 10,
                detail: format!("population {tail:.3e} in levels n >= {first} at t = {t:.4}"),
            });
        }
        Ok(())
    }

    fn check_space(&self, state: &StateVector) -> Result<()> {
        if state.space() != self.space {
            return Err(Error::InvalidArgument(format!(
                "state has n_max = {}, evolver expects {}",
                state.space().n_max(),
                self.space.n_max()
            )));
        }
        Ok(())
    }

    /// `exp(±i H₀' t)` with `H₀' = ω(a†a + σ_z/2)`; identity for the direct propagator.
    fn frame_phase(&self, psi: &mut [C64], t: f64, sign: f64) {
        if self.options.propagator == Propagator::Direct || t == 0.0 {
            return;
        }
        let w = self.params.omega_over_g;
        for (n, pair) in psi.chunks_exact_mut(2).enumerate() {
            let nf = n as f64;
            pair[0] *= C64::from_polar(1.0, sign * w * (nf - 0.5) * t);
            pair[1] *= C64::from_polar(1.0, sign * w * (nf + 0.5) * t);
        }
    }

    fn to_working_at(&self, lab: &[C64], t: f64) -> Vec<C64> {
        let mut psi = lab.to_vec();
        self.frame_phase(&mut psi, t, 1.0);
        psi
    }

    fn working_to_lab_at(&self, psi: &mut [C64], t: f64) {
        self.frame_phase(psi, t, -1.0);
    }

    pub(crate) fn to_lab(&self, mut psi: Vec<C64>, step: usize) -> StateVector {
        self.working_to_lab_at(&mut psi, self.grid.time_of_step(step));
        StateVector::from_vec_unchecked(self.space, psi)
    }
}

fn norm_sqr(psi: &[C64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum()
}

/// One-shot propagation; see [`Evolver::evolve`].
pub fn evolve(
    state0: &StateVector,
    params: &SystemParams,
    train: &PulseTrain,
    grid: &TimeGrid,
    options: EvolveOptions,
) -> Result<FluctuationTrace> {
    Evolver::new(*params, *grid, options)?.evolve(state0, train)
}
