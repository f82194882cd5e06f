use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64 as C64;

use crate::dynamics::{DriveCache, DriveProfile, DriveReuse, EvolveOptions, Evolver, TimeGrid};
use crate::error::{Error, Result};
use crate::pulse::PulseTrain;
use crate::quantum::{StateVector, SystemParams};

/// Lowest sampled `ΔX²` and the earliest time it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostValue {
    pub var_min: f64,
    pub t_of_min: f64,
}

/// Initial state, model and pulse template shared by every cost evaluation.
#[derive(Debug)]
pub struct CostModel {
    evolver: Evolver,
    state0: StateVector,
    template: PulseTrain,
    evaluations: AtomicU64,
}

impl Clone for CostModel {
    fn clone(&self) -> Self {
        Self {
            evolver: self.evolver.clone(),
            state0: self.state0.clone(),
            template: self.template.clone(),
            evaluations: AtomicU64::new(self.evaluations()),
        }
    }
}

impl CostModel {
    /// `template` fixes width, amplitude, carrier and window; its centers are ignored.
    pub fn new(state0: StateVector, params: SystemParams, template: PulseTrain, grid: TimeGrid, options: EvolveOptions) -> Result<Self> {
        let evolver = Evolver::new(params, grid, options)?;
        let template = template.with_centers(Vec::new())?;
        if template.window.0 < grid.t_start - 1e-12 || template.window.1 > grid.t_end + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "pulse window {:?} exceeds the time grid [{}, {}]",
                template.window, grid.t_start, grid.t_end
            )));
        }
        evolver.initial(&state0, &template)?;
        Ok(Self { evolver, state0, template, evaluations: AtomicU64::new(0) })
    }

    pub fn evolver(&self) -> &Evolver {
        &self.evolver
    }

    pub fn state0(&self) -> &StateVector {
        &self.state0
    }

    pub fn template(&self) -> &PulseTrain {
        &self.template
    }

    pub fn window(&self) -> (f64, f64) {
        self.template.window
    }

    pub fn train(&self, times: &[f64]) -> Result<PulseTrain> {
        self.template.with_centers(times.to_vec())
    }

    /// Number of cost evaluations so far (cached ones included).
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Full propagation with pulses at `times`.
    pub fn eval(&self, times: &[f64]) -> Result<CostValue> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let train = self.train(times)?;
        let mut psi = self.evolver.initial(&self.state0, &train)?;
        let profile = DriveProfile::new(&train);
        let mut best = (self.evolver.variance(0, &psi), 0);
        self.scan(&mut psi, &profile, 0, &mut best)?;
        Ok(self.value(best))
    }

    /// Trajectory with pulses at `fixed`, kept for repeated evaluation of one
    /// extra pulse.
    pub(crate) fn prefix(&self, fixed: &[f64]) -> Result<Prefix> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let train = self.train(fixed)?;
        let mut psi = self.evolver.initial(&self.state0, &train)?;
        let profile = DriveProfile::new(&train);
        let n = self.evolver.sample_steps().len();
        let mut states = Vec::with_capacity(n);
        let mut best = Vec::with_capacity(n);
        let mut running = (self.evolver.variance(0, &psi), 0);
        states.push(psi.clone());
        best.push(running);
        let mut drive = DriveCache::default();
        self.evolver.run_with(&mut psi, &profile, 0, DriveReuse::Record(&mut drive), |k, p| {
            let v = self.evolver.variance(self.evolver.sample_steps()[k], p);
            if v < running.0 {
                running = (v, k);
            }
            states.push(p.to_vec());
            best.push(running);
            Ok(true)
        })?;
        Ok(Prefix { fixed: fixed.to_vec(), states, best, drive })
    }

    /// Cost with pulses at `prefix.fixed` plus one at `tau`. Bitwise equal to
    /// [`CostModel::eval`] on the same centers.
    pub(crate) fn eval_with(&self, prefix: &Prefix, tau: f64) -> Result<CostValue> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let mut centers = prefix.fixed.clone();
        centers.push(tau);
        let train = self.train(&centers)?;
        let profile = DriveProfile::new(&train);
        let k0 = self.evolver.last_sample_before(tau, profile.reach());
        let mut psi = prefix.states[k0].clone();
        let mut best = prefix.best[k0];
        let reuse = DriveReuse::Reuse { cache: &prefix.drive, lo: tau - profile.reach(), hi: tau + profile.reach() };
        self.evolver.run_with(&mut psi, &profile, k0, reuse, |k, p| {
            let v = self.evolver.variance(self.evolver.sample_steps()[k], p);
            if v < best.0 {
                best = (v, k);
            }
            Ok(true)
        })?;
        Ok(self.value(best))
    }

    fn scan(&self, psi: &mut [C64], profile: &DriveProfile, from: usize, best: &mut (f64, usize)) -> Result<()> {
        self.evolver.run(psi, profile, from, |k, p| {
            let v = self.evolver.variance(self.evolver.sample_steps()[k], p);
            if v < best.0 {
                *best = (v, k);
            }
            Ok(true)
        })
    }

    fn value(&self, (var_min, k): (f64, usize)) -> CostValue {
        CostValue { var_min, t_of_min: self.evolver.sample_time(k) }
    }
}

/// Sampled working-frame states and running minima for a fixed pulse set.
pub(crate) struct Prefix {
    fixed: Vec<f64>,
    states: Vec<Vec<C64>>,
    best: Vec<(f64, usize)>,
    drive: DriveCache,
}

impl Prefix {
    /// Cost of the fixed pulses alone.
    #[cfg(test)]
    pub(crate) fn own_value(&self, model: &CostModel) -> CostValue {
        model.value(*self.best.last().expect("prefix has samples"))
    }
}

/// One-shot cost: the lowest sampled `ΔX²` with pulses at `times`.
pub fn cost(times: &[f64], model: &CostModel) -> Result<f64> {
    Ok(model.eval(times)?.var_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::calibrate_pi_amplitude;
    use crate::quantum::{build_space, coherent_excited_state};

    fn model(alpha2: f64, n_max: usize) -> CostModel {
        let params = SystemParams::default().with_n_max(n_max);
        let s0 = coherent_excited_state(C64::new(alpha2.sqrt(), 0.0), build_space(n_max).unwrap()).unwrap();
        let amp = calibrate_pi_amplitude(0.05, 100.0).unwrap();
        let template = PulseTrain::empty(0.05, amp, 100.0, (0.0, 10.0)).unwrap();
        CostModel::new(s0, params, template, TimeGrid::standard(), EvolveOptions::default()).unwrap()
    }

    #[test]
    fn cached_cost_is_bitwise_equal() {
        let m = model(6.0, 44);
        let fixed = [1.0, 2.37, 6.5];
        let prefix = m.prefix(&fixed).unwrap();
        assert_eq!(prefix.own_value(&m), m.eval(&fixed).unwrap());
        for tau in [0.0, 0.3, 0.41, 1.0, 2.4, 4.123, 6.52, 9.999, 10.0] {
            let mut all = fixed.to_vec();
            all.push(tau);
            assert_eq!(m.eval_with(&prefix, tau).unwrap(), m.eval(&all).unwrap(), "tau={tau}");
        }
    }

    #[test]
    fn vacuum_cost_never_exceeds_shot_noise() {
        let m = model(0.0, 12);
        for times in [vec![], vec![0.5], vec![2.0, 2.0, 7.1]] {
            assert!(cost(&times, &m).unwrap() <= 0.25 + 1e-4);
        }
    }

    #[test]
    fn duplicate_time_doubles_amplitude() {
        let m = model(6.0, 44);
        let params = SystemParams::default().with_n_max(44);
        let t = m.template();
        let doubled = PulseTrain::empty(t.sigma, 2.0 * t.omega0_amp, t.omegap, t.window).unwrap();
        let m2 = CostModel::new(m.state0().clone(), params, doubled, TimeGrid::standard(), EvolveOptions::default()).unwrap();
        let a = cost(&[3.3, 3.3], &m).unwrap();
        let b = cost(&[3.3], &m2).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
