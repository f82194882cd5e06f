use std::path::{Path, PathBuf};

use jcpulse_core::dynamics::{EvolveOptions, TimeGrid};
use jcpulse_core::optimize::{CostModel, SearchConfig, Strategy};
use jcpulse_core::pulse::{calibrate_pi_amplitude, PulseTrain};
use jcpulse_core::quantum::{build_space, coherent_excited_state, poisson_tail, required_cutoff, StateVector, SystemParams};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Poisson tail used to pick `n_max` when the config leaves it out.
pub const AUTO_CUTOFF_TAIL: f64 = 1e-12;
/// Levels added above the Poisson cutoff to absorb drive-induced spreading.
pub const AUTO_CUTOFF_MARGIN: usize = 10;

/// Pulse peak amplitude `Ω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AmpMode {
    /// `Ω₀ σ √(2π) = π`.
    #[default]
    PiCalibrated,
    /// `Ω₀` in units of `g`.
    Explicit(f64),
    /// π-calibrated amplitude times this factor.
    Scaled(f64),
}

/// One row of a strategy comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareEntry {
    pub strategy: Strategy,
    pub n_pulses: usize,
}

/// A single JSON run description. Only `alpha` and `g_sigma` are required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Real coherent amplitude of the initial `|e⟩|α⟩`.
    pub alpha: f64,
    pub g_sigma: f64,
    #[serde(default = "default_pulses")]
    pub n_pulses: usize,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    /// Fock cutoff; chosen from the Poisson tail when absent.
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default = "default_omega")]
    pub omega_over_g: f64,
    #[serde(default)]
    pub omega0_amp_mode: AmpMode,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub grid: TimeGrid,
    #[serde(default)]
    pub evolve: EvolveOptions,
    /// Strategies for `compare`.
    #[serde(default)]
    pub compare: Vec<CompareEntry>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_pulses() -> usize {
    15
}

fn default_strategy() -> Strategy {
    Strategy::Ids
}

fn default_omega() -> f64 {
    SystemParams::DEFAULT_FREQUENCY
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Defaults for everything but the physical point.
    pub fn new(alpha: f64, g_sigma: f64) -> Self {
        Self {
            alpha,
            g_sigma,
            n_pulses: default_pulses(),
            strategy: default_strategy(),
            n_max: None,
            omega_over_g: default_omega(),
            omega0_amp_mode: AmpMode::default(),
            search: SearchConfig::default(),
            grid: TimeGrid::default(),
            evolve: EvolveOptions::default(),
            compare: Vec::new(),
            output_dir: default_output(),
        }
    }

    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or_else(|| auto_n_max(self.alpha * self.alpha))
    }

    /// Resolved `Ω₀` in units of `g`.
    pub fn amplitude(&self) -> CliResult<f64> {
        let pi = calibrate_pi_amplitude(self.g_sigma, self.omega_over_g)?;
        Ok(match self.omega0_amp_mode {
            AmpMode::PiCalibrated => pi,
            AmpMode::Explicit(a) => a,
            AmpMode::Scaled(f) => pi * f,
        })
    }

    /// Checks every field before anything is simulated.
    pub fn validate(&self) -> CliResult<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(CliError::validation("alpha", format!("must be a finite non-negative amplitude, got {}", self.alpha)));
        }
        if !(self.g_sigma.is_finite() && self.g_sigma > 0.0) {
            return Err(CliError::validation("g_sigma", format!("must be positive, got {}", self.g_sigma)));
        }
        if self.n_pulses == 0 {
            return Err(CliError::validation("n_pulses", "must be >= 1"));
        }
        if !(self.omega_over_g.is_finite() && self.omega_over_g > 0.0) {
            return Err(CliError::validation("omega_over_g", format!("must be positive, got {}", self.omega_over_g)));
        }
        match self.omega0_amp_mode {
            AmpMode::Explicit(a) | AmpMode::Scaled(a) if !(a.is_finite() && a > 0.0) => {
                return Err(CliError::validation("omega0_amp_mode", format!("value must be positive, got {a}")));
            }
            _ => {}
        }
        let mean = self.alpha * self.alpha;
        let n_max = self.n_max();
        if n_max == 0 {
            return Err(CliError::validation("n_max", "must be >= 1"));
        }
        if poisson_tail(mean, n_max) >= jcpulse_core::quantum::COHERENT_TAIL_LIMIT {
            return Err(CliError::validation(
                "n_max",
                format!(
                    "{n_max} truncates the initial coherent state; use at least {}",
                    required_cutoff(mean, jcpulse_core::quantum::COHERENT_TAIL_LIMIT)
                ),
            ));
        }
        self.grid.validate(self.omega_over_g).map_err(|e| CliError::validation("grid", e.to_string()))?;
        self.search.validate().map_err(|e| CliError::validation("search", e.to_string()))?;
        let (lo, hi) = self.search.window;
        if lo < self.grid.t_start - 1e-12 || hi > self.grid.t_end + 1e-12 {
            return Err(CliError::validation(
                "search.window",
                format!("[{lo}, {hi}] leaves the grid [{}, {}]", self.grid.t_start, self.grid.t_end),
            ));
        }
        if !(self.evolve.norm_tolerance.is_finite() && self.evolve.norm_tolerance > 0.0) {
            return Err(CliError::validation("evolve.norm_tolerance", "must be positive"));
        }
        for (i, entry) in self.compare.iter().enumerate() {
            if entry.n_pulses == 0 {
                return Err(CliError::validation(format!("compare[{i}].n_pulses"), "must be >= 1"));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> CliResult<SystemParams> {
        Ok(SystemParams::resonant(self.omega_over_g, self.n_max())?)
    }

    pub fn initial_state(&self) -> CliResult<StateVector> {
        Ok(coherent_excited_state(C64::new(self.alpha, 0.0), build_space(self.n_max())?)?)
    }

    /// Pulse template spanning the whole grid.
    pub fn template(&self) -> CliResult<PulseTrain> {
        Ok(PulseTrain::empty(self.g_sigma, self.amplitude()?, self.omega_over_g, (self.grid.t_start, self.grid.t_end))?)
    }

    pub fn cost_model(&self) -> CliResult<CostModel> {
        Ok(CostModel::new(self.initial_state()?, self.params()?, self.template()?, self.grid, self.evolve)?)
    }
}

/// Poisson cutoff at [`AUTO_CUTOFF_TAIL`] plus [`AUTO_CUTOFF_MARGIN`] levels.
pub fn auto_n_max(mean: f64) -> usize {
    required_cutoff(mean, AUTO_CUTOFF_TAIL) + AUTO_CUTOFF_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<RunConfig> {
        RunConfig::from_json(text, Path::new("test.json"))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(r#"{"alpha": 2.449489742783178, "g_sigma": 0.05}"#).unwrap();
        assert_eq!(c.n_pulses, 15);
        assert_eq!(c.strategy, Strategy::Ids);
        assert_eq!(c.search, SearchConfig::default());
        assert!(c.n_max() >= 30);
    }

    #[test]
    fn partial_nested_blocks() {
        let c = parse(r#"{"alpha": 1, "g_sigma": 0.05, "search": {"rng_seed": 9}, "omega0_amp_mode": {"scaled": 0.9}}"#).unwrap();
        assert_eq!(c.search.rng_seed, 9);
        assert_eq!(c.search.coarse_step, 0.01);
        assert!((c.amplitude().unwrap() - 0.9 * calibrate_pi_amplitude(0.05, 100.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn field_level_errors() {
        let field = |text: &str| match parse(text) {
            Err(CliError::Validation { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field(r#"{"alpha": 1, "g_sigma": 0.05, "n_pulses": 0}"#), "n_pulses");
        assert_eq!(field(r#"{"alpha": 1, "g_sigma": -1}"#), "g_sigma");
        assert_eq!(field(r#"{"alpha": 4.5, "g_sigma": 0.05, "n_max": 10}"#), "n_max");
        assert_eq!(field(r#"{"alpha": 1, "g_sigma": 0.05, "search": {"window": [0, 11]}}"#), "search.window");
        assert_eq!(field(r#"{"alpha": 1, "g_sigma": 0.05, "compare": [{"strategy": "FSS", "n_pulses": 0}]}"#), "compare[0].n_pulses");
        assert!(matches!(parse(r#"{"alpha": 1, "g_sigma": 0.05, "bogus": 1}"#), Err(CliError::Parse { .. })));
        assert!(matches!(parse(r#"{"alpha": 1, "g_sigma": 0.05, "strategy": "XYZ"}"#), Err(CliError::Parse { .. })));
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::new(3.0, 0.1);
        c.n_max = Some(40);
        c.omega0_amp_mode = AmpMode::Explicit(12.5);
        assert_eq!(parse(&c.to_json()).unwrap(), c);
    }
}
