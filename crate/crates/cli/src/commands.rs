use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use jcpulse_core::analysis::{reduction_percent, wigner_with, WignerConvention, WignerGrid};
use jcpulse_core::circuitqed::{feasibility, map_to_system, CircuitMapping, CircuitParams, Feasibility};
use jcpulse_core::dynamics::FluctuationTrace;
use jcpulse_core::optimize::{run_strategy, OptimizationResult, Strategy};
use serde::{Deserialize, Serialize};

use crate::artifacts::{pulse_table, write, Manifest};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Outcome of `optimize`; artifacts are on disk even when not converged.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub result: OptimizationResult,
    pub dir: PathBuf,
}

pub fn cmd_optimize(cfg: &RunConfig) -> CliResult<OptimizeOutcome> {
    let model = cfg.cost_model()?;
    eprintln!(
        "optimize: {} with N={} at alpha^2={:.4}, g*sigma={}, n_max={}, seed={}",
        cfg.strategy,
        cfg.n_pulses,
        cfg.alpha * cfg.alpha,
        cfg.g_sigma,
        cfg.n_max(),
        cfg.search.rng_seed
    );
    let result = run_strategy(cfg.strategy, &model, cfg.n_pulses, &cfg.search)?;
    let trace = model.evolver().evolve(model.state0(), &model.train(&result.times)?)?;
    let dir = cfg.output_dir.clone();
    write(&dir, "result.json", &result.to_json())?;
    write(&dir, "trace.csv", &trace.to_csv())?;
    write(
        &dir,
        "pulse_table.txt",
        &pulse_table(&title(cfg, result.strategy_tag.tag()), &result.times_sorted, result.var_min, result.reduction_percent),
    )?;
    write(&dir, "manifest.json", &Manifest::new("optimize", cfg, None)?.to_json())?;
    eprintln!("optimize: R% = {:.3} after {} evaluations", result.reduction_percent, result.evaluations);
    Ok(OptimizeOutcome { result, dir })
}

fn title(cfg: &RunConfig, label: &str) -> String {
    format!("{label}  alpha^2={:.4}  g*sigma={}  n_max={}", cfg.alpha * cfg.alpha, cfg.g_sigma, cfg.n_max())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub times: Vec<f64>,
    pub var_min: f64,
    pub t_of_min: f64,
    pub reduction_percent: f64,
    pub omega0_amp: f64,
    pub n_max: usize,
}

impl ReplayReport {
    pub fn summary(&self) -> String {
        format!("pulses={} var_min={:.9} t_of_min={:.3} R%={:.3}", self.times.len(), self.var_min, self.t_of_min, self.reduction_percent)
    }
}

/// Evolves with fixed centers. Writes `trace.csv`, `replay.json`,
/// `pulse_table.txt` and a manifest when `out` is given.
pub fn cmd_replay(cfg: &RunConfig, times: &[f64], out: Option<&Path>) -> CliResult<(ReplayReport, FluctuationTrace)> {
    let model = cfg.cost_model()?;
    let train = model.train(times).map_err(|e| CliError::validation("pulses", e.to_string()))?;
    let trace = model.evolver().evolve(model.state0(), &train)?;
    let (t_of_min, var_min) = trace.min_fluctuation()?;
    let report = ReplayReport {
        times: times.to_vec(),
        var_min,
        t_of_min,
        reduction_percent: reduction_percent(var_min),
        omega0_amp: cfg.amplitude()?,
        n_max: cfg.n_max(),
    };
    if let Some(dir) = out {
        let mut sorted = times.to_vec();
        sorted.sort_by(f64::total_cmp);
        write(dir, "trace.csv", &trace.to_csv())?;
        write(dir, "replay.json", &serde_json::to_string_pretty(&report).expect("report serializes"))?;
        write(dir, "pulse_table.txt", &pulse_table(&title(cfg, "replay"), &sorted, var_min, report.reduction_percent))?;
        write(dir, "manifest.json", &Manifest::new("replay", cfg, Some(times))?.to_json())?;
    }
    Ok((report, trace))
}

/// One emitted Wigner grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerSnapshot {
    pub t: f64,
    pub csv: Option<PathBuf>,
    pub integral: f64,
    /// `x`-marginal variance of the grid in units of `X`.
    pub marginal_variance: f64,
    /// `ΔX²` of the same state from its moments.
    pub state_variance: f64,
    pub coverage_warning: bool,
}

/// Field Wigner grids at `times` for the train `pulses`, on the default grid.
pub fn cmd_wigner(
    cfg: &RunConfig,
    pulses: &[f64],
    times: &[f64],
    convention: WignerConvention,
    out: Option<&Path>,
) -> CliResult<Vec<(WignerSnapshot, WignerGrid)>> {
    if times.is_empty() {
        return Err(CliError::validation("times", "need at least one snapshot time"));
    }
    let model = cfg.cost_model()?;
    let train = model.train(pulses).map_err(|e| CliError::validation("pulses", e.to_string()))?;
    let evolver = model.evolver();
    let states = evolver.states_at(model.state0(), &train, times).map_err(|e| CliError::validation("times", e.to_string()))?;
    let axis = WignerGrid::default_axis();
    let mut out_list = Vec::with_capacity(times.len());
    for (&t, state) in times.iter().zip(&states) {
        let rho = evolver.quadrature_field(state, t);
        let grid = wigner_with(&rho, &axis, &axis, convention)?;
        let csv = match out {
            Some(dir) => {
                let stem = format!("wigner_t{t:.3}");
                write(dir, &format!("{stem}.json"), &grid.header_json())?;
                Some(write(dir, &format!("{stem}.csv"), &grid.to_csv())?)
            }
            None => None,
        };
        let snap = WignerSnapshot {
            t,
            csv,
            integral: grid.integral(),
            marginal_variance: grid.x_variance(),
            state_variance: rho.field_moments().quadrature_variance(),
            coverage_warning: grid.coverage_warning,
        };
        if snap.coverage_warning {
            eprintln!("wigner: grid at t={t} does not cover 6 sigma of the state");
        }
        out_list.push((snap, grid));
    }
    if let Some(dir) = out {
        let snaps: Vec<&WignerSnapshot> = out_list.iter().map(|(s, _)| s).collect();
        write(dir, "wigner.json", &serde_json::to_string_pretty(&snaps).expect("snapshots serialize"))?;
        write(dir, "manifest.json", &Manifest::new("wigner", cfg, Some(pulses))?.to_json())?;
    }
    Ok(out_list)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub strategy: Strategy,
    pub n_pulses: usize,
    pub n_distinct_pulses: usize,
    pub var_min: f64,
    pub reduction_percent: f64,
    pub wall_time_s: f64,
    pub converged: bool,
}

/// Header plus one line per row.
pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from("strategy,n_pulses,n_distinct_pulses,var_min,R%,wall_time\n");
    for r in rows {
        let _ =
            writeln!(s, "{},{},{},{},{},{:.3}", r.strategy, r.n_pulses, r.n_distinct_pulses, r.var_min, r.reduction_percent, r.wall_time_s);
    }
    s
}

/// Runs every strategy in `cfg.compare` on the same model and seed. Centers
/// closer than `search.coarse_step` count as one pulse.
pub fn cmd_compare(cfg: &RunConfig) -> CliResult<Vec<(CompareRow, OptimizationResult)>> {
    if cfg.compare.len() < 2 {
        return Err(CliError::validation("compare", format!("need at least two strategies, got {}", cfg.compare.len())));
    }
    let model = cfg.cost_model()?;
    let dir = &cfg.output_dir;
    let mut rows = Vec::with_capacity(cfg.compare.len());
    for entry in &cfg.compare {
        eprintln!("compare: {} with N={}", entry.strategy, entry.n_pulses);
        let start = Instant::now();
        let result = run_strategy(entry.strategy, &model, entry.n_pulses, &cfg.search)?;
        let wall = start.elapsed().as_secs_f64();
        let trace = model.evolver().evolve(model.state0(), &model.train(&result.times)?)?;
        let tag = entry.strategy.tag();
        write(dir, &format!("trace_{tag}.csv"), &trace.to_csv())?;
        write(dir, &format!("result_{tag}.json"), &result.to_json())?;
        let row = CompareRow {
            strategy: entry.strategy,
            n_pulses: entry.n_pulses,
            n_distinct_pulses: result.distinct_pulse_count(cfg.search.coarse_step),
            var_min: result.var_min,
            reduction_percent: result.reduction_percent,
            wall_time_s: wall,
            converged: result.converged,
        };
        rows.push((row, result));
    }
    let plain: Vec<CompareRow> = rows.iter().map(|(r, _)| r.clone()).collect();
    write(dir, "compare.csv", &compare_csv(&plain))?;
    write(dir, "manifest.json", &Manifest::new("compare", cfg, None)?.to_json())?;
    Ok(rows)
}

/// Input of `circuit-map`: element values in SI units plus optional
/// coherence times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitInput {
    pub circuit: CircuitParams,
    #[serde(default)]
    pub t1: Option<f64>,
    #[serde(default)]
    pub t2: Option<f64>,
    #[serde(default = "default_gt")]
    pub protocol_gt: f64,
}

fn default_gt() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitReport {
    pub mapping: CircuitMapping,
    pub feasibility: Feasibility,
}

impl CircuitReport {
    pub fn table(&self) -> String {
        let m = &self.mapping;
        let e = m.energies.in_ghz();
        let ghz = |w: f64| w / (2.0 * std::f64::consts::PI) * 1e-9;
        let mut s = String::new();
        let mut row = |name: &str, value: String| {
            let _ = writeln!(s, "{name:<28} {value:>16}");
        };
        row("E_C/h [GHz]", format!("{:.6}", e.e_c));
        row("E_L/h [GHz]", format!("{:.6}", e.e_l));
        row("E_Cr/h [GHz]", format!("{:.6}", e.e_cr));
        row("E_Lr/h [GHz]", format!("{:.6}", e.e_lr));
        row("omega0/2pi [GHz]", format!("{:.6}", ghz(m.omega0)));
        row("omega/2pi [GHz]", format!("{:.6}", ghz(m.omega)));
        row("g/2pi [MHz]", format!("{:.6}", ghz(m.g) * 1e3));
        row("omega/g", format!("{:.3}", m.system.omega_over_g));
        row("omega0/g", format!("{:.3}", m.system.omega0_over_g));
        row("C_c/C_r", format!("{:.4e}", m.suppression_ratio));
        row("strong coupling", m.strong_coupling.to_string());
        row("t_protocol [us]", format!("{:.6}", self.feasibility.t_protocol * 1e6));
        row("feasible", self.feasibility.feasible.to_string());
        for w in &m.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

pub fn cmd_circuit_map(input: &CircuitInput, out: Option<&Path>) -> CliResult<CircuitReport> {
    let mapping = map_to_system(&input.circuit)?;
    let feasibility = feasibility(mapping.g, input.protocol_gt, input.t1, input.t2)?;
    let report = CircuitReport { mapping, feasibility };
    if let Some(dir) = out {
        write(dir, "circuit_map.json", &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    Ok(report)
}

pub fn load_circuit(path: &Path) -> CliResult<CircuitInput> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}
