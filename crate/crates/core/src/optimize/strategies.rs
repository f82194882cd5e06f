use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::reduction_percent;
use crate::error::{Error, Result};

use super::cost::CostModel;
use super::search::{grid_search, LocalSearch};
use super::{sorted, OptimizationResult, PulseCountEntry, SearchConfig, Strategy, SweepEntry};

/// Dispatches to the driver for `strategy`.
pub fn run_strategy(strategy: Strategy, model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<OptimizationResult> {
    match strategy.local_search() {
        None => fss(model, n, cfg),
        Some(ls) => iterated(strategy, ls, model, n, cfg),
    }
}

/// Forward sequential placement: the k-th center is grid-searched over
/// `[t_{k-1}, t_end]` with the earlier ones frozen.
pub fn fss(model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<OptimizationResult> {
    let (lo, hi) = check(model, n, cfg)?;
    let start = model.evaluations();
    let mut times: Vec<f64> = Vec::with_capacity(n);
    let mut history = Vec::with_capacity(n);
    let mut lower = lo;
    for k in 1..=n {
        let prefix = model.prefix(&times)?;
        let f = |t: f64| model.eval_with(&prefix, t).map(|c| c.var_min);
        let (t, v) = if lower < hi { grid_search(&f, lower, hi, cfg.coarse_step, cfg.fine_step, None)? } else { (hi, f(hi)?) };
        times.push(t);
        history.push(PulseCountEntry { pulse_count: k, var_min: v });
        lower = t;
    }
    finish(Strategy::Fss, model, times, history, Vec::new(), true, cfg, start)
}

/// Iterated sweeps with the full-window grid search (IDS).
pub fn ids(model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<OptimizationResult> {
    run_strategy(Strategy::Ids, model, n, cfg)
}

/// Iterated sweeps with bounded finite-difference descent (GB-IDS).
pub fn gb_ids(model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<OptimizationResult> {
    run_strategy(Strategy::GbIds, model, n, cfg)
}

/// Iterated sweeps with golden-section line search (GF-IDS).
pub fn gf_ids(model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<OptimizationResult> {
    run_strategy(Strategy::GfIds, model, n, cfg)
}

fn iterated(strategy: Strategy, ls: LocalSearch, model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<OptimizationResult> {
    let (lo, hi) = check(model, n, cfg)?;
    let start = model.evaluations();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut times: Vec<f64> = Vec::with_capacity(n);
    let mut history = Vec::with_capacity(n);
    let mut log = Vec::new();
    let mut converged = true;
    for k in 1..=n {
        times.push(rng.random_range(lo..=hi));
        let mut current = model.eval(&times)?.var_min;
        let mut settled = false;
        for _ in 0..cfg.max_sweeps {
            let before = current;
            for j in 0..k {
                let others: Vec<f64> = times.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &t)| t).collect();
                let prefix = model.prefix(&others)?;
                let f = |t: f64| model.eval_with(&prefix, t).map(|c| c.var_min);
                let (t, v) = ls.minimize(&f, lo, hi, times[j], cfg)?;
                if v > current {
                    return Err(Error::Numeric(format!("{strategy} sweep regressed from {current} to {v}")));
                }
                times[j] = t;
                current = v;
            }
            log.push(SweepEntry { sweep_index: log.len(), pulse_count: k, var_min: current });
            if (before - current).abs() < cfg.sweep_tolerance {
                settled = true;
                break;
            }
        }
        converged &= settled;
        history.push(PulseCountEntry { pulse_count: k, var_min: current });
    }
    finish(strategy, model, times, history, log, converged, cfg, start)
}

fn check(model: &CostModel, n: usize, cfg: &SearchConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one pulse".into()));
    }
    let (lo, hi) = cfg.window;
    let (plo, phi) = model.window();
    if lo < plo - 1e-12 || hi > phi + 1e-12 {
        return Err(Error::InvalidArgument(format!("search window [{lo}, {hi}] exceeds the pulse window [{plo}, {phi}]")));
    }
    Ok((lo, hi))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    strategy: Strategy,
    model: &CostModel,
    times: Vec<f64>,
    per_pulse_history: Vec<PulseCountEntry>,
    sweep_log: Vec<SweepEntry>,
    converged: bool,
    cfg: &SearchConfig,
    start: u64,
) -> Result<OptimizationResult> {
    let value = model.eval(&times)?;
    Ok(OptimizationResult {
        strategy_tag: strategy,
        times_sorted: sorted(&times),
        times,
        var_min: value.var_min,
        t_of_min: value.t_of_min,
        reduction_percent: reduction_percent(value.var_min),
        per_pulse_history,
        sweep_log,
        converged,
        rng_seed: cfg.rng_seed,
        config: *cfg,
        evaluations: model.evaluations() - start,
    })
}
