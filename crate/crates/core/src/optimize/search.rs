//! One-dimensional bounded minimizers. Ties always resolve to the smaller `t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::SearchConfig;

const GOLDEN: f64 = 1.618_033_988_749_895;
/// Sufficient-decrease constant for the backtracking line search.
const ARMIJO: f64 = 1e-4;
const MAX_DESCENT_ITERATIONS: usize = 200;

/// Which 1-D search moves a single pulse inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalSearch {
    /// Coarse scan plus fine refinement over the whole window.
    Grid,
    /// Finite-difference descent with backtracking, seeded at the current time.
    Gradient,
    /// Expanding bracket around the current time, then golden section.
    Golden,
}

impl LocalSearch {
    /// Minimizes `f` over `[lo, hi]` starting from `current`. The result is
    /// never worse than `f(current)`.
    pub(crate) fn minimize<F>(self, f: &F, lo: f64, hi: f64, current: f64, cfg: &SearchConfig) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        match self {
            LocalSearch::Grid => grid_search(f, lo, hi, cfg.coarse_step, cfg.fine_step, Some(current)),
            LocalSearch::Gradient => descend(f, lo, hi, current, cfg.fine_step, 10.0 * cfg.coarse_step, 0.5 * cfg.fine_step),
            LocalSearch::Golden => golden(f, lo, hi, current, cfg.coarse_step, cfg.fine_step),
        }
    }
}

/// Coarse scan of `[lo, hi]` (plus `include`), then a fine scan between the
/// neighbours of the best coarse point.
pub fn grid_minimize_1d<F>(f: F, lo: f64, hi: f64, coarse: f64, fine: f64, include: Option<f64>) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    grid_search(&|t| Ok(f(t)), lo, hi, coarse, fine, include)
}

/// Bounded finite-difference descent from `seed`; moves only on improvement.
pub fn gradient_minimize_1d<F>(f: F, lo: f64, hi: f64, seed: f64, cfg: &SearchConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_bounds(lo, hi)?;
    LocalSearch::Gradient.minimize(&|t| Ok(f(t)), lo, hi, seed.clamp(lo, hi), cfg)
}

/// Golden-section search in a bracket grown around `seed`; moves only on
/// improvement.
pub fn golden_minimize_1d<F>(f: F, lo: f64, hi: f64, seed: f64, cfg: &SearchConfig) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_bounds(lo, hi)?;
    LocalSearch::Golden.minimize(&|t| Ok(f(t)), lo, hi, seed.clamp(lo, hi), cfg)
}

fn check_bounds(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// `lo, lo + step, …` up to `hi`, with `hi` appended when off-lattice.
pub(crate) fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let snap = |t: f64| (t * 1e12).round() / 1e12;
    let mut pts: Vec<f64> = (0..=n).map(|k| snap(lo + k as f64 * step).min(hi)).collect();
    if hi - pts[n] > 1e-9 * step {
        pts.push(hi);
    }
    pts
}

fn evaluate<F>(f: &F, pts: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    pts.par_iter().map(|&t| f(t)).collect()
}

fn first_min(pts: &[f64], vals: &[f64]) -> (usize, f64, f64) {
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[best] || (vals[i] == vals[best] && pts[i] < pts[best]) {
            best = i;
        }
    }
    (best, pts[best], vals[best])
}

pub(crate) fn grid_search<F>(f: &F, lo: f64, hi: f64, coarse: f64, fine: f64, include: Option<f64>) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    check_bounds(lo, hi)?;
    if !(coarse > 0.0 && fine > 0.0) {
        return Err(Error::InvalidArgument("grid steps must be positive".into()));
    }
    let mut pts = lattice(lo, hi, coarse);
    if let Some(t) = include {
        let t = t.clamp(lo, hi);
        let pos = pts.partition_point(|&p| p < t);
        if pts.get(pos) != Some(&t) {
            pts.insert(pos, t);
        }
    }
    let vals = evaluate(f, &pts)?;
    let (k, t_coarse, f_coarse) = first_min(&pts, &vals);
    let a = pts[k.saturating_sub(1)];
    let b = pts[(k + 1).min(pts.len() - 1)];
    if b <= a {
        return Ok((t_coarse, f_coarse));
    }
    let fine_pts = lattice(a, b, fine);
    let fine_vals = evaluate(f, &fine_pts)?;
    let (_, t_fine, f_fine) = first_min(&fine_pts, &fine_vals);
    if f_fine < f_coarse || (f_fine == f_coarse && t_fine < t_coarse) {
        Ok((t_fine, f_fine))
    } else {
        Ok((t_coarse, f_coarse))
    }
}

fn descend<F>(f: &F, lo: f64, hi: f64, seed: f64, probe: f64, first_move: f64, min_move: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let mut t = seed;
    let mut ft = f(t)?;
    for _ in 0..MAX_DESCENT_ITERATIONS {
        let (a, b) = ((t - probe).max(lo), (t + probe).min(hi));
        if b <= a {
            break;
        }
        let (fa, fb) = rayon::join(|| f(a), || f(b));
        let (fa, fb) = (fa?, fb?);
        let g = (fb - fa) / (b - a);
        if !g.is_finite() || g == 0.0 {
            break;
        }
        let mut eta = first_move / g.abs();
        let mut step: Option<(f64, f64)> = None;
        loop {
            let cand = (t - eta * g).clamp(lo, hi);
            let moved = (cand - t).abs();
            if moved < min_move {
                break;
            }
            let fc = f(cand)?;
            if fc <= ft - ARMIJO * g.abs() * moved && fc < ft {
                step = Some((cand, fc));
                break;
            }
            eta *= 0.5;
        }
        // grow the step while it keeps improving
        if let Some((mut tc, mut fc)) = step {
            loop {
                eta *= 2.0;
                let cand = (t - eta * g).clamp(lo, hi);
                if cand == tc {
                    break;
                }
                let fn_ = f(cand)?;
                if fn_ < fc {
                    (tc, fc) = (cand, fn_);
                } else {
                    break;
                }
            }
            step = Some((tc, fc));
        }
        match step {
            Some((tc, fc)) => (t, ft) = (tc, fc),
            None => {
                // line search stalled; fall back to the better probe if any
                let (tp, fp) = if fa <= fb { (a, fa) } else { (b, fb) };
                if fp < ft {
                    (t, ft) = (tp, fp);
                } else {
                    break;
                }
            }
        }
    }
    Ok((t, ft))
}

fn golden<F>(f: &F, lo: f64, hi: f64, seed: f64, radius: f64, resolution: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let f0 = f(seed)?;
    let mut best = (seed, f0);
    let consider = |t: f64, v: f64, best: &mut (f64, f64)| {
        if v < best.1 || (v == best.1 && t < best.0 && v < f0) {
            *best = (t, v);
        }
    };
    let mut r = radius;
    let (mut a, mut b);
    loop {
        a = (seed - r).max(lo);
        b = (seed + r).min(hi);
        let (fa, fb) = rayon::join(|| f(a), || f(b));
        let (fa, fb) = (fa?, fb?);
        consider(a, fa, &mut best);
        consider(b, fb, &mut best);
        let left_closed = a == lo || fa > f0;
        let right_closed = b == hi || fb > f0;
        if (left_closed && right_closed) || (a == lo && b == hi) {
            break;
        }
        r *= GOLDEN;
    }
    let inv = 1.0 / GOLDEN;
    let mut c = b - (b - a) * inv;
    let mut d = a + (b - a) * inv;
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    while b - a > resolution {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv;
            fc = f(c)?;
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv;
            fd = f(d)?;
            consider(d, fd, &mut best);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_endpoints() {
        assert_eq!(lattice(0.0, 1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(lattice(0.0, 1.0, 0.3), vec![0.0, 0.3, 0.6, 0.9, 1.0]);
        let l = lattice(0.0, 10.0, 0.01);
        assert_eq!(l.len(), 1001);
        assert_eq!(l[337], 3.37);
    }

    #[test]
    fn grid_examples() {
        let (t, _) = grid_minimize_1d(|t| (t - 3.0).powi(2), 0.0, 10.0, 0.01, 0.001, None).unwrap();
        assert!((t - 3.0).abs() <= 0.0005 + 1e-12);
        let (t, v) = grid_minimize_1d(|_| 1.5, 2.0, 10.0, 0.01, 0.001, None).unwrap();
        assert_eq!((t, v), (2.0, 1.5));
        let (t, _) = grid_minimize_1d(|t| -t, 0.0, 10.0, 0.01, 0.001, None).unwrap();
        assert!((10.0 - t) <= 0.001 && t <= 10.0);
        assert!(grid_minimize_1d(|t| t, 1.0, 1.0, 0.01, 0.001, None).is_err());
    }

    #[test]
    fn include_point_is_never_beaten_by_worse_grid() {
        // sharp dip between lattice points
        let f = |t: f64| if (t - 4.12345).abs() < 1e-4 { -1.0 } else { 0.0 };
        let (t, v) = grid_minimize_1d(f, 0.0, 10.0, 0.01, 0.001, Some(4.12345)).unwrap();
        assert_eq!((t, v), (4.12345, -1.0));
    }

    #[test]
    fn gradient_quadratic_from_seven() {
        let cfg = SearchConfig::default();
        let (t, _) = gradient_minimize_1d(|t| (t - 3.0).powi(2), 0.0, 10.0, 7.0, &cfg).unwrap();
        assert!((t - 3.0).abs() <= 1e-3, "t={t}");
    }

    #[test]
    fn gradient_stays_in_seed_basin() {
        // wells at 2 (deeper) and 8
        let f = |t: f64| -(-(t - 2.0).powi(2)).exp() * 1.5 - (-(t - 8.0).powi(2)).exp();
        let cfg = SearchConfig::default();
        let (left, _) = gradient_minimize_1d(f, 0.0, 10.0, 1.0, &cfg).unwrap();
        let (right, _) = gradient_minimize_1d(f, 0.0, 10.0, 9.0, &cfg).unwrap();
        assert!((left - 2.0).abs() < 1e-2, "{left}");
        assert!((right - 8.0).abs() < 1e-2, "{right}");
    }

    #[test]
    fn golden_abs() {
        let cfg = SearchConfig::default();
        for seed in [0.0, 1.0, 4.0, 9.5, 10.0] {
            let (t, _) = golden_minimize_1d(|t| (t - 4.2).abs(), 0.0, 10.0, seed, &cfg).unwrap();
            assert!((t - 4.2).abs() <= 1e-3, "seed {seed}: {t}");
        }
    }

    #[test]
    fn local_searches_never_regress() {
        let cfg = SearchConfig::default();
        let f = |t: f64| (3.0 * t).sin() + 0.1 * t;
        for seed in [0.3, 2.2, 5.0, 7.7] {
            let f0 = f(seed);
            for ls in [LocalSearch::Grid, LocalSearch::Gradient, LocalSearch::Golden] {
                let (_, v) = ls.minimize(&|t| Ok(f(t)), 0.0, 10.0, seed, &cfg).unwrap();
                assert!(v <= f0, "{ls:?} from {seed}");
            }
        }
    }
}
