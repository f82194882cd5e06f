//! Published pulse tables shipped with the binary.

use jcpulse_core::optimize::Strategy;
use serde::Deserialize;

const TABLE_S1: &str = include_str!("../data/table_s1.json");
const TABLE_S2: &str = include_str!("../data/table_s2.json");

/// Optimized centers for one `(gσ, α²)` point and the reported reduction.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReplayColumn {
    pub g_sigma: f64,
    pub alpha_squared: f64,
    pub times: Vec<f64>,
    pub reduction_percent: f64,
}

impl ReplayColumn {
    pub fn alpha(&self) -> f64 {
        self.alpha_squared.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StrategyColumn {
    pub strategy: Strategy,
    pub times: Vec<f64>,
}

/// Centers found by each strategy at `gσ = 0.05`, `α² = 6`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StrategyTable {
    pub g_sigma: f64,
    pub alpha_squared: f64,
    pub columns: Vec<StrategyColumn>,
}

#[derive(Deserialize)]
struct ReplayTable {
    columns: Vec<ReplayColumn>,
}

pub fn strategy_table() -> StrategyTable {
    serde_json::from_str(TABLE_S1).expect("embedded strategy table parses")
}

pub fn replay_table() -> Vec<ReplayColumn> {
    serde_json::from_str::<ReplayTable>(TABLE_S2).expect("embedded replay table parses").columns
}

/// The column at `(g_sigma, alpha_squared)`, matched to 1e-9.
pub fn replay_column(g_sigma: f64, alpha_squared: f64) -> Option<ReplayColumn> {
    replay_table().into_iter().find(|c| (c.g_sigma - g_sigma).abs() < 1e-9 && (c.alpha_squared - alpha_squared).abs() < 1e-9)
}
