//! On-disk formats: pulse tables, pulse lists and run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use jcpulse_core::dynamics::{DRIVE_CUTOFF_SIGMAS, NORM_DRIFT_LIMIT};
use jcpulse_core::quantum::SHOT_NOISE;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Everything needed to rerun a command bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub rng_seed: u64,
    pub n_max: usize,
    pub omega0_amp: f64,
    pub pulses: Option<Vec<f64>>,
    pub constants: Constants,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub shot_noise: f64,
    pub drive_cutoff_sigmas: f64,
    pub norm_drift_limit: f64,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, pulses: Option<&[f64]>) -> CliResult<Self> {
        Ok(Self {
            tool: "jcpulse".into(),
            version: VERSION.into(),
            command: command.into(),
            config: config.clone(),
            rng_seed: config.search.rng_seed,
            n_max: config.n_max(),
            omega0_amp: config.amplitude()?,
            pulses: pulses.map(<[f64]>::to_vec),
            constants: Constants { shot_noise: SHOT_NOISE, drive_cutoff_sigmas: DRIVE_CUTOFF_SIGMAS, norm_drift_limit: NORM_DRIFT_LIMIT },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// Fixed-width table of sorted centers with a reduction footer.
pub fn pulse_table(title: &str, times_sorted: &[f64], var_min: f64, reduction: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "{:>6}  {:>14}", "pulse", "g*t");
    for (i, t) in times_sorted.iter().enumerate() {
        let _ = writeln!(out, "{:>6}  {:>14.9}", i + 1, t);
    }
    let _ = writeln!(out, "# var_min = {var_min:.9}");
    let _ = writeln!(out, "# R% = {reduction:.3}");
    out
}

/// Reads pulse centers from a JSON array, `{"times": [...]}`, or a table
/// written by [`pulse_table`].
pub fn parse_pulses(text: &str, path: &Path) -> CliResult<Vec<f64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Pulses {
        Bare(Vec<f64>),
        Wrapped { times: Vec<f64> },
    }
    let parse_err = |message: String| CliError::Parse { path: path.to_path_buf(), message };
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return match serde_json::from_str::<Pulses>(text).map_err(|e| parse_err(e.to_string()))? {
            Pulses::Bare(t) | Pulses::Wrapped { times: t } => Ok(t),
        };
    }
    let mut times = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("pulse") {
            continue;
        }
        let mut cols = line.split_whitespace();
        let t = match (cols.next(), cols.next(), cols.next()) {
            (Some(_), Some(t), None) => t.parse::<f64>().ok(),
            _ => None,
        };
        times.push(t.ok_or_else(|| parse_err(format!("line {}: expected `index time`", lineno + 1)))?);
    }
    Ok(times)
}

pub fn load_pulses(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_pulses(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trips() {
        let times = [0.025, 1.395, 2.205, 9.999, 1.57664117];
        let text = pulse_table("IDS", &times, 0.0347, 86.11);
        assert!(text.ends_with("# R% = 86.110\n"));
        let widths: Vec<usize> = text.lines().filter(|l| !l.starts_with('#')).map(str::len).collect();
        assert!(widths.iter().all(|&w| w == widths[0]));
        assert_eq!(parse_pulses(&text, Path::new("t")).unwrap(), times);
    }

    #[test]
    fn json_forms() {
        let p = Path::new("p.json");
        assert_eq!(parse_pulses("[1.0, 2.5]", p).unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_pulses(r#"{"times": [3]}"#, p).unwrap(), vec![3.0]);
        assert!(parse_pulses("[1, \"x\"]", p).is_err());
        assert!(parse_pulses("1 2 3\n", p).is_err());
    }
}
