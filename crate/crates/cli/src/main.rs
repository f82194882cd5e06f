use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jcpulse_cli::artifacts::load_pulses;
use jcpulse_cli::commands::{compare_csv, load_circuit};
use jcpulse_cli::tables::replay_column;
use jcpulse_cli::{cmd_circuit_map, cmd_compare, cmd_optimize, cmd_replay, cmd_wigner, CliError, CliResult, RunConfig};
use jcpulse_core::analysis::WignerConvention;

#[derive(Parser)]
#[command(name = "jcpulse", version, about = "Pulse-train squeezing in the Jaynes-Cummings model")]
struct Cli {
    /// Worker threads for parallel cost evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding `search.rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Quadrature,
    Canonical,
}

#[derive(Subcommand)]
enum Command {
    /// Search pulse centers with the configured strategy.
    Optimize(Common),
    /// Evolve with fixed centers and report the squeezing.
    Replay {
        #[command(flatten)]
        common: Common,
        /// Pulse centers: JSON array, {"times": [...]}, or a pulse_table.txt.
        #[arg(long, conflicts_with = "published")]
        pulses: Option<PathBuf>,
        /// Use the shipped published column for the config's (g_sigma, alpha^2).
        #[arg(long)]
        published: bool,
    },
    /// Wigner grids of the field at the given times.
    Wigner {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pulses: Option<PathBuf>,
        /// Comma-separated snapshot times in units of 1/g.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long, value_enum, default_value = "quadrature")]
        convention: Convention,
    },
    /// Run every strategy listed under `compare` in the config.
    Compare(Common),
    /// Map circuit elements to model parameters.
    CircuitMap {
        /// JSON with `circuit`, optional `t1`, `t2`, `protocol_gt`.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.search.rng_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn pulses_or_empty(path: Option<&Path>) -> CliResult<Vec<f64>> {
    path.map(load_pulses).transpose().map(Option::unwrap_or_default)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::validation("--threads", "must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::validation("--threads", e.to_string()))?;
    }
    match cli.command {
        Command::Optimize(common) => {
            let cfg = load(&common)?;
            let outcome = cmd_optimize(&cfg)?;
            println!("{}", outcome.result.to_json());
            if !outcome.result.converged {
                let err = CliError::NotConverged(outcome.dir);
                eprintln!("jcpulse: {err}");
                return Ok(ExitCode::from(err.exit_code() as u8));
            }
        }
        Command::Replay { common, pulses, published } => {
            let cfg = load(&common)?;
            let times = if published {
                replay_column(cfg.g_sigma, cfg.alpha * cfg.alpha)
                    .ok_or_else(|| CliError::validation("--published", "no published column for this (g_sigma, alpha^2)"))?
                    .times
            } else {
                pulses_or_empty(pulses.as_deref())?
            };
            let (report, _) = cmd_replay(&cfg, &times, Some(&cfg.output_dir))?;
            println!("{}", report.summary());
        }
        Command::Wigner { common, pulses, times, convention } => {
            let cfg = load(&common)?;
            let convention = match convention {
                Convention::Quadrature => WignerConvention::Quadrature,
                Convention::Canonical => WignerConvention::Canonical,
            };
            let pulses = pulses_or_empty(pulses.as_deref())?;
            for (snap, _) in cmd_wigner(&cfg, &pulses, &times, convention, Some(&cfg.output_dir))? {
                println!(
                    "t={:.3} integral={:.6} marginal_var={:.6} state_var={:.6}{}",
                    snap.t,
                    snap.integral,
                    snap.marginal_variance,
                    snap.state_variance,
                    if snap.coverage_warning { " (coverage warning)" } else { "" }
                );
            }
        }
        Command::Compare(common) => {
            let cfg = load(&common)?;
            let rows = cmd_compare(&cfg)?;
            let plain: Vec<_> = rows.iter().map(|(r, _)| r.clone()).collect();
            print!("{}", compare_csv(&plain));
            if plain.iter().any(|r| !r.converged) {
                return Ok(ExitCode::from(CliError::NotConverged(cfg.output_dir).exit_code() as u8));
            }
        }
        Command::CircuitMap { config, out } => {
            let input = load_circuit(&config)?;
            let report = cmd_circuit_map(&input, out.as_deref())?;
            print!("{}", report.table());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("jcpulse: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
