//! `pamd`: batch runner for the dormancy-model simulators and solvers.
//!
//! Every subcommand reads an optional JSON config (flat keys, see
//! `ExperimentConfig`), applies flag overrides, validates, runs, and writes
//! CSV or JSON that embeds the resolved config.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 acceptance failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pamd_core::{Error, Result};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "pamd",
    version,
    about = "Parabolic Anderson model with dormancy in an exclusion environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "PAMD_THREADS")]
    threads: Option<usize>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reduced replica budget for `reproduce`.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Annealed <U(t)> by Feynman–Kac Monte Carlo (CSV).
    EstimateU,
    /// Quenched PAM on one sampled environment (CSV field).
    SolvePam,
    /// Top eigenvalues of the annealed operator on a small torus (JSON).
    Spectral,
    /// Survival envelopes, Green's function and growth-rate bounds (JSON).
    Envelopes,
    /// Fit -log <U> from an estimate-u CSV against the dimension's scale (JSON + plot CSV).
    Fit,
    /// Stationarity statistics of the exclusion process (JSON).
    EnvStats,
    /// Run the acceptance suite and print a pass/fail table.
    Reproduce,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::EstimateU => "estimate-u",
            Command::SolvePam => "solve-pam",
            Command::Spectral => "spectral",
            Command::Envelopes => "envelopes",
            Command::Fit => "fit",
            Command::EnvStats => "env-stats",
            Command::Reproduce => "reproduce",
        }
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(Error::Validation(format!(
                "config is for `{c}`, not `{name}`"
            )));
        }
    }
    cfg.command = Some(name.to_string());
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.replicas {
        cfg.replicas = n;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

enum Failure {
    Core(Error),
    Acceptance,
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Core(Error::Validation(format!("thread pool: {e}"))))?;
    }
    let cfg = resolve(cli).map_err(Failure::Core)?;
    let res = match cli.command {
        Command::EstimateU => commands::estimate_u(&cfg),
        Command::SolvePam => commands::solve_pam(&cfg),
        Command::Spectral => commands::spectral(&cfg),
        Command::Envelopes => commands::envelopes(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::EnvStats => commands::env_stats(&cfg),
        Command::Reproduce => match commands::reproduce(&cfg, cli.quick) {
            Ok(true) => Ok(()),
            Ok(false) => return Err(Failure::Acceptance),
            Err(e) => Err(e),
        },
    };
    res.map_err(Failure::Core)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance) => ExitCode::from(3),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
