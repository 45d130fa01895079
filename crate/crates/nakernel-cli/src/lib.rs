//! Command-line surface for the estimator stack: one TOML config and one
//! seed fully determine every run.
//!
//! Each command writes a flat CSV payload (`<out>/<command>.csv`) and a
//! JSON sidecar (`<out>/<command>.json`) carrying the resolved config, its
//! SHA-256, the seed, the worker count, and the pass/fail checks.  Re-running
//! with the sidecar's embedded config reproduces the payload byte for byte
//! at any worker count (estimates are bit-identical by construction; worker
//! count 1 is the reference schedule).
//!
//! Exit codes: 0 = all checks passed, 1 = checks ran and some failed
//! (the record says which), 2 = configuration or runtime error.

pub mod commands;
pub mod config;
pub mod record;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

/// Environment fallback for `--workers`.
pub const WORKERS_ENV: &str = "NAKERNEL_WORKERS";

#[derive(Debug, Clone, Parser)]
#[command(
    name = "nakernel",
    version,
    about = "Monte Carlo experiments for evolution and boundary kernels on meta-abelian solvable groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,

    /// TOML experiment configuration (built-in defaults when omitted).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed; overrides the config file's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; overrides NAKERNEL_WORKERS (1 = reference schedule).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output directory for the CSV payload and JSON sidecar.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Sample exponential-functional perpetuities and compare them to
    /// their inverse-gamma limit law (KS statistic per drift strength).
    VerifyDufresne,
    /// Check the reflection closed forms and tail bounds against one
    /// shared path simulation.
    VerifyReflection,
    /// Tabulate the skew-product evolution kernel on an (m, v) grid and
    /// check its normalization.
    Kernel,
    /// Fit kernel-envelope constants on one half of a simulated sample
    /// and count violations on the held-out half.
    VerifyBounds,
    /// Estimate the boundary kernel at points and fit its radial decay
    /// slope along a direction.
    Poisson,
    /// Print the closed-form decay-exponent table (pure algebra).
    Exponents,
}

impl CommandKind {
    /// Kebab-case command name; also the payload file stem.
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::VerifyDufresne => "verify-dufresne",
            CommandKind::VerifyReflection => "verify-reflection",
            CommandKind::Kernel => "kernel",
            CommandKind::VerifyBounds => "verify-bounds",
            CommandKind::Poisson => "poisson",
            CommandKind::Exponents => "exponents",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Kernel(#[from] nakernel::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where a finished run left its artifacts, and whether it passed.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub passed: bool,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

/// Resolves the worker count: flag, then NAKERNEL_WORKERS, then the
/// machine size.  Builds without the `parallel` feature always run one
/// worker regardless of the request.
pub fn resolve_workers(flag: Option<usize>) -> Result<usize, CliError> {
    let requested = match flag {
        Some(0) => {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        Some(w) => w,
        None => match std::env::var(WORKERS_ENV) {
            Ok(raw) => match raw.trim().parse::<usize>() {
                Ok(w) if w >= 1 => w,
                _ => {
                    return Err(CliError::Config(format!(
                        "{WORKERS_ENV} must be a positive integer, got {raw:?}"
                    )));
                }
            },
            Err(std::env::VarError::NotPresent) => std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            Err(std::env::VarError::NotUnicode(_)) => {
                return Err(CliError::Config(format!(
                    "{WORKERS_ENV} must be valid unicode"
                )));
            }
        },
    };
    if cfg!(feature = "parallel") {
        Ok(requested)
    } else {
        Ok(1)
    }
}

fn load_config(cli: &Cli) -> Result<config::ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        None => config::ExperimentConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            config::ExperimentConfig::from_toml(&text)?
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Runs one command end to end: load config, configure the pool, evaluate,
/// persist the record.  `Ok` means the run completed; `passed` reports the
/// checks.
pub fn execute(cli: &Cli) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let cfg = load_config(cli)?;
    let workers = resolve_workers(cli.workers)?;
    // False just means the global pool was already built (one build per
    // process); results do not depend on the worker count either way.
    let _ = nakernel::exec::configure_workers(workers);

    let resolved_toml = cfg.to_toml()?;
    let output = commands::evaluate(cli.command, &cfg)?;
    let passed = output.passed();

    let record = record::ResultRecord {
        command: cli.command.name().to_string(),
        version: format!("v{}", env!("CARGO_PKG_VERSION")),
        seed: cfg.seed,
        workers,
        config_sha256: record::sha256_hex(&resolved_toml),
        config: resolved_toml,
        wall_time_secs: start.elapsed().as_secs_f64(),
        payload_csv: format!("{}.csv", cli.command.name()),
        passed,
        checks: output.checks.clone(),
    };

    std::fs::create_dir_all(&cli.out)?;
    let csv_path = cli.out.join(format!("{}.csv", cli.command.name()));
    let json_path = cli.out.join(format!("{}.json", cli.command.name()));
    record::write_csv(&csv_path, &output.header, &output.rows)?;
    record::write_json(&json_path, &record)?;

    for check in &record.checks {
        let tag = if check.pass { "PASS" } else { "FAIL" };
        println!(
            "check {}: {tag} (value {}, threshold {})",
            check.name, check.value, check.threshold
        );
    }
    println!(
        "{}: {} — wrote {} and {}",
        cli.command.name(),
        if passed { "all checks passed" } else { "some checks FAILED" },
        csv_path.display(),
        json_path.display()
    );

    Ok(RunSummary {
        passed,
        csv_path,
        json_path,
    })
}

/// `execute` mapped onto the documented exit codes.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(summary) if summary.passed => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
