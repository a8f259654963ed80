//! Batch front-end: `pamlab --config exp.toml` runs one command and writes
//! its CSV tables, `summary.json` and a report on stdout.
//!
//! Exit status: 0 ok, 2 parse or usage error, 3 inadmissible parameters or
//! domain error, 4 numerical failure, 5 a check failed, 6 I/O error.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
use crate::par::set_threads;
pub use commands::{execute, Outcome};
pub use config::{Command, ExperimentConfig, Family};
pub use output::{Check, Summary, Table, TIMESTAMP_PREFIX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;
pub const EXIT_IO: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "pamlab", version, about = "Wiener-chaos experiments for the parabolic Anderson model")]
pub struct Args {
    /// Experiment config (TOML).
    #[arg(long, env = "PAMLAB_CONFIG")]
    pub config: PathBuf,
    /// Overrides `mc.base_seed`.
    #[arg(long, env = "PAMLAB_SEED")]
    pub seed: Option<u64>,
    /// Caps the worker pool.
    #[arg(long, env = "PAMLAB_THREADS")]
    pub threads: Option<usize>,
    /// Overrides `io.out`.
    #[arg(long, env = "PAMLAB_OUT")]
    pub out: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Usage(_) => EXIT_PARSE,
        Error::Inadmissible(_) | Error::Domain(_) => EXIT_INADMISSIBLE,
        Error::Numerical { .. } | Error::Degenerate(_) | Error::Capacity(_) => EXIT_NUMERICAL,
        Error::Io(_) => EXIT_IO,
    }
}

/// Loads the config and applies command-line overrides.
pub fn load(args: &Args) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(s) = args.seed {
        cfg.mc.base_seed = s;
    }
    if let Some(o) = &args.out {
        cfg.io.out = o.display().to_string();
    }
    Ok(cfg)
}

/// Runs the configured command and writes its artifacts under `io.out`.
pub fn run_config(cfg: &ExperimentConfig) -> Result<Summary> {
    let dir = Path::new(&cfg.io.out);
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let outcome = execute(cfg)?;
    let mut files = Vec::new();
    for t in &outcome.tables {
        files.push(t.write(dir)?);
    }
    let summary = Summary {
        command: cfg.command.name().into(),
        base_seed: cfg.mc.base_seed,
        passed: outcome.checks.iter().all(|c| c.passed),
        checks: outcome.checks,
        files,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dir.join("summary.json"), json + "\n")?;

    println!("pamlab {}", summary.command);
    for l in &outcome.report {
        println!("  {l}");
    }
    for c in &summary.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: measured {:.6e}, threshold {:.6e}", c.name, c.measured, c.threshold);
    }
    println!("wrote {} under {}", summary.files.join(", "), dir.display());
    Ok(summary)
}

pub fn run() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PARSE,
            };
        }
    };
    if let Some(n) = args.threads {
        set_threads(n);
    }
    match load(&args).and_then(|cfg| run_config(&cfg)) {
        Ok(s) if s.passed => EXIT_OK,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("pamlab: {e}");
            exit_code(&e)
        }
    }
}
