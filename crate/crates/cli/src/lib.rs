//! Batch runner for the pivotality checks.
//!
//! Each subcommand runs one suite (`all` runs the configured selection) and
//! writes `results.csv` and `summary.json` into a fresh `run-NNN` directory
//! under `--out`. Exit status: 0 when every check passes, 1 when any check
//! fails, 2 on usage or configuration errors.

pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use config::{check_suite, Config, SUITES};
use report::{next_run_dir, write_csv};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid `{0}`: {1}")]
    Invalid(&'static str, String),
    #[error("unknown suite `{0}` (known: identities, russo, poisson-derivative, stable, crofton)")]
    UnknownSuite(String),
    #[error("malformed specification `{0}`")]
    Spec(String),
    #[error("no seed: set `seed` in the config or pass --seed")]
    MissingSeed,
    #[error("the suite list is empty")]
    EmptySuites,
    #[error("--suite only applies to the `all` subcommand")]
    SuiteFlag,
    #[error("cannot write results: {0}")]
    Output(String),
}

#[derive(Debug, Parser)]
#[command(name = "pivotality", version, about = "Two-route numerical checks of pivotality and perturbation formulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving `run-NNN` result folders.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suite to run with `all` (repeatable; overrides the config list).
    #[arg(long = "suite", global = true)]
    pub suites: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    Identities,
    Russo,
    PoissonDerivative,
    Stable,
    Crofton,
    All,
}

/// What a successful invocation produced.
#[derive(Debug)]
pub struct Outcome {
    pub run_dir: PathBuf,
    pub rows: usize,
    pub failures: usize,
}

fn selection(cli: &Cli, config: &Config) -> Result<Vec<String>, ConfigError> {
    let single = match cli.command {
        Command::Identities => Some("identities"),
        Command::Russo => Some("russo"),
        Command::PoissonDerivative => Some("poisson-derivative"),
        Command::Stable => Some("stable"),
        Command::Crofton => Some("crofton"),
        Command::All => None,
    };
    if let Some(name) = single {
        if !cli.suites.is_empty() {
            return Err(ConfigError::SuiteFlag);
        }
        return Ok(vec![name.to_string()]);
    }
    let chosen = if !cli.suites.is_empty() {
        cli.suites.clone()
    } else if let Some(list) = &config.suites {
        list.clone()
    } else {
        SUITES.iter().map(|s| s.to_string()).collect()
    };
    if chosen.is_empty() {
        return Err(ConfigError::EmptySuites);
    }
    for s in &chosen {
        check_suite(s)?;
    }
    Ok(chosen)
}

/// Runs the selected suites and writes the reports.
pub fn execute(cli: &Cli) -> Result<Outcome, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).ok_or(ConfigError::MissingSeed)?;
    config.seed = Some(seed);
    config.validate()?;
    let suites = selection(cli, &config)?;

    let out = |e: std::io::Error| ConfigError::Output(e.to_string());
    let dir = next_run_dir(&cli.out).map_err(out)?;
    let mut rows = Vec::new();
    let mut per_suite = serde_json::Map::new();
    for name in &suites {
        let suite_rows = suites::run_suite(name, &config, seed);
        let failed: Vec<_> = suite_rows.iter().filter(|r| !r.pass).collect();
        println!("{name}: {}/{} checks passed", suite_rows.len() - failed.len(), suite_rows.len());
        for r in &failed {
            println!("  FAIL {} {} z_or_gap={} threshold={}", r.check_id, r.param_json, r.z_or_gap, r.threshold);
        }
        per_suite.insert(name.clone(), json!({"rows": suite_rows.len(), "failures": failed.len()}));
        rows.extend(suite_rows);
    }
    write_csv(&dir.join("results.csv"), &rows).map_err(out)?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let summary = json!({
        "seed": seed,
        "suites": suites,
        "rows": rows.len(),
        "failures": failures,
        "all_pass": failures == 0,
        "per_suite": per_suite,
        "config": config,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises");
    std::fs::write(dir.join("summary.json"), text + "\n").map_err(out)?;
    println!("wrote {}", dir.display());
    Ok(Outcome { run_dir: dir, rows: rows.len(), failures })
}

/// Process exit status for a parsed command line.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(o) if o.failures == 0 => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
