//! Command-line front end for `fcab`.
//!
//! `fcab <simulate|sweep|lowerbound|validate> --config <path>` reads a JSON
//! config, runs it and writes one output file into `--out`:
//!
//! | subcommand   | config                | output            |
//! |--------------|-----------------------|-------------------|
//! | `simulate`   | [`ExperimentConfig`]  | `trials.jsonl`    |
//! | `sweep`      | [`ExperimentConfig`]  | `sweep.csv`       |
//! | `lowerbound` | [`LowerBoundConfig`]  | `lb_report.json`  |
//! | `validate`   | [`ValidationConfig`]  | `validation.json` |
//!
//! Outputs are written to a temporary file and renamed into place, so a failed
//! run never leaves a truncated file behind. Exit codes: 0 on success, 1 for
//! config errors, 2 for runtime errors.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use fcab::experiments::{
    run_lower_bound, run_sweep_with, run_trials, run_validation, ExperimentConfig,
    LowerBoundConfig, ValidationConfig,
};
use fcab::par::Execution;
use fcab::FcabError;
use serde::de::DeserializeOwned;
use thiserror::Error;

pub const LOG_ENV: &str = "FCAB_LOG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Run every trial and write one JSON line per trial.
    Simulate,
    /// Aggregate trials per (policy, N) into a CSV table.
    Sweep,
    /// Run the lower-bound protocol on the adversarial pair.
    Lowerbound,
    /// Check the weak-Lipschitz and margin assumptions.
    Validate,
}

impl Command {
    pub fn output_name(self) -> &'static str {
        match self {
            Command::Simulate => "trials.jsonl",
            Command::Sweep => "sweep.csv",
            Command::Lowerbound => "lb_report.json",
            Command::Validate => "validation.json",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "fcab",
    version,
    about = "Finite continuum-armed bandit experiments"
)]
pub struct CliConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON config file.
    #[arg(long = "config", value_name = "PATH")]
    pub config_path: PathBuf,
    /// Directory for the output file; created if missing.
    #[arg(long = "out", value_name = "DIR", default_value = ".")]
    pub output_dir: PathBuf,
    /// Overrides the config's `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("{}: at `{at}`: {message}", path.display())]
    Schema {
        path: PathBuf,
        at: String,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Invalid { path: PathBuf, source: FcabError },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Run(#[from] FcabError),

    #[error("{failed} sweep cells failed; the table holds the remaining rows")]
    CellsFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Schema { .. } | CliError::Invalid { .. } => 1,
            CliError::Write { .. } | CliError::Run(_) | CliError::CellsFailed { .. } => 2,
        }
    }
}

/// Deserializes a JSON file, reporting the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        at: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn invalid(path: &Path) -> impl FnOnce(FcabError) -> CliError + '_ {
    move |source| CliError::Invalid {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads and validates an experiment config.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let config: ExperimentConfig = parse_json(path)?;
    config.validate().map_err(invalid(path))?;
    Ok(config)
}

pub fn parse_lower_bound_config(path: &Path) -> Result<LowerBoundConfig, CliError> {
    let config: LowerBoundConfig = parse_json(path)?;
    config.validate().map_err(invalid(path))?;
    Ok(config)
}

pub fn parse_validation_config(path: &Path) -> Result<ValidationConfig, CliError> {
    let config: ValidationConfig = parse_json(path)?;
    config.validate().map_err(invalid(path))?;
    Ok(config)
}

/// Writes `dir/name` through a temporary file in the same directory.
fn write_atomic(
    dir: &Path,
    name: &str,
    fill: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let wrap = |source| CliError::Write {
        path: target.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(wrap)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    {
        let mut out = BufWriter::new(tmp.as_file_mut());
        fill(&mut out).map_err(wrap)?;
        out.flush().map_err(wrap)?;
    }
    tmp.persist(&target).map_err(|e| wrap(e.error))?;
    Ok(target)
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.write_all(b"\n")
}

/// Runs the subcommand and returns the path of the file it wrote.
pub fn run(cfg: &CliConfig) -> Result<PathBuf, CliError> {
    let exec = Execution::from_threads(cfg.threads);
    let path = cfg.config_path.as_path();
    let name = cfg.command.output_name();
    match cfg.command {
        Command::Simulate => {
            let mut config = parse_config(path)?;
            config.master_seed = cfg.seed.unwrap_or(config.master_seed);
            let trials = run_trials(&config, exec)?;
            log::info!("{} trials finished", trials.len());
            write_atomic(&cfg.output_dir, name, |out| {
                for trial in &trials {
                    serde_json::to_writer(&mut *out, trial)?;
                    out.write_all(b"\n")?;
                }
                Ok(())
            })
        }
        Command::Sweep => {
            let mut config = parse_config(path)?;
            config.master_seed = cfg.seed.unwrap_or(config.master_seed);
            let sweep = run_sweep_with(&config, exec)?;
            for policy in &config.policies {
                match sweep.exponent(*policy, Default::default()) {
                    Ok(fit) => log::info!(
                        "{policy}: regret exponent {:.3} (r2 {:.3})",
                        fit.slope,
                        fit.r2
                    ),
                    Err(e) => log::debug!("{policy}: no exponent fit ({e})"),
                }
            }
            let written = write_atomic(&cfg.output_dir, name, |out| {
                out.write_all(sweep.to_csv().as_bytes())
            })?;
            if !sweep.failures.is_empty() {
                for f in &sweep.failures {
                    log::error!("{} at N = {}: {}", f.policy, f.n, f.message);
                }
                return Err(CliError::CellsFailed {
                    failed: sweep.failures.len(),
                });
            }
            Ok(written)
        }
        Command::Lowerbound => {
            let mut config = parse_lower_bound_config(path)?;
            config.master_seed = cfg.seed.unwrap_or(config.master_seed);
            let report = run_lower_bound(&config, exec)?;
            log::info!(
                "max exceedance frequency {:.3} (target {}), KL {:.4} <= {:.4}: {}",
                report.max_frequency,
                report.target_frequency,
                report.instance_kl,
                report.kl_bound,
                report.kl_within_bound
            );
            if !report.size_condition_met {
                log::warn!("N is below the size at which the lower bound is proved");
            }
            write_atomic(&cfg.output_dir, name, |out| write_json(out, &report))
        }
        Command::Validate => {
            let config = parse_validation_config(path)?;
            if cfg.seed.is_some() {
                log::warn!("--seed has no effect on validate");
            }
            let summary = run_validation(&config)?;
            for entry in summary.entries.iter().filter(|e| !e.report.passed) {
                log::warn!(
                    "{}: {:?} check failed",
                    entry.label,
                    entry.report.assumption
                );
            }
            write_atomic(&cfg.output_dir, name, |out| write_json(out, &summary))
        }
    }
}

/// Runs the subcommand, logs the outcome and returns the process exit code.
pub fn dispatch(cfg: &CliConfig) -> u8 {
    match run(cfg) {
        Ok(path) => {
            log::info!("wrote {}", path.display());
            0
        }
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    }
}

/// Logging to stderr, filtered by `FCAB_LOG` (default `info`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "info");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}
