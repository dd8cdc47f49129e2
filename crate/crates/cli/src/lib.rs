//! Experiment drivers behind the `macbound` command.
//!
//! Each experiment computes a [`Table`] plus a list of failed consistency
//! checks. Writing the table and turning failures into an exit status is left
//! to the caller.

use std::fmt;
use std::path::PathBuf;

pub mod counterexample;
pub mod figure1;
pub mod output;
pub mod rates;
pub mod verify_mgf;

pub use output::{Cell, Record, Table};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] macbound_core::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentKind {
    Figure1,
    Counterexample,
    Rates,
    VerifyMgf,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Figure1 => "figure1",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::Rates => "rates",
            ExperimentKind::VerifyMgf => "verify-mgf",
        }
    }

    /// For verify-mgf this is the largest block size enumerated.
    pub fn default_n_max(self) -> usize {
        match self {
            ExperimentKind::Figure1 => 250,
            ExperimentKind::Counterexample => 256,
            ExperimentKind::Rates => 4096,
            ExperimentKind::VerifyMgf => 20,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n_max: usize,
    pub mu: f64,
    pub trials: usize,
    pub seed: u64,
    pub out_path: PathBuf,
    pub format: OutputFormat,
    /// Explicit grid replacing the one derived from `n_max`.
    pub n_values: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, out_path: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            experiment,
            n_max: experiment.default_n_max(),
            mu: 0.5,
            trials: 100_000,
            seed: 0,
            out_path: out_path.into(),
            format: OutputFormat::Csv,
            n_values: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be >= 1".into()));
        }
        if self.n_max < 10 {
            return Err(ExperimentError::Config(format!(
                "n-max must be >= 10, got {}",
                self.n_max
            )));
        }
        if self.experiment == ExperimentKind::Figure1 && !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(ExperimentError::Config(format!(
                "mu must lie in (0, 1), got {}",
                self.mu
            )));
        }
        if let Some(ns) = &self.n_values {
            if ns.is_empty() {
                return Err(ExperimentError::Config("n-values must not be empty".into()));
            }
        }
        Ok(())
    }

    /// Header lines shared by every experiment.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let grid = match &self.n_values {
            Some(ns) => ns
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" "),
            None => "default".into(),
        };
        vec![
            (
                "tool".into(),
                format!("macbound {}", env!("CARGO_PKG_VERSION")),
            ),
            ("experiment".into(), self.experiment.name().into()),
            ("seed".into(), self.seed.to_string()),
            ("trials".into(), self.trials.to_string()),
            ("mu".into(), format!("{}", self.mu)),
            ("n_max".into(), self.n_max.to_string()),
            ("n_values".into(), grid),
        ]
    }
}

/// Result of running an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    /// One message per failed consistency check.
    pub failed_checks: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failed_checks.is_empty()
    }
}

/// Compute the experiment selected by `config` without writing anything.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Figure1 => figure1::run_figure1(config),
        ExperimentKind::Counterexample => counterexample::run_counterexample(config),
        ExperimentKind::Rates => rates::run_rates(config),
        ExperimentKind::VerifyMgf => verify_mgf::run_verify_mgf(config),
    }
}

/// Compute and write to `config.out_path`.
pub fn run_and_write(config: &ExperimentConfig) -> Result<Outcome> {
    let outcome = run(config)?;
    outcome
        .table
        .write_to_path(&config.out_path, config.format)?;
    Ok(outcome)
}

/// Largest divisor of `n` that does not exceed `cap` (at least 1).
pub fn largest_divisor_at_most(n: usize, cap: usize) -> usize {
    (1..=cap.min(n))
        .rev()
        .find(|&d| n.is_multiple_of(d))
        .unwrap_or(1)
}

/// Block size standing in for `√n`: the largest divisor of `n` not above `⌈√n⌉`.
pub fn sqrt_block_size(n: usize) -> usize {
    largest_divisor_at_most(n, (n as f64).sqrt().ceil() as usize)
}

/// Block size standing in for `n/2`.
pub fn half_block_size(n: usize) -> usize {
    largest_divisor_at_most(n, n / 2)
}

/// Independent seed for the Monte Carlo run at sample size `n`.
pub(crate) fn row_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}
