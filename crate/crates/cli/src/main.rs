use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use macbound::{run_and_write, ExperimentConfig, ExperimentKind, OutputFormat};

/// Numerical experiments for block-sample MAC-Bayes bounds.
#[derive(Parser, Debug)]
#[command(name = "macbound", version)]
struct Cli {
    experiment: ExperimentKind,

    /// Largest sample size on the grid (largest block size for verify-mgf).
    /// Defaults depend on the experiment.
    #[arg(long)]
    n_max: Option<usize>,

    #[arg(long, default_value_t = 0.5)]
    mu: f64,

    #[arg(long, default_value_t = 100_000)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    out: PathBuf,

    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Comma-separated sample sizes replacing the default grid.
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("MACBOUND_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("MACBOUND_THREADS must be a positive integer, got {raw:?}"))?;
    anyhow::ensure!(threads > 0, "MACBOUND_THREADS must be positive");
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring worker pool")?;
    Ok(())
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    configure_threads()?;
    let config = ExperimentConfig {
        experiment: cli.experiment,
        n_max: cli.n_max.unwrap_or(cli.experiment.default_n_max()),
        mu: cli.mu,
        trials: cli.trials,
        seed: cli.seed,
        out_path: cli.out,
        format: cli.format,
        n_values: cli.n_values,
    };
    let outcome = run_and_write(&config)?;
    if outcome.passed() {
        eprintln!(
            "{}: {} rows written to {}",
            config.experiment,
            outcome.table.rows.len(),
            config.out_path.display()
        );
        return Ok(ExitCode::SUCCESS);
    }
    for msg in &outcome.failed_checks {
        eprintln!("check failed: {msg}");
    }
    Ok(ExitCode::from(2))
}
