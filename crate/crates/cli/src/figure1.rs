//! True generalization error of the Gaussian sample mean against three
//! bounds, at block sizes 1, about `√n` and about `n/2`.

use macbound_core::bounds::{gen_bound_kl_direct, gen_bound_subgaussian};
use macbound_core::gaussian::{example_gen_bound, mc_gen_error, GaussianScenario};

use crate::output::{Cell, Record, Table};
use crate::{
    half_block_size, row_seed, sqrt_block_size, ExperimentConfig, ExperimentError, Outcome, Result,
};

/// Subgaussian variance proxy of a `[0, 1]`-valued loss.
pub const SIGMA_SQ: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Row {
    pub num_training_samples: usize,
    pub mc: f64,
    pub cat1: f64,
    pub kl1: f64,
    pub diff1: f64,
    pub klnhalf: f64,
    pub catnhalf: f64,
    pub diffnhalf: f64,
    pub klsqrt: f64,
    pub catsqrt: f64,
    pub diffsqrt: f64,
    pub mc_std_error: f64,
    pub msqrt_requested: f64,
    pub msqrt_effective: usize,
    pub mnhalf_effective: usize,
}

impl Record for Figure1Row {
    const COLUMNS: &'static [&'static str] = &[
        "num_training_samples",
        "mc",
        "cat1",
        "kl1",
        "diff1",
        "klnhalf",
        "catnhalf",
        "diffnhalf",
        "klsqrt",
        "catsqrt",
        "diffsqrt",
        "mc_std_error",
        "msqrt_requested",
        "msqrt_effective",
        "mnhalf_effective",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.num_training_samples.into(),
            self.mc.into(),
            self.cat1.into(),
            self.kl1.into(),
            self.diff1.into(),
            self.klnhalf.into(),
            self.catnhalf.into(),
            self.diffnhalf.into(),
            self.klsqrt.into(),
            self.catsqrt.into(),
            self.diffsqrt.into(),
            self.mc_std_error.into(),
            self.msqrt_requested.into(),
            self.msqrt_effective.into(),
            self.mnhalf_effective.into(),
        ]
    }
}

/// Bounds at one block size: (catoni, direct kl, subgaussian).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTriple {
    pub cat: f64,
    pub kl: f64,
    pub diff: f64,
}

pub fn bounds_at(mu: f64, n: usize, m: usize) -> Result<BoundTriple> {
    let sc = GaussianScenario::new(mu, n, m)?;
    let profile = sc.divergence_profile();
    Ok(BoundTriple {
        cat: example_gen_bound(&sc),
        kl: gen_bound_kl_direct(sc.partition(), &profile)?,
        diff: gen_bound_subgaussian(sc.partition(), SIGMA_SQ, &profile)?.bound,
    })
}

pub fn grid(config: &ExperimentConfig) -> Result<Vec<usize>> {
    let ns = match &config.n_values {
        Some(ns) => ns.clone(),
        None => (1..=config.n_max / 10).map(|k| 10 * k).collect(),
    };
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(ExperimentError::Config(format!(
            "figure1 needs n >= 2, got {bad}"
        )));
    }
    Ok(ns)
}

pub fn figure1_rows(config: &ExperimentConfig) -> Result<Vec<Figure1Row>> {
    let mu = config.mu;
    grid(config)?
        .into_iter()
        .map(|n| {
            let msqrt = sqrt_block_size(n);
            let mhalf = half_block_size(n);
            let one = bounds_at(mu, n, 1)?;
            let half = bounds_at(mu, n, mhalf)?;
            let root = bounds_at(mu, n, msqrt)?;
            let sc = GaussianScenario::new(mu, n, 1)?;
            let mc = mc_gen_error(&sc, config.trials, row_seed(config.seed, n))?;
            Ok(Figure1Row {
                num_training_samples: n,
                mc: mc.estimate,
                cat1: one.cat,
                kl1: one.kl,
                diff1: one.diff,
                klnhalf: half.kl,
                catnhalf: half.cat,
                diffnhalf: half.diff,
                klsqrt: root.kl,
                catsqrt: root.cat,
                diffsqrt: root.diff,
                mc_std_error: mc.std_error,
                msqrt_requested: (n as f64).sqrt(),
                msqrt_effective: msqrt,
                mnhalf_effective: mhalf,
            })
        })
        .collect()
}

/// Row-wise consistency checks; returns one message per failure.
pub fn check_rows(rows: &[Figure1Row]) -> Vec<String> {
    let mut failed = Vec::new();
    for r in rows {
        let n = r.num_training_samples;
        let closed = 0.5 * (1.0 / (2.0 * (n - 1) as f64)).sqrt();
        if (r.cat1 - closed).abs() > 1e-12 {
            failed.push(format!(
                "n={n}: cat1 {} differs from closed form {closed}",
                r.cat1
            ));
        }
        if r.mc > r.cat1 + 4.0 * r.mc_std_error {
            failed.push(format!("n={n}: mc {} exceeds cat1 {} + 4 se", r.mc, r.cat1));
        }
        for (label, cat, kl, diff) in [
            ("1", r.cat1, r.kl1, r.diff1),
            ("nhalf", r.catnhalf, r.klnhalf, r.diffnhalf),
            ("sqrt", r.catsqrt, r.klsqrt, r.diffsqrt),
        ] {
            if !(cat.is_finite() && kl.is_finite() && diff.is_finite() && cat >= 0.0) {
                failed.push(format!("n={n}: non-finite or negative bound at m={label}"));
            }
            if !(kl > cat && diff > cat) {
                failed.push(format!("n={n}: kl{label}/diff{label} not above cat{label}"));
            }
        }
    }
    failed
}

pub fn run_figure1(config: &ExperimentConfig) -> Result<Outcome> {
    let rows = figure1_rows(config)?;
    let failed_checks = check_rows(&rows);
    let mut metadata = config.metadata();
    metadata.push(("sigma_sq".into(), format!("{SIGMA_SQ}")));
    metadata.push((
        "m_sqrt_rule".into(),
        "largest divisor of n not above ceil(sqrt(n))".into(),
    ));
    metadata.push((
        "m_half_rule".into(),
        "largest divisor of n not above n/2".into(),
    ));
    Ok(Outcome {
        table: Table::from_records(metadata, &rows),
        failed_checks,
    })
}
