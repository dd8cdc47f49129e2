//! Analytic bound chain and simulation for the overfitting scenario.

use macbound_core::counterexample::{
    instantaneous_divergence_upper, mc_simulate, overfit_gap_lower, rhs_bound, rhs_final_constant,
    CounterexampleParams,
};
use macbound_core::stats::clopper_pearson;

use crate::output::{Cell, Record, Table};
use crate::{row_seed, ExperimentConfig, ExperimentError, Outcome, Result};

/// Confidence level of the interval around the overfit frequency.
pub const CONFIDENCE: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub n: usize,
    pub m: usize,
    pub k: u64,
    pub phi: f64,
    pub alpha: f64,
    pub rhs_bound: f64,
    pub sqrt_n_rhs_bound: f64,
    pub rhs_final_constant: f64,
    pub overfit_gap_lower: f64,
    pub instantaneous_divergence_upper: f64,
    pub trials: usize,
    pub overfit_count: u64,
    pub overfit_frequency: f64,
    pub frequency_ci_lower: f64,
    pub frequency_ci_upper: f64,
    pub conditional_gap_min: Option<f64>,
    pub conditional_gap_mean: Option<f64>,
    pub gen_mean: f64,
    pub gap_violations: u64,
}

impl Record for CounterexampleRow {
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "m",
        "k",
        "phi",
        "alpha",
        "rhs_bound",
        "sqrt_n_rhs_bound",
        "rhs_final_constant",
        "overfit_gap_lower",
        "instantaneous_divergence_upper",
        "trials",
        "overfit_count",
        "overfit_frequency",
        "frequency_ci_lower",
        "frequency_ci_upper",
        "conditional_gap_min",
        "conditional_gap_mean",
        "gen_mean",
        "gap_violations",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.n.into(),
            self.m.into(),
            self.k.into(),
            self.phi.into(),
            self.alpha.into(),
            self.rhs_bound.into(),
            self.sqrt_n_rhs_bound.into(),
            self.rhs_final_constant.into(),
            self.overfit_gap_lower.into(),
            self.instantaneous_divergence_upper.into(),
            self.trials.into(),
            self.overfit_count.into(),
            self.overfit_frequency.into(),
            self.frequency_ci_lower.into(),
            self.frequency_ci_upper.into(),
            self.conditional_gap_min.into(),
            self.conditional_gap_mean.into(),
            self.gen_mean.into(),
            self.gap_violations.into(),
        ]
    }
}

/// `n = 16, 32, 64, …` up to `n_max`, or the explicit list.
pub fn grid(config: &ExperimentConfig) -> Result<Vec<usize>> {
    let ns = match &config.n_values {
        Some(ns) => ns.clone(),
        None => std::iter::successors(Some(16usize), |n| n.checked_mul(2))
            .take_while(|&n| n <= config.n_max)
            .collect(),
    };
    if let Some(&bad) = ns.iter().find(|&&n| n < 4) {
        return Err(ExperimentError::Config(format!(
            "counterexample needs n >= 4, got {bad}"
        )));
    }
    Ok(ns)
}

pub fn counterexample_row(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<CounterexampleRow> {
    let p = CounterexampleParams::from_n(n, m)?;
    let sim = mc_simulate(&p, trials, seed)?;
    let (lo, hi) = clopper_pearson(sim.overfit_count, trials as u64, CONFIDENCE)?;
    let rhs = rhs_bound(&p);
    Ok(CounterexampleRow {
        n,
        m,
        k: p.k(),
        phi: p.phi(),
        alpha: p.alpha(),
        rhs_bound: rhs,
        sqrt_n_rhs_bound: (n as f64).sqrt() * rhs,
        rhs_final_constant: rhs_final_constant(n),
        overfit_gap_lower: overfit_gap_lower(n, m),
        instantaneous_divergence_upper: instantaneous_divergence_upper(n, m),
        trials,
        overfit_count: sim.overfit_count,
        overfit_frequency: sim.overfit_frequency,
        frequency_ci_lower: lo,
        frequency_ci_upper: hi,
        conditional_gap_min: sim.conditional_gap_min,
        conditional_gap_mean: sim.conditional_gap_mean,
        gen_mean: sim.gen_mean,
        gap_violations: sim.gap_violations,
    })
}

pub fn check_rows(rows: &[CounterexampleRow]) -> Vec<String> {
    let mut failed = Vec::new();
    for r in rows {
        let n = r.n;
        if r.sqrt_n_rhs_bound > r.rhs_final_constant {
            failed.push(format!(
                "n={n}: sqrt(n) rhs_bound {} above constant {}",
                r.sqrt_n_rhs_bound, r.rhs_final_constant
            ));
        }
        if !(r.frequency_ci_lower <= r.phi && r.phi <= r.frequency_ci_upper) {
            failed.push(format!(
                "n={n}: phi {} outside [{}, {}]",
                r.phi, r.frequency_ci_lower, r.frequency_ci_upper
            ));
        }
        if r.gap_violations > 0 {
            failed.push(format!(
                "n={n}: {} overfit trials below the gap bound",
                r.gap_violations
            ));
        }
        if let Some(g) = r.conditional_gap_min {
            if g < r.overfit_gap_lower {
                failed.push(format!("n={n}: gap {g} below {}", r.overfit_gap_lower));
            }
        }
    }
    failed
}

pub fn run_counterexample(config: &ExperimentConfig) -> Result<Outcome> {
    let rows = grid(config)?
        .into_iter()
        .map(|n| counterexample_row(n, 1, config.trials, row_seed(config.seed, n)))
        .collect::<Result<Vec<_>>>()?;
    let failed_checks = check_rows(&rows);
    let mut metadata = config.metadata();
    metadata.push(("m".into(), "1".into()));
    metadata.push(("ci_confidence".into(), format!("{CONFIDENCE}")));
    Ok(Outcome {
        table: Table::from_records(metadata, &rows),
        failed_checks,
    })
}
