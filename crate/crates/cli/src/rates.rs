//! Fitted decay of the Gaussian-example bound against the predicted exponent.

use macbound_core::gaussian::{example_gen_bound, GaussianScenario};
use macbound_core::rates::{empirical_rate_fit, gen_rate_exponent};

use crate::output::{Cell, Record, Table};
use crate::{half_block_size, sqrt_block_size, ExperimentConfig, Outcome, Result};

/// Divergence growth exponent of the Gaussian example.
pub const GAMMA: f64 = 1.0;
pub const TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub alpha: f64,
    pub m_rule: &'static str,
    pub gamma: f64,
    pub predicted_exponent: f64,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl Record for RateRow {
    const COLUMNS: &'static [&'static str] = &[
        "alpha",
        "m_rule",
        "gamma",
        "predicted_exponent",
        "fitted_slope",
        "fitted_intercept",
        "r_squared",
        "points",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.alpha.into(),
            self.m_rule.into(),
            self.gamma.into(),
            self.predicted_exponent.into(),
            self.fitted_slope.into(),
            self.fitted_intercept.into(),
            self.r_squared.into(),
            self.points.into(),
        ]
    }
}

/// `n = 2^k` for `64 <= n <= n_max`, or the explicit list.
pub fn grid(config: &ExperimentConfig) -> Vec<usize> {
    match &config.n_values {
        Some(ns) => ns.clone(),
        None => (6..usize::BITS)
            .map(|k| 1usize << k)
            .take_while(|&n| n <= config.n_max)
            .collect(),
    }
}

/// Block-size rules for `m ≈ n^α`. At `α = 1` the bound is infinite for
/// `m = n`, so `n/2` is used instead.
type BlockRule = (f64, &'static str, fn(usize) -> usize);

const RULES: [BlockRule; 3] = [
    (0.0, "1", |_| 1),
    (0.5, "sqrt", sqrt_block_size),
    (1.0, "half", half_block_size),
];

pub fn rate_rows(config: &ExperimentConfig) -> Result<Vec<RateRow>> {
    let ns = grid(config);
    RULES
        .iter()
        .map(|&(alpha, m_rule, block)| {
            let points = ns
                .iter()
                .map(|&n| {
                    let sc = GaussianScenario::new(0.5, n, block(n).max(1))?;
                    Ok((n as u64, example_gen_bound(&sc)))
                })
                .collect::<Result<Vec<_>>>()?;
            let fit = empirical_rate_fit(&points)?;
            Ok(RateRow {
                alpha,
                m_rule,
                gamma: GAMMA,
                predicted_exponent: gen_rate_exponent(GAMMA, alpha)?.exponent,
                fitted_slope: fit.slope,
                fitted_intercept: fit.intercept,
                r_squared: fit.r_squared,
                points: points.len(),
            })
        })
        .collect()
}

pub fn run_rates(config: &ExperimentConfig) -> Result<Outcome> {
    let rows = rate_rows(config)?;
    let failed_checks = rows
        .iter()
        .filter(|r| (r.fitted_slope - r.predicted_exponent).abs() > TOLERANCE)
        .map(|r| {
            format!(
                "alpha={}: slope {} vs predicted {}",
                r.alpha, r.fitted_slope, r.predicted_exponent
            )
        })
        .collect();
    let mut metadata = config.metadata();
    metadata.push(("slope_tolerance".into(), format!("{TOLERANCE}")));
    Ok(Outcome {
        table: Table::from_records(metadata, &rows),
        failed_checks,
    })
}
