//! Exhaustive moment generating function checks over Bernoulli block means.

use macbound_core::bounds::{binomial_kl_mgf, catoni_binomial_mgf, ENUMERATION_CAP};

use crate::output::{Cell, Record, Table};
use crate::{ExperimentConfig, Outcome, Result};

pub const BETAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
pub const CATONI_P_POINTS: usize = 21;
pub const KL_P_POINTS: usize = 101;
pub const CATONI_TOLERANCE: f64 = 1e-12;
/// `m = 1` attains `2√m` exactly, so rounding can push the ratio past 1.
pub const KL_RATIO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MgfRow {
    pub envelope: &'static str,
    pub m: usize,
    pub p: f64,
    pub beta: Option<f64>,
    pub value: f64,
    pub reference: f64,
    pub ratio: f64,
}

impl Record for MgfRow {
    const COLUMNS: &'static [&'static str] =
        &["envelope", "m", "p", "beta", "value", "reference", "ratio"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.envelope.into(),
            self.m.into(),
            self.p.into(),
            self.beta.into(),
            self.value.into(),
            self.reference.into(),
            self.ratio.into(),
        ]
    }
}

fn p_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| i as f64 / (points - 1) as f64)
}

pub fn max_block_size(config: &ExperimentConfig) -> usize {
    config.n_max.min(ENUMERATION_CAP)
}

pub fn mgf_rows(m_max: usize) -> Result<Vec<MgfRow>> {
    let mut rows = Vec::new();
    for m in 1..=m_max {
        for &beta in &BETAS {
            for p in p_grid(CATONI_P_POINTS) {
                let value = catoni_binomial_mgf(m, p, beta, m as f64)?;
                rows.push(MgfRow {
                    envelope: "catoni",
                    m,
                    p,
                    beta: Some(beta),
                    value,
                    reference: 1.0,
                    ratio: value,
                });
            }
        }
        let reference = 2.0 * (m as f64).sqrt();
        for p in p_grid(KL_P_POINTS) {
            let value = binomial_kl_mgf(m, p)?;
            rows.push(MgfRow {
                envelope: "kl",
                m,
                p,
                beta: None,
                value,
                reference,
                ratio: value / reference,
            });
        }
    }
    Ok(rows)
}

pub fn check_rows(rows: &[MgfRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| match r.envelope {
            "catoni" => (r.value - 1.0).abs() >= CATONI_TOLERANCE,
            _ => r.ratio > 1.0 + KL_RATIO_SLACK,
        })
        .map(|r| {
            format!(
                "{} m={} p={} beta={:?}: value {}",
                r.envelope, r.m, r.p, r.beta, r.value
            )
        })
        .collect()
}

pub fn run_verify_mgf(config: &ExperimentConfig) -> Result<Outcome> {
    let m_max = max_block_size(config);
    let rows = mgf_rows(m_max)?;
    let failed_checks = check_rows(&rows);
    let mut metadata = config.metadata();
    metadata.push((
        "catoni_grid".into(),
        format!(
            "m=1..{m_max} x beta={} values x p={CATONI_P_POINTS} points, lambda'=m",
            BETAS.len()
        ),
    ));
    metadata.push((
        "kl_grid".into(),
        format!("m=1..{m_max} x p={KL_P_POINTS} points"),
    ));
    Ok(Outcome {
        table: Table::from_records(metadata, &rows),
        failed_checks,
    })
}
