//! The block-sample MAC-Bayes bound and its specialisations.
//!
//! The sample of size `n` is split into `J = n/m` consecutive blocks of size
//! `m`. The general bound reads
//!
//! ```text
//! E d(E L̂, E L) <= [ J · ln Φ_m(λ m / n) + Σ_j D_j ] / λ
//! ```
//!
//! where `Φ_m` bounds the moment generating function of the comparator on an
//! `m`-sample empirical loss and `D_j` is the expected divergence between the
//! hypothesis distribution conditioned on block `j` alone and the prior.
//! Everything here consumes the `D_j` as numbers; how they were obtained is
//! the caller's business.

use crate::comparators::{binary_kl_raw, pinsker_upper, ComparatorKind};
use crate::error::{invalid, Error, Result};

/// How a sample of size `n` is cut into blocks of size `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    m: usize,
}

impl BlockPartition {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(invalid(
                "m",
                format!("need 1 <= m <= n, got n = {n}, m = {m}"),
            ));
        }
        if m > n || !n.is_multiple_of(m) {
            return Err(Error::BlockSizeNotDivisor { n, m });
        }
        Ok(BlockPartition { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of blocks `J = n/m`.
    pub fn blocks(&self) -> usize {
        self.n / self.m
    }

    /// Index range of block `j` (zero-based) within the sample.
    pub fn block_range(&self, j: usize) -> std::ops::Range<usize> {
        j * self.m..(j + 1) * self.m
    }
}

/// Which moment-generating-function bound is assumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeKind {
    /// Catoni comparator with a `[0, 1]` loss: `Φ_m(m) = 1`.
    CatoniUnit { beta: f64 },
    /// Binary KL comparator with a `[0, 1]` loss: `Φ_m(m) = 2√m`.
    MaurerKl,
    /// Difference comparator with a σ²-subgaussian loss:
    /// `Φ_m(λ') = exp(σ² λ'² / (2m))` for all `λ' > 0`.
    Subgaussian { sigma_sq: f64 },
}

/// A bound `Φ_m` on the comparator MGF, with its domain `(0, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfEnvelope {
    kind: EnvelopeKind,
    domain_bound: f64,
}

impl MgfEnvelope {
    pub fn catoni_unit(beta: f64) -> Result<Self> {
        ComparatorKind::catoni(beta)?;
        Ok(MgfEnvelope {
            kind: EnvelopeKind::CatoniUnit { beta },
            domain_bound: f64::INFINITY,
        })
    }

    pub fn maurer_kl() -> Self {
        MgfEnvelope {
            kind: EnvelopeKind::MaurerKl,
            domain_bound: f64::INFINITY,
        }
    }

    pub fn subgaussian(sigma_sq: f64) -> Result<Self> {
        if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
            return Err(invalid(
                "sigma_sq",
                format!("must be finite and > 0, got {sigma_sq}"),
            ));
        }
        Ok(MgfEnvelope {
            kind: EnvelopeKind::Subgaussian { sigma_sq },
            domain_bound: f64::INFINITY,
        })
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn domain_bound(&self) -> f64 {
        self.domain_bound
    }

    /// The comparator this envelope is a bound for.
    pub fn comparator(&self) -> ComparatorKind {
        match self.kind {
            EnvelopeKind::CatoniUnit { beta } => ComparatorKind::Catoni { beta },
            EnvelopeKind::MaurerKl => ComparatorKind::BinaryKl,
            EnvelopeKind::Subgaussian { .. } => ComparatorKind::Difference,
        }
    }

    /// `ln Φ_m(λ')`.
    ///
    /// The Catoni and Maurer envelopes are only known at `λ' = m`; asking for
    /// any other point is an error.
    pub fn log_eval(&self, m: usize, lambda_prime: f64) -> Result<f64> {
        if !(lambda_prime > 0.0 && lambda_prime < self.domain_bound) {
            return Err(invalid(
                "lambda_prime",
                format!("must lie in (0, {}), got {lambda_prime}", self.domain_bound),
            ));
        }
        let m_f = m as f64;
        let at_m = (lambda_prime - m_f).abs() <= 1e-12 * m_f;
        match self.kind {
            EnvelopeKind::CatoniUnit { .. } if at_m => Ok(0.0),
            EnvelopeKind::MaurerKl if at_m => Ok((2.0 * m_f.sqrt()).ln()),
            EnvelopeKind::CatoniUnit { .. } => Err(Error::EnvelopeUndefined {
                envelope: "catoni-unit",
                m,
                lambda_prime,
            }),
            EnvelopeKind::MaurerKl => Err(Error::EnvelopeUndefined {
                envelope: "maurer-kl",
                m,
                lambda_prime,
            }),
            EnvelopeKind::Subgaussian { sigma_sq } => {
                Ok(sigma_sq * lambda_prime * lambda_prime / (2.0 * m_f))
            }
        }
    }

    /// `Φ_m(λ')`.
    pub fn eval(&self, m: usize, lambda_prime: f64) -> Result<f64> {
        self.log_eval(m, lambda_prime).map(f64::exp)
    }
}

/// Per-block expected divergences `D_j`, each in `[0, +∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceProfile {
    per_block: Vec<f64>,
}

impl DivergenceProfile {
    pub fn new(per_block: Vec<f64>) -> Result<Self> {
        if let Some(bad) = per_block.iter().find(|d| d.is_nan() || **d < 0.0) {
            return Err(invalid(
                "per_block",
                format!("divergences must be >= 0, got {bad}"),
            ));
        }
        Ok(DivergenceProfile { per_block })
    }

    /// `blocks` copies of the same divergence.
    pub fn uniform(blocks: usize, divergence: f64) -> Result<Self> {
        DivergenceProfile::new(vec![divergence; blocks])
    }

    pub fn per_block(&self) -> &[f64] {
        &self.per_block
    }

    pub fn len(&self) -> usize {
        self.per_block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_block.is_empty()
    }

    /// `Σ_j D_j`, `+∞` if any block is infinite.
    pub fn total(&self) -> f64 {
        self.per_block.iter().sum()
    }

    fn checked_total(&self, part: &BlockPartition) -> Result<f64> {
        if self.per_block.len() != part.blocks() {
            return Err(Error::ProfileLength {
                expected: part.blocks(),
                actual: self.per_block.len(),
            });
        }
        Ok(self.total())
    }
}

/// Value of a bound together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub comparator: ComparatorKind,
    pub lambda_used: Option<f64>,
    pub finite: bool,
}

impl BoundReport {
    fn new(value: f64, comparator: ComparatorKind, lambda_used: Option<f64>) -> Self {
        BoundReport {
            value,
            comparator,
            lambda_used,
            finite: value.is_finite(),
        }
    }
}

/// The general block-sample bound at a given `λ ∈ (0, b·n/m)`.
pub fn theorem1_bound(
    part: &BlockPartition,
    env: &MgfEnvelope,
    lambda: f64,
    div: &DivergenceProfile,
) -> Result<BoundReport> {
    let n = part.n() as f64;
    let m = part.m() as f64;
    let upper = env.domain_bound() * n / m;
    if !(lambda > 0.0 && lambda < upper) {
        return Err(Error::LambdaOutOfRange { lambda, upper });
    }
    let total = div.checked_total(part)?;
    if total.is_infinite() {
        return Ok(BoundReport::new(
            f64::INFINITY,
            env.comparator(),
            Some(lambda),
        ));
    }
    let lambda_prime = lambda * (m / n);
    let log_phi = env.log_eval(part.m(), lambda_prime)?;
    let value = ((n / m) * log_phi + total) / lambda;
    Ok(BoundReport::new(value, env.comparator(), Some(lambda)))
}

/// `(1/n) Σ_j D_j`: bounds both the expected Catoni comparator and the kl of
/// the expected losses, for losses in `[0, 1]`.
pub fn catoni_rhs(part: &BlockPartition, div: &DivergenceProfile) -> Result<f64> {
    Ok(div.checked_total(part)? / part.n() as f64)
}

/// `gen <= √( Σ_j D_j / (4n) )`.
pub fn gen_bound_catoni(part: &BlockPartition, div: &DivergenceProfile) -> Result<f64> {
    pinsker_upper(catoni_rhs(part, div)?)
}

/// `ln(2√m)/m + (1/n) Σ_j D_j`: the bound obtained by plugging the binary KL
/// comparator in directly.
pub fn kl_direct_bound(part: &BlockPartition, div: &DivergenceProfile) -> Result<f64> {
    let m = part.m() as f64;
    Ok((2.0 * m.sqrt()).ln() / m + catoni_rhs(part, div)?)
}

pub fn gen_bound_kl_direct(part: &BlockPartition, div: &DivergenceProfile) -> Result<f64> {
    pinsker_upper(kl_direct_bound(part, div)?)
}

/// Generalization bound for a σ²-subgaussian loss and the `λ` attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgaussianBound {
    pub bound: f64,
    pub lambda_star: f64,
}

/// `gen <= √(2σ² Σ_j D_j / n)`, attained at `λ* = √(2n Σ_j D_j / σ²)`.
///
/// With zero total divergence the bound is 0 and `λ*` is reported as 0.
pub fn gen_bound_subgaussian(
    part: &BlockPartition,
    sigma_sq: f64,
    div: &DivergenceProfile,
) -> Result<SubgaussianBound> {
    MgfEnvelope::subgaussian(sigma_sq)?;
    let total = div.checked_total(part)?;
    let n = part.n() as f64;
    if total == 0.0 {
        return Ok(SubgaussianBound {
            bound: 0.0,
            lambda_star: 0.0,
        });
    }
    Ok(SubgaussianBound {
        bound: (2.0 * sigma_sq * total / n).sqrt(),
        lambda_star: (2.0 * n * total / sigma_sq).sqrt(),
    })
}

/// Markov conversion of an expected bound into one holding with
/// probability at least `1 − δ`. Only meaningful for nonnegative comparators.
pub fn markov_high_prob_bound(expected_bound: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    if expected_bound.is_nan() || expected_bound < 0.0 {
        return Err(invalid(
            "expected_bound",
            format!("must be >= 0, got {expected_bound}"),
        ));
    }
    Ok(expected_bound / delta)
}

/// Closed form of `E exp(λ' C_β(K/m, p))` for `K ~ Binomial(m, p)`:
///
/// ```text
/// (1 + p(e^{−βλ'/m} − 1))^m / (1 + p(e^{−β} − 1))^{λ'}
/// ```
///
/// which is exactly 1 at `λ' = m`.
pub fn catoni_binomial_mgf(m: usize, p: f64, beta: f64, lambda_prime: f64) -> Result<f64> {
    check_m(m)?;
    check_p(p)?;
    ComparatorKind::catoni(beta)?;
    if !(lambda_prime > 0.0 && lambda_prime.is_finite()) {
        return Err(invalid(
            "lambda_prime",
            format!("must be > 0, got {lambda_prime}"),
        ));
    }
    let m_f = m as f64;
    let numerator = (p * (-beta * (lambda_prime / m_f)).exp_m1()).ln_1p();
    let denominator = (p * (-beta).exp_m1()).ln_1p();
    Ok((m_f * numerator - lambda_prime * denominator).exp())
}

/// Largest `m` for which [`binomial_kl_mgf`] enumerates exactly.
pub const ENUMERATION_CAP: usize = 25;

/// `Σ_{k=0}^{m} Binom(k; m, p) · exp(m · kl(k/m, p))` by exact enumeration.
pub fn binomial_kl_mgf(m: usize, p: f64) -> Result<f64> {
    check_m(m)?;
    check_p(p)?;
    if m > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            m,
            cap: ENUMERATION_CAP,
        });
    }
    let m_f = m as f64;
    let total = (0..=m)
        .filter_map(|k| {
            let log_pmf = log_binomial_pmf(k, m, p)?;
            let kl = binary_kl_raw(k as f64 / m_f, p);
            Some((log_pmf + m_f * kl).exp())
        })
        .sum();
    Ok(total)
}

/// `ln Binom(k; m, p)`, or `None` when the outcome has probability zero.
fn log_binomial_pmf(k: usize, m: usize, p: f64) -> Option<f64> {
    let failures = m - k;
    if (p == 0.0 && k > 0) || (p == 1.0 && failures > 0) {
        return None;
    }
    let log_p = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    let log_q = if failures == 0 {
        0.0
    } else {
        failures as f64 * (-p).ln_1p()
    };
    Some(log_binomial_coefficient(m, k) + log_p + log_q)
}

fn log_binomial_coefficient(m: usize, k: usize) -> f64 {
    // Exact in f64 for m <= ENUMERATION_CAP.
    let k = k.min(m - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (m - i) as f64 / (i + 1) as f64;
    }
    c.round().ln()
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("m", "must be >= 1"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutsideUnitInterval(p));
    }
    Ok(())
}
