//! An overfitting scenario on a finite alphabet.
//!
//! Data are uniform on `{1, …, K}` and hypotheses are indicator functions
//! `w: {1..K} → {0, 1}` with loss `ℓ(w, z) = w(z)`. The algorithm outputs the
//! all-zeros hypothesis unless the first block of the sample falls in a small
//! region `Ω` of probability `φ`; in that case it outputs the hypothesis that
//! is zero exactly on the remaining `n − m` sample points and one elsewhere.
//!
//! The block-sample bound for this algorithm decays like `1/√n`, while with
//! probability `φ ≈ 1/(n ln n)` the realised gap between population and
//! empirical loss is close to 1.
//!
//! Parameter conventions: `K = ⌈3 n ln n⌉`, `α = e^{−m/n}`, `λ = √n`, and
//! `φ = region_count / K^m` with `region_count` the nearest positive integer
//! to `K^m / (n ln n)`. `Ω` is the set of the `region_count` lexicographically
//! smallest blocks in `{1..K}^m`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::sampling::{map_trials, trial_rng, uniform_int};

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleParams {
    n: usize,
    m: usize,
    k: u64,
    alpha: f64,
    phi: f64,
    region_count: BigUint,
    /// Base-`K` digits of `region_count − 1`, most significant first.
    region_last: Vec<u64>,
    lambda: f64,
}

impl CounterexampleParams {
    /// Derive every parameter from `(n, m)`.
    pub fn from_n(n: usize, m: usize) -> Result<Self> {
        check_shape(n, m)?;
        if 2 * m > n {
            return Err(invalid("m", format!("need m <= n/2, got n = {n}, m = {m}")));
        }
        let x = n as f64 * (n as f64).ln();
        let k = (3.0 * x).ceil();
        if k > u32::MAX as f64 {
            return Err(invalid("n", format!("alphabet size {k} exceeds u32 range")));
        }
        Self::build(n, m, k as u64)
    }

    /// Like [`CounterexampleParams::from_n`] but with a caller-chosen alphabet
    /// size and without the `m <= n/2` restriction. Only meant for exhaustive
    /// checks on tiny alphabets.
    #[doc(hidden)]
    pub fn with_alphabet_size(n: usize, m: usize, k: u64) -> Result<Self> {
        check_shape(n, m)?;
        if k < 2 || k > u32::MAX as u64 {
            return Err(invalid("k", format!("need 2 <= K <= u32::MAX, got {k}")));
        }
        Self::build(n, m, k)
    }

    fn build(n: usize, m: usize, k: u64) -> Result<Self> {
        let region_count = nearest_region_count(n, m, k);
        let k_pow_m = BigUint::from(k).pow(m as u32);
        if region_count > k_pow_m {
            return Err(invalid(
                "k",
                "alphabet too small for the requested overfit probability",
            ));
        }
        let region_last = base_k_digits(&(&region_count - 1u32), k, m);
        let phi = fraction_from_digits(&base_k_digits(&region_count, k, m + 1), k, m);
        Ok(CounterexampleParams {
            n,
            m,
            k,
            alpha: (-(m as f64) / n as f64).exp(),
            phi,
            region_count,
            region_last,
            lambda: (n as f64).sqrt(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Alphabet size `K`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Prior mass `α` on the all-zeros hypothesis.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Probability `φ` of the overfit region.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn region_count(&self) -> &BigUint {
        &self.region_count
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

fn check_shape(n: usize, m: usize) -> Result<()> {
    if n < 4 {
        return Err(invalid("n", format!("must be >= 4, got {n}")));
    }
    if m == 0 || m > n || !n.is_multiple_of(m) {
        return Err(Error::BlockSizeNotDivisor { n, m });
    }
    Ok(())
}

/// `max(1, round(K^m / x))` with `x` the double nearest to `n ln n`,
/// evaluated exactly.
fn nearest_region_count(n: usize, m: usize, k: u64) -> BigUint {
    let x = n as f64 * (n as f64).ln();
    // x = mantissa · 2^exponent exactly.
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
    let exponent = raw_exp - 1075;
    let mut numerator = BigUint::from(k).pow(m as u32);
    let mut denominator = BigUint::from(mantissa);
    if exponent < 0 {
        numerator <<= (-exponent) as usize;
    } else {
        denominator <<= exponent as usize;
    }
    // round half up: floor((2 num + den) / (2 den))
    let rounded = ((numerator << 1usize) + &denominator) / (denominator << 1usize);
    if rounded.is_zero() {
        BigUint::one()
    } else {
        rounded
    }
}

fn base_k_digits(value: &BigUint, k: u64, width: usize) -> Vec<u64> {
    let mut digits = vec![0u64; width];
    let mut rest = value.clone();
    let base = BigUint::from(k);
    for slot in digits.iter_mut().rev() {
        let digit = &rest % &base;
        *slot = digit.to_u64().expect("digit below base");
        rest /= &base;
    }
    debug_assert!(rest.is_zero());
    digits
}

/// `value / K^m` from `m + 1` base-`K` digits of `value`, by Horner's rule.
fn fraction_from_digits(digits: &[u64], k: u64, m: usize) -> f64 {
    let (integer, frac) = digits.split_at(digits.len() - m);
    let k_f = k as f64;
    let fractional = frac
        .iter()
        .rev()
        .fold(0.0, |acc, &d| (acc + d as f64) / k_f);
    integer.iter().fold(0.0, |acc, &d| acc * k_f + d as f64) + fractional
}

/// Whether a first block lies in the overfit region.
///
/// The block's rank in `{1..K}^m` is read in mixed radix (digits `z_i − 1`,
/// most significant first) and compared digit-wise with `region_count − 1`.
pub fn in_overfit_region(block: &[u64], params: &CounterexampleParams) -> Result<bool> {
    if block.len() != params.m {
        return Err(Error::SampleLength {
            expected: params.m,
            actual: block.len(),
        });
    }
    for &z in block {
        check_value(z, params.k)?;
    }
    Ok(block_rank_at_most(block, &params.region_last))
}

#[inline]
fn block_rank_at_most(block: &[u64], last: &[u64]) -> bool {
    for (&z, &limit) in block.iter().zip(last) {
        let digit = z - 1;
        if digit != limit {
            return digit < limit;
        }
    }
    true
}

#[inline]
fn check_value(z: u64, k: u64) -> Result<()> {
    if z == 0 || z > k {
        return Err(Error::SampleOutOfRange { value: z, k });
    }
    Ok(())
}

/// Output of the algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    /// Zero loss everywhere.
    AllZeros,
    /// Zero on `zero_points`, one everywhere else.
    OverfitComplement { zero_points: BTreeSet<u64> },
}

impl Hypothesis {
    /// Loss `w(z)`.
    pub fn loss(&self, z: u64) -> f64 {
        match self {
            Hypothesis::AllZeros => 0.0,
            Hypothesis::OverfitComplement { zero_points } => {
                if zero_points.contains(&z) {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// Run the (deterministic) algorithm on a sample of length `n`.
pub fn run_algorithm(sample: &[u64], params: &CounterexampleParams) -> Result<Hypothesis> {
    if sample.len() != params.n {
        return Err(Error::SampleLength {
            expected: params.n,
            actual: sample.len(),
        });
    }
    for &z in sample {
        check_value(z, params.k)?;
    }
    let (first, rest) = sample.split_at(params.m);
    if block_rank_at_most(first, &params.region_last) {
        Ok(Hypothesis::OverfitComplement {
            zero_points: rest.iter().copied().collect(),
        })
    } else {
        Ok(Hypothesis::AllZeros)
    }
}

/// Average loss of `h` over `sample`.
///
/// For the hypothesis produced from this sample only first-block points can
/// score 1, so the value is at most `m/n`.
pub fn empirical_loss(h: &Hypothesis, sample: &[u64]) -> f64 {
    match h {
        Hypothesis::AllZeros => 0.0,
        Hypothesis::OverfitComplement { zero_points } => {
            let misses = sample.iter().filter(|z| !zero_points.contains(z)).count();
            misses as f64 / sample.len() as f64
        }
    }
}

/// Exact population loss under the uniform distribution on `{1..K}`.
pub fn population_loss_exact(h: &Hypothesis, params: &CounterexampleParams) -> f64 {
    match h {
        Hypothesis::AllZeros => 0.0,
        Hypothesis::OverfitComplement { zero_points } => {
            (params.k - zero_points.len() as u64) as f64 / params.k as f64
        }
    }
}

/// Divergence terms on raw parameter values, for callers exploring limits.
pub mod analytic {
    /// `ln(1/(1 − α))`: block-1 divergence when the first block is in `Ω`.
    pub fn block1_overfit(alpha: f64) -> f64 {
        -(1.0 - alpha).ln()
    }

    /// `ln(1/α)`: block-1 divergence otherwise.
    pub fn block1_normal(alpha: f64) -> f64 {
        -alpha.ln()
    }

    /// `ln(1/α) + φ m ln K + φ ln(1/(1 − α))`: upper bound for blocks `j >= 2`.
    pub fn blockj_upper(alpha: f64, phi: f64, m: f64, k: f64) -> f64 {
        block1_normal(alpha) + phi * m * k.ln() + phi * block1_overfit(alpha)
    }

    /// Upper bound on `Σ_j E KL`:
    /// `φ ln(1/(1−α)) + (n/m) ln(1/α) + n φ ln K + (n/m) φ ln(1/(1−α))`.
    pub fn divergence_sum_upper(alpha: f64, phi: f64, n: f64, m: f64, k: f64) -> f64 {
        let overfit = if phi == 0.0 {
            0.0
        } else {
            phi * block1_overfit(alpha)
        };
        overfit + (n / m) * block1_normal(alpha) + n * phi * k.ln() + (n / m) * overfit
    }
}

pub fn divergence_block1_overfit(params: &CounterexampleParams) -> f64 {
    analytic::block1_overfit(params.alpha)
}

/// Equals `m/n` under `α = e^{−m/n}`.
pub fn divergence_block1_normal(params: &CounterexampleParams) -> f64 {
    analytic::block1_normal(params.alpha)
}

pub fn divergence_blockj_upper(params: &CounterexampleParams) -> f64 {
    analytic::blockj_upper(params.alpha, params.phi, params.m as f64, params.k as f64)
}

pub fn divergence_sum_upper(params: &CounterexampleParams) -> f64 {
    analytic::divergence_sum_upper(
        params.alpha,
        params.phi,
        params.n as f64,
        params.m as f64,
        params.k as f64,
    )
}

/// Per-block divergence upper bounds: block 1 averaged over the overfit
/// event, blocks `j >= 2` from [`divergence_blockj_upper`].
pub fn divergence_profile_upper(params: &CounterexampleParams) -> crate::bounds::DivergenceProfile {
    let blocks = params.n / params.m;
    let first = params.phi * divergence_block1_overfit(params)
        + (1.0 - params.phi) * divergence_block1_normal(params);
    let mut per_block = vec![divergence_blockj_upper(params); blocks];
    per_block[0] = first;
    crate::bounds::DivergenceProfile::new(per_block).expect("divergence bounds are nonnegative")
}

/// Right-hand side of the block-sample bound with the `1/4`-subgaussian
/// envelope at `λ = √n`: `1/(8√n) + divergence_sum_upper / √n`.
pub fn rhs_bound(params: &CounterexampleParams) -> f64 {
    let lambda = params.lambda;
    lambda / (8.0 * params.n as f64) + divergence_sum_upper(params) / lambda
}

/// Constant `c(n)` with `√n · rhs_bound <= c(n)`:
/// `17/8 + ln(n+1)/(n ln n) + (ln(n+1) + ln 3)/ln n + ln ln n / ln n`.
pub fn rhs_final_constant(n: usize) -> f64 {
    let n = n as f64;
    let ln_n = n.ln();
    let ln_n1 = (n + 1.0).ln();
    17.0 / 8.0 + ln_n1 / (n * ln_n) + (ln_n1 + 3f64.ln()) / ln_n + ln_n.ln() / ln_n
}

/// `(1 − m/n)(1 − 1/(3 ln n))`: gap between population and empirical loss
/// on every overfit realisation.
pub fn overfit_gap_lower(n: usize, m: usize) -> f64 {
    let n_f = n as f64;
    (1.0 - m as f64 / n_f) * (1.0 - 1.0 / (3.0 * n_f.ln()))
}

/// Upper bound on the realised sum of block divergences on an overfit
/// sample:
/// `ln(n+m) − ln m + 2 + ln 3/ln n + ln ln n/ln n + ln((n+m)/m)/(n ln n)`.
pub fn instantaneous_divergence_upper(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    let ln_n = n.ln();
    (n + m).ln() - m.ln()
        + 2.0
        + 3f64.ln() / ln_n
        + ln_n.ln() / ln_n
        + ((n + m) / m).ln() / (n * ln_n)
}

/// Aggregates of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub trials: usize,
    pub overfit_count: u64,
    pub overfit_frequency: f64,
    /// Smallest gap over overfit trials; `None` if there were none.
    pub conditional_gap_min: Option<f64>,
    pub conditional_gap_mean: Option<f64>,
    /// Mean gap over all trials.
    pub gen_mean: f64,
    /// Overfit trials whose gap fell below [`overfit_gap_lower`].
    pub gap_violations: u64,
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    overfit: bool,
    gap: f64,
}

/// Draw `trials` samples uniformly from `{1..K}^n`, run the algorithm, and
/// aggregate exact population and empirical losses.
pub fn mc_simulate(
    params: &CounterexampleParams,
    trials: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    let outcomes = map_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let sample: Vec<u64> = (0..params.n)
            .map(|_| uniform_int(&mut rng, params.k))
            .collect();
        let h = run_algorithm(&sample, params).expect("sampled values are in range");
        let gap = population_loss_exact(&h, params) - empirical_loss(&h, &sample);
        TrialOutcome {
            overfit: matches!(h, Hypothesis::OverfitComplement { .. }),
            gap,
        }
    });

    let lower = overfit_gap_lower(params.n, params.m);
    let mut overfit_count = 0u64;
    let mut gap_sum = 0.0;
    let mut overfit_gap_sum = 0.0;
    let mut gap_min: Option<f64> = None;
    let mut gap_violations = 0u64;
    for o in &outcomes {
        gap_sum += o.gap;
        if o.overfit {
            overfit_count += 1;
            overfit_gap_sum += o.gap;
            gap_min = Some(gap_min.map_or(o.gap, |g| g.min(o.gap)));
            if o.gap < lower {
                gap_violations += 1;
            }
        }
    }
    Ok(SimulationReport {
        trials,
        overfit_count,
        overfit_frequency: overfit_count as f64 / trials as f64,
        conditional_gap_min: gap_min,
        conditional_gap_mean: (overfit_count > 0).then(|| overfit_gap_sum / overfit_count as f64),
        gen_mean: gap_sum / trials as f64,
        gap_violations,
    })
}
