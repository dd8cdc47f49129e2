//! Gaussian mean estimation under truncated square loss.
//!
//! Data are `Z_i ~ N(μ, 1)`, the algorithm outputs the sample mean, and the
//! loss is `min((w − z)², 1)`. Conditioning the output on block `j` alone
//! gives `N(μ(n − m)/n + T_j/n, (n − m)/n²)` with `T_j` the block sum, and the
//! prior `N(μ, (n − m)/n²)` makes the expected block divergence
//! `m / (2(n − m))`.

use crate::bounds::{BlockPartition, DivergenceProfile};
use crate::error::{invalid, Error, Result};
use crate::sampling::{map_trials, trial_rng, NormalSampler};
use crate::stats::{normal_cdf, normal_pdf, McEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianScenario {
    mu: f64,
    partition: BlockPartition,
}

impl GaussianScenario {
    pub fn new(mu: f64, n: usize, m: usize) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(invalid("mu", format!("must lie in (0, 1), got {mu}")));
        }
        Ok(GaussianScenario {
            mu,
            partition: BlockPartition::new(n, m)?,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn m(&self) -> usize {
        self.partition.m()
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// Variance `(n − m)/n²` shared by block posteriors and the prior.
    fn posterior_variance(&self) -> Result<f64> {
        let (n, m) = (self.n() as f64, self.m() as f64);
        if self.m() == self.n() {
            return Err(invalid("m", "block posteriors are point masses when m = n"));
        }
        Ok((n - m) / (n * n))
    }

    /// Distribution of the output given only that block `j` sums to `block_sum`.
    pub fn block_posterior(&self, block_sum: f64) -> Result<GaussianPosterior> {
        let (n, m) = (self.n() as f64, self.m() as f64);
        GaussianPosterior::new(
            self.mu * (n - m) / n + block_sum / n,
            self.posterior_variance()?,
        )
    }

    /// The prior `N(μ, (n − m)/n²)`.
    pub fn prior(&self) -> Result<GaussianPosterior> {
        GaussianPosterior::new(self.mu, self.posterior_variance()?)
    }

    /// Profile of `J` copies of [`expected_block_divergence`].
    pub fn divergence_profile(&self) -> DivergenceProfile {
        DivergenceProfile::uniform(self.partition.blocks(), expected_block_divergence(self))
            .expect("closed-form divergence is nonnegative")
    }
}

/// A normal distribution over hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPosterior {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianPosterior {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) || !mean.is_finite() {
            return Err(invalid(
                "variance",
                format!("need finite mean and variance > 0, got N({mean}, {variance})"),
            ));
        }
        Ok(GaussianPosterior { mean, variance })
    }

    /// `KL(self ‖ other)` for univariate normals.
    pub fn kl_to(&self, other: &GaussianPosterior) -> f64 {
        let ratio = self.variance / other.variance;
        let diff = self.mean - other.mean;
        0.5 * (ratio - 1.0 - ratio.ln() + diff * diff / other.variance)
    }
}

/// `min((w − z)², 1)`.
#[inline]
pub fn truncated_loss(w: f64, z: f64) -> f64 {
    let d = w - z;
    (d * d).min(1.0)
}

/// `E min((w − Z)², 1)` for `Z ~ N(μ, 1)`.
///
/// With `D = w − Z ~ N(δ, 1)`, `δ = w − μ`, the loss splits into
/// `P(|D| >= 1) + E[D² 1{|D| < 1}]`, both in closed form through `Φ` and `φ`.
pub fn population_loss(w: f64, mu: f64) -> f64 {
    let delta = w - mu;
    // D = δ + X with X standard normal; |D| < 1 iff a < X < b.
    let a = -1.0 - delta;
    let b = 1.0 - delta;
    let inside = if a >= 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    let (pdf_a, pdf_b) = (normal_pdf(a), normal_pdf(b));
    let first_moment = pdf_a - pdf_b;
    let second_moment = inside + a * pdf_a - b * pdf_b;
    let clipped = 1.0 - inside;
    let value = clipped + delta * delta * inside + 2.0 * delta * first_moment + second_moment;
    value.clamp(0.0, 1.0)
}

/// `E KL(P_{W|S_j} ‖ Q_W) = m / (2(n − m))`, infinite when `m = n`.
pub fn expected_block_divergence(sc: &GaussianScenario) -> f64 {
    let (n, m) = (sc.n(), sc.m());
    if m == n {
        return f64::INFINITY;
    }
    m as f64 / (2.0 * (n - m) as f64)
}

/// `gen <= (1/2) √(1 / (2(n − m)))`, infinite when `m = n`.
pub fn example_gen_bound(sc: &GaussianScenario) -> f64 {
    let (n, m) = (sc.n(), sc.m());
    if m == n {
        return f64::INFINITY;
    }
    0.5 * (1.0 / (2.0 * (n - m) as f64)).sqrt()
}

/// Monte Carlo estimate of the expected block divergence.
///
/// Each trial draws the `m` observations of a block, forms the block
/// posterior and evaluates its Gaussian KL divergence to the prior.
pub fn mc_block_divergence(sc: &GaussianScenario, trials: usize, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    if sc.m() == sc.n() {
        return Err(Error::Degenerate(
            "block divergence is infinite when m = n; nothing to estimate".into(),
        ));
    }
    let prior = sc.prior()?;
    let (mu, m) = (sc.mu(), sc.m());
    let samples = map_trials(trials, |t| {
        let mut normals = NormalSampler::new(trial_rng(seed, t));
        let block_sum: f64 = (0..m).map(|_| mu + normals.standard()).sum();
        sc.block_posterior(block_sum)
            .expect("posterior variance is positive for m < n")
            .kl_to(&prior)
    });
    Ok(McEstimate::from_samples(&samples))
}

/// Monte Carlo estimate of `gen = E[L(W) − L̂(W, S)]` for the sample mean.
///
/// The block size of the scenario plays no role here.
pub fn mc_gen_error(sc: &GaussianScenario, trials: usize, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    let (mu, n) = (sc.mu(), sc.n());
    let samples = map_trials(trials, |t| {
        let mut normals = NormalSampler::new(trial_rng(seed, t));
        let sample: Vec<f64> = (0..n).map(|_| mu + normals.standard()).collect();
        let w = sample.iter().sum::<f64>() / n as f64;
        let empirical = sample.iter().map(|&z| truncated_loss(w, z)).sum::<f64>() / n as f64;
        population_loss(w, mu) - empirical
    });
    Ok(McEstimate::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sc(n: usize, m: usize) -> GaussianScenario {
        GaussianScenario::new(0.5, n, m).unwrap()
    }

    #[test]
    fn scenario_validation() {
        assert!(GaussianScenario::new(0.0, 10, 1).is_err());
        assert!(GaussianScenario::new(1.0, 10, 1).is_err());
        assert!(GaussianScenario::new(0.5, 10, 3).is_err());
        assert!(sc(10, 10).prior().is_err());
        let post = sc(10, 2).block_posterior(1.3).unwrap();
        assert_abs_diff_eq!(post.mean, 0.5 * 0.8 + 0.13, epsilon = 1e-15);
        assert_abs_diff_eq!(post.variance, 0.08, epsilon = 1e-15);
    }

    #[test]
    fn truncated_loss_examples() {
        assert_eq!(truncated_loss(0.3, 0.3), 0.0);
        assert_eq!(truncated_loss(0.0, 2.0), 1.0);
        assert_eq!(truncated_loss(0.0, 0.5), 0.25);
        assert_eq!(truncated_loss(1.0, 0.0), 1.0);
    }

    #[test]
    fn population_loss_examples() {
        // quadrature (mpmath) of E min(D², 1), D ~ N(0, 1): 0.51605855096171330...
        assert_abs_diff_eq!(
            population_loss(0.5, 0.5),
            0.516_058_550_961_713_3,
            epsilon = 1e-12
        );
        // D ~ N(1, 1): 0.67936530724895543...
        assert_abs_diff_eq!(
            population_loss(1.5, 0.5),
            0.679_365_307_248_955_4,
            epsilon = 1e-12
        );
        assert!(population_loss(10.5, 0.5) > 1.0 - 1e-10);
        assert!(population_loss(-9.5, 0.5) > 1.0 - 1e-10);
    }

    #[test]
    fn divergence_closed_form() {
        assert_abs_diff_eq!(
            expected_block_divergence(&sc(100, 1)),
            1.0 / 198.0,
            epsilon = 1e-17
        );
        assert_eq!(expected_block_divergence(&sc(100, 50)), 0.5);
        assert_eq!(expected_block_divergence(&sc(37, 37)), f64::INFINITY);
    }

    #[test]
    fn gen_bound_closed_form() {
        assert_abs_diff_eq!(
            example_gen_bound(&sc(2, 1)),
            0.353_553_390_593_273_8,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            example_gen_bound(&sc(100, 1)),
            0.035_533_452_725_935_07,
            epsilon = 1e-15
        );
        assert_eq!(example_gen_bound(&sc(12, 12)), f64::INFINITY);
    }

    #[test]
    fn gaussian_kl_matches_block_formula() {
        let s = sc(100, 4);
        let t = 3.1;
        let kl = s.block_posterior(t).unwrap().kl_to(&s.prior().unwrap());
        let direct = 100.0f64.powi(2) * (t / 100.0 - 0.5 * 4.0 / 100.0).powi(2) / (2.0 * 96.0);
        assert_abs_diff_eq!(kl, direct, epsilon = 1e-14);
    }

    #[test]
    fn mc_block_divergence_single_trial() {
        let e = mc_block_divergence(&sc(100, 1), 1, 3).unwrap();
        assert!(e.estimate >= 0.0);
        assert!(mc_block_divergence(&sc(100, 1), 0, 3).is_err());
        assert!(mc_block_divergence(&sc(10, 10), 10, 3).is_err());
    }

    #[test]
    fn mc_gen_error_with_one_sample() {
        // n = 1: W = Z_1, empirical loss 0, so every trial contributes L(Z_1) > 0.
        let e = mc_gen_error(&sc(1, 1), 50, 9).unwrap();
        assert!(e.estimate > 0.0);
        let again = mc_gen_error(&sc(1, 1), 50, 9).unwrap();
        assert_eq!(e, again);
    }
}
