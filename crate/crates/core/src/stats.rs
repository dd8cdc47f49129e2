//! Small statistical helpers shared by the Monte Carlo routines.

use crate::error::{invalid, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// `+∞` for a single trial, where the spread is unknown.
    pub std_error: f64,
}

impl McEstimate {
    /// Two-pass mean and standard error, summed in index order.
    pub fn from_samples(samples: &[f64]) -> McEstimate {
        let n = samples.len();
        if n == 0 {
            return McEstimate {
                estimate: f64::NAN,
                std_error: f64::INFINITY,
            };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return McEstimate {
                estimate: mean,
                std_error: f64::INFINITY,
            };
        }
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        let variance = ss / (n - 1) as f64;
        McEstimate {
            estimate: mean,
            std_error: (variance / n as f64).sqrt(),
        }
    }

    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.std_error
    }
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal cdf, `Φ(x) = erfc(−x/√2)/2`.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Exact (Clopper–Pearson) two-sided confidence interval for a binomial
/// proportion with `successes` out of `trials`.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(invalid(
            "successes",
            format!("need 0 <= successes <= trials and trials > 0, got {successes}/{trials}"),
        ));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(invalid(
            "confidence",
            format!("must lie in (0, 1), got {confidence}"),
        ));
    }
    let tail = (1.0 - confidence) / 2.0;
    let k = successes as f64;
    let n = trials as f64;
    let lower = if successes == 0 {
        0.0
    } else {
        invert_increasing(
            |x| statrs::function::beta::beta_reg(k, n - k + 1.0, x),
            tail,
        )
    };
    let upper = if successes == trials {
        1.0
    } else {
        invert_increasing(
            |x| statrs::function::beta::beta_reg(k + 1.0, n - k, x),
            1.0 - tail,
        )
    };
    Ok((lower, upper))
}

fn invert_increasing<F: Fn(f64) -> f64>(f: F, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
