//! Convergence rates under a divergence growth assumption.
//!
//! If the expected block divergence grows like `O(m^γ)/Θ(n)` and the block
//! size is `m = n^α`, the block-sample bounds decay polynomially in `n`. Rates
//! are kept symbolic: a power of `n` plus a flag for a `ln n` factor.

use crate::error::{invalid, Error, Result};

/// Growth exponent `γ` of the block divergence, and optionally the decay
/// exponent `ε` of the empirical loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAssumption {
    gamma: f64,
    epsilon: Option<f64>,
}

impl RateAssumption {
    pub fn new(gamma: f64, epsilon: Option<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        if let Some(eps) = epsilon {
            check_epsilon(eps)?;
        }
        Ok(RateAssumption { gamma, epsilon })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }
}

/// `O(n^exponent)`, times `ln n` when `log_factor` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub exponent: f64,
    pub log_factor: bool,
    pub alpha_used: f64,
}

/// Rate of the kl-based bound: a divergence term plus an empirical-loss residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastRate {
    pub kl_term_exponent: f64,
    /// Always carries a log factor.
    pub residual: RateResult,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid(
            "gamma",
            format!("must be finite and >= 0, got {gamma}"),
        ));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(
            "epsilon",
            format!("must be finite and > 0, got {eps}"),
        ));
    }
    Ok(())
}

/// `gen = O(n^{(α(γ − 1) − 1)/2})` for block size `m = n^α`.
pub fn gen_rate_exponent(gamma: f64, alpha: f64) -> Result<RateResult> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    Ok(RateResult {
        exponent: (alpha * (gamma - 1.0) - 1.0) / 2.0,
        log_factor: false,
        alpha_used: alpha,
    })
}

/// The `α` minimising the exponent: 1 when `γ < 1`, else 0.
pub fn optimal_alpha(gamma: f64) -> f64 {
    if gamma < 1.0 {
        1.0
    } else {
        0.0
    }
}

/// Exponents of `O(n^{α(γ−1)−1}) + O(n^{−ε} ln n)`.
pub fn fast_rate_exponents(gamma: f64, alpha: f64, epsilon: f64) -> Result<FastRate> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    check_epsilon(epsilon)?;
    Ok(FastRate {
        kl_term_exponent: alpha * (gamma - 1.0) - 1.0,
        residual: RateResult {
            exponent: -epsilon,
            log_factor: true,
            alpha_used: alpha,
        },
    })
}

/// Upper bound on `s` given `kl(r, s) <= x` and `r <= 1/2`:
/// `2x − (r/2) ln r + r + r²`, with `0 ln 0 = 0`.
pub fn lemma3_upper(r: f64, x: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&r) {
        return Err(invalid("r", format!("must lie in [0, 1/2], got {r}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(invalid("x", format!("must be >= 0, got {x}")));
    }
    let entropy_term = if r == 0.0 { 0.0 } else { -(r / 2.0) * r.ln() };
    Ok(2.0 * x + entropy_term + r + r * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `ln value = intercept + slope · ln n`.
///
/// `r_squared` is 1 when the values are constant (the fit is exact).
pub fn empirical_rate_fit(points: &[(u64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let mut ns: Vec<u64> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    if ns[0] == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Degenerate("n values must be distinct".into()));
    }
    if let Some(&(n, v)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
        return Err(invalid(
            "value",
            format!("must be finite and > 0, got {v} at n = {n}"),
        ));
    }

    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = ys.iter().sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - x_mean, y - y_mean);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).min(1.0)
    };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gen_rate_examples() {
        for alpha in [0.0, 0.3, 1.0] {
            assert_eq!(gen_rate_exponent(1.0, alpha).unwrap().exponent, -0.5);
        }
        assert_eq!(gen_rate_exponent(0.0, 1.0).unwrap().exponent, -1.0);
        let r = gen_rate_exponent(2.0, 0.0).unwrap();
        assert_eq!(r.exponent, -0.5);
        assert!(!r.log_factor);
        assert_eq!(r.alpha_used, 0.0);
        assert!(gen_rate_exponent(1.0, 1.5).is_err());
        assert!(gen_rate_exponent(1.0, -0.1).is_err());
        assert!(gen_rate_exponent(-1.0, 0.5).is_err());
        assert!(gen_rate_exponent(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn optimal_alpha_examples() {
        assert_eq!(optimal_alpha(0.5), 1.0);
        assert_eq!(optimal_alpha(1.0), 0.0);
        assert_eq!(optimal_alpha(2.0), 0.0);
        assert_eq!(optimal_alpha(0.0), 1.0);
    }

    #[test]
    fn fast_rate_examples() {
        let f = fast_rate_exponents(1.0, 1.0, 1.0).unwrap();
        assert_eq!(f.kl_term_exponent, -1.0);
        assert_eq!(f.residual.exponent, -1.0);
        assert!(f.residual.log_factor);
        let f = fast_rate_exponents(0.0, 1.0, 0.5).unwrap();
        assert_eq!((f.kl_term_exponent, f.residual.exponent), (-2.0, -0.5));
        let f = fast_rate_exponents(2.0, 0.0, 1.0).unwrap();
        assert_eq!((f.kl_term_exponent, f.residual.exponent), (-1.0, -1.0));
        assert!(fast_rate_exponents(1.0, 1.0, 0.0).is_err());
        assert!(fast_rate_exponents(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn assumption_validation() {
        assert!(RateAssumption::new(0.0, None).is_ok());
        assert!(RateAssumption::new(1.5, Some(0.5)).is_ok());
        assert!(RateAssumption::new(-0.5, None).is_err());
        assert!(RateAssumption::new(1.0, Some(0.0)).is_err());
    }

    #[test]
    fn mean_converter_examples() {
        assert_eq!(lemma3_upper(0.0, 0.3).unwrap(), 0.6);
        // 0.1 + 0.05 ln 10 + 0.1 + 0.01
        assert_abs_diff_eq!(
            lemma3_upper(0.1, 0.05).unwrap(),
            0.325_129_254_649_702_3,
            epsilon = 1e-15
        );
        assert!(lemma3_upper(0.6, 0.1).is_err());
        assert!(lemma3_upper(-0.1, 0.1).is_err());
        assert!(lemma3_upper(0.2, -0.1).is_err());
        assert!(lemma3_upper(0.5, 0.0).is_ok());
    }

    #[test]
    fn fit_exact_power_law() {
        let pts: Vec<(u64, f64)> = (6..=12)
            .map(|k| (1u64 << k, 3.0 * ((1u64 << k) as f64).powf(-0.5)))
            .collect();
        let fit = empirical_rate_fit(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.intercept, 3f64.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fit_constant_series() {
        let pts = [(10, 2.5), (20, 2.5), (40, 2.5), (80, 2.5)];
        let fit = empirical_rate_fit(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-10);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn fit_rejections() {
        assert!(empirical_rate_fit(&[(1, 1.0), (2, 1.0)]).is_err());
        assert!(empirical_rate_fit(&[(1, 1.0), (2, 1.0), (2, 3.0)]).is_err());
        assert!(empirical_rate_fit(&[(1, 1.0), (2, 0.0), (3, 3.0)]).is_err());
        assert!(empirical_rate_fit(&[(1, 1.0), (2, -1.0), (3, 3.0)]).is_err());
        assert!(empirical_rate_fit(&[(0, 1.0), (2, 1.0), (3, 3.0)]).is_err());
    }
}
