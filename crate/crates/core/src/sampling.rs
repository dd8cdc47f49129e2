//! Reproducible random streams for Monte Carlo trials.
//!
//! Every trial draws from its own ChaCha8 stream: the key is derived from the
//! run seed and the stream number is the trial index. A trial's draws depend
//! only on `(seed, trial)`, so results do not change with the number of
//! worker threads or the order in which trials are scheduled.
//!
//! Floating-point transforms use the pure-Rust `libm` routines rather than
//! the platform math library, keeping fixed-seed output identical across
//! targets.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Random stream dedicated to one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform double in `[0, 1)` from the top 53 bits of one word.
#[inline]
pub fn uniform_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `1..=k`, by rejection (arc4random_uniform rule).
#[inline]
pub fn uniform_int<R: RngCore>(rng: &mut R, k: u64) -> u64 {
    assert!(k > 0, "uniform_int needs a nonempty range");
    let threshold = k.wrapping_neg() % k;
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % k + 1;
        }
    }
}

/// Standard normal draws by the Marsaglia polar method.
///
/// Each accepted pair of uniforms yields two variates; the second is cached.
pub struct NormalSampler<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> NormalSampler<R> {
    pub fn new(rng: R) -> Self {
        NormalSampler { rng, spare: None }
    }

    pub fn standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * uniform_f64(&mut self.rng) - 1.0;
            let v = 2.0 * uniform_f64(&mut self.rng) - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare = Some(v * factor);
                return u * factor;
            }
        }
    }

    /// Draw from `N(mean, variance)`.
    pub fn normal(&mut self, mean: f64, variance: f64) -> f64 {
        mean + libm::sqrt(variance) * self.standard()
    }
}

/// Evaluate `trial` for every index in `0..trials`, in parallel, returning
/// results in index order.
pub fn map_trials<T, F>(trials: usize, trial: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(trial).collect()
}
