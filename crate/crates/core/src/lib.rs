//! Block-sample MAC-Bayes generalization bounds.
//!
//! The crate is organised around the pieces a bound evaluation needs:
//!
//! * [`comparators`]: the Catoni, binary-KL and difference comparators, the
//!   kl inverse and the Pinsker conversion.
//! * [`bounds`]: the general block-sample bound for an arbitrary MGF envelope
//!   and divergence profile, its closed-form specialisations, and exact
//!   binomial enumeration of the MGF conditions.
//! * [`gaussian`]: Gaussian mean estimation under truncated square loss, with
//!   closed-form divergences and Monte Carlo oracles.
//! * [`counterexample`]: the overfitting scenario on a finite alphabet that
//!   separates expected and high-probability guarantees.
//! * [`rates`]: convergence-rate exponents and log-log slope fitting.
//!
//! Divergences and bounds are extended reals: `f64::INFINITY` is an ordinary
//! result meaning "vacuous", never an error.

pub mod bounds;
pub mod comparators;
pub mod counterexample;
mod error;
pub mod gaussian;
pub mod rates;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
