//! Comparator functions `d(r, s)` between an empirical loss `r` and a
//! population loss `s`.
//!
//! All logarithms are natural. The binary KL comparator takes the value
//! `+∞` when absolute continuity fails; that is a result, not an error.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitInterval(f64);

impl UnitInterval {
    pub const ZERO: UnitInterval = UnitInterval(0.0);
    pub const ONE: UnitInterval = UnitInterval(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(UnitInterval(value))
        } else {
            Err(Error::OutsideUnitInterval(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UnitInterval {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        UnitInterval::new(value)
    }
}

impl From<UnitInterval> for f64 {
    fn from(u: UnitInterval) -> f64 {
        u.0
    }
}

impl fmt::Display for UnitInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which comparator a bound is stated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparatorKind {
    Catoni { beta: f64 },
    BinaryKl,
    Difference,
}

impl ComparatorKind {
    pub fn catoni(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(ComparatorKind::Catoni { beta })
    }

    pub fn evaluate(&self, r: UnitInterval, s: UnitInterval) -> Result<f64> {
        match *self {
            ComparatorKind::Catoni { beta } => catoni(beta, r, s),
            ComparatorKind::BinaryKl => Ok(binary_kl(r, s)),
            ComparatorKind::Difference => Ok(difference(r.get(), s.get())),
        }
    }

    /// Short identifier used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            ComparatorKind::Catoni { .. } => "catoni",
            ComparatorKind::BinaryKl => "binary_kl",
            ComparatorKind::Difference => "difference",
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            "beta",
            format!("must be finite and > 0, got {beta}"),
        ))
    }
}

/// Catoni comparator `C_β(r, s) = −ln(1 − (1 − e^{−β}) s) − β r`.
pub fn catoni(beta: f64, r: UnitInterval, s: UnitInterval) -> Result<f64> {
    check_beta(beta)?;
    Ok(catoni_unchecked(beta, r.get(), s.get()))
}

#[inline]
fn catoni_unchecked(beta: f64, r: f64, s: f64) -> f64 {
    // 1 − e^{−β} as −expm1(−β) so small β keeps its digits.
    let shrink = -(-beta).exp_m1();
    -(-shrink * s).ln_1p() - beta * r
}

/// Binary relative entropy `kl(r ‖ s)` with `0 ln 0 = 0`.
///
/// Returns `+∞` exactly when `s = 0, r > 0` or `s = 1, r < 1`.
pub fn binary_kl(r: UnitInterval, s: UnitInterval) -> f64 {
    binary_kl_raw(r.get(), s.get())
}

pub(crate) fn binary_kl_raw(r: f64, s: f64) -> f64 {
    let head = if r == 0.0 {
        0.0
    } else if s == 0.0 {
        return f64::INFINITY;
    } else {
        r * (r / s).ln()
    };
    let tail = if r == 1.0 {
        0.0
    } else if s == 1.0 {
        return f64::INFINITY;
    } else {
        (1.0 - r) * ((1.0 - r) / (1.0 - s)).ln()
    };
    // Rounding can push the sum a hair below zero when r ≈ s.
    (head + tail).max(0.0)
}

/// Difference comparator `s − r`.
#[inline]
pub fn difference(r: f64, s: f64) -> f64 {
    s - r
}

const BETA_BRACKET: (f64, f64) = (1e-8, 50.0);
const GOLDEN_SECTION_ITERS: usize = 200;

/// `kl(r, s)` recovered as the supremum of Catoni comparators over `β`.
///
/// For `r <= s` this is a concave maximisation over `β > 0`, run as a golden
/// section search on `[1e-8, 50]`. For `r > s` the supremum over positive `β`
/// collapses to 0, and the search runs on the mirrored pair `(1 − r, 1 − s)`
/// instead, using `C_{−β}(r, s) = C_β(1 − r, 1 − s)`. When the maximiser
/// leaves the bracket (the pair sits near the boundary of the square) the
/// closed form is returned directly, as it is for infinite divergences.
pub fn kl_sup_over_beta(r: UnitInterval, s: UnitInterval) -> f64 {
    let closed = binary_kl(r, s);
    if !closed.is_finite() {
        return closed;
    }
    let (r, s) = if r.get() > s.get() {
        (1.0 - r.get(), 1.0 - s.get())
    } else {
        (r.get(), s.get())
    };
    if r == s {
        return 0.0;
    }
    if r == 0.0 || s == 1.0 {
        // Supremum is only attained as β → ∞.
        return closed;
    }

    let (lo, hi) = BETA_BRACKET;
    // d/dβ C_β = s e^{−β} / (1 − s + s e^{−β}) − r; concave in β.
    let slope = |beta: f64| {
        let t = s * (-beta).exp();
        t / (1.0 - s + t) - r
    };
    if slope(lo) <= 0.0 || slope(hi) >= 0.0 {
        return closed;
    }

    let objective = |beta: f64| catoni_unchecked(beta, r, s);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..GOLDEN_SECTION_ITERS {
        if b - a <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    fc.max(fd).max(objective(0.5 * (a + b)))
}

const KL_INVERSE_MAX_ITERS: usize = 200;

/// Largest `s ∈ [r, 1)` with `kl(r, s) <= c`.
///
/// Bisection on `[r, 1)` runs until the bracket collapses to adjacent doubles
/// (at most 200 halvings), which is finer than `1e-12`. Returns 1 when no
/// representable `s < 1` has `kl(r, s) > c`, in particular for `c = +∞`.
pub fn kl_inverse_upper(r: UnitInterval, c: f64) -> Result<UnitInterval> {
    if c.is_nan() || c < 0.0 {
        return Err(invalid("c", format!("must be >= 0, got {c}")));
    }
    if c == 0.0 {
        return Ok(r);
    }
    let r = r.get();
    let below_one = 1.0 - f64::EPSILON / 2.0;
    if r >= below_one || binary_kl_raw(r, below_one) <= c {
        return Ok(UnitInterval::ONE);
    }
    let (mut lo, mut hi) = (r, below_one);
    for _ in 0..KL_INVERSE_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_kl_raw(r, mid) > c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(UnitInterval(lo))
}

/// Pinsker conversion `(1/2) √kl`.
pub fn pinsker_upper(kl: f64) -> Result<f64> {
    if kl.is_nan() || kl < 0.0 {
        return Err(invalid("kl", format!("must be >= 0, got {kl}")));
    }
    Ok(0.5 * kl.sqrt())
}
