//! Bootstrap-pairs and jackknife index generation, and BCa intervals.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, tag};
use crate::special::{norm_cdf, norm_quantile};

/// Replicate count, master seed and significance level of a bootstrap run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResamplePlan {
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl ResamplePlan {
    pub fn new(replicates: usize, seed: u64, alpha: f64) -> Result<Self> {
        if replicates < 50 {
            return Err(Error::InvalidArgument(format!(
                "at least 50 bootstrap replicates are required, got {replicates}"
            )));
        }
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 0.5), got {alpha}"
            )));
        }
        Ok(Self {
            replicates,
            seed,
            alpha,
        })
    }

    /// Same replicate count and level, seed moved to a derived sub-stream.
    pub fn derive(&self, path: &[u64]) -> Self {
        Self {
            seed: rng::derive_seed(self.seed, path),
            ..*self
        }
    }
}

impl Default for ResamplePlan {
    fn default() -> Self {
        Self {
            replicates: 500,
            seed: 42,
            alpha: 0.05,
        }
    }
}

/// Row indices of bootstrap replicate `replicate`: `n` uniform draws with
/// replacement from `0..n`. Depends only on `(plan.seed, replicate, n)`.
pub fn bootstrap_indices(n: usize, plan: &ResamplePlan, replicate: usize) -> Vec<usize> {
    let mut r = rng::stream(plan.seed, &[tag::BOOTSTRAP, replicate as u64, n as u64]);
    (0..n).map(|_| r.random_range(0..n)).collect()
}

/// `0..n` without `leave_out`, ascending.
pub fn jackknife_indices(n: usize, leave_out: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != leave_out).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    Bilateral,
    /// `[lower, +inf)`.
    LowerUnilateral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcaInterval {
    pub lower: f64,
    pub upper: f64,
    pub z0: f64,
    pub acceleration: f64,
    pub sided: Sidedness,
    /// All bootstrap estimates were equal.
    pub degenerate: bool,
    /// The jackknife estimates had zero spread; acceleration set to 0.
    pub acceleration_undefined: bool,
}

impl BcaInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Type-7 (linear interpolation) sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Jackknife acceleration `Σ d³ / (6 (Σ d²)^{3/2})`, `d = mean - θ₍ᵢ₎`.
/// `None` when the jackknife values have no spread.
pub fn jackknife_acceleration(jack: &[f64]) -> Option<f64> {
    if jack.is_empty() {
        return None;
    }
    let m = jack.iter().sum::<f64>() / jack.len() as f64;
    let (mut s2, mut s3) = (0.0, 0.0);
    for &v in jack {
        let d = m - v;
        s2 += d * d;
        s3 += d * d * d;
    }
    if s2 > 0.0 && s2.is_finite() {
        Some(s3 / (6.0 * s2.powf(1.5)))
    } else {
        None
    }
}

fn adjusted_level(z0: f64, a: f64, z_alpha: f64, lower_end: bool) -> f64 {
    let s = z0 + z_alpha;
    let denom = 1.0 - a * s;
    if denom <= 0.0 {
        // the correction breaks down; fall back to the widest endpoint
        return if lower_end { 0.0 } else { 1.0 };
    }
    norm_cdf(z0 + s / denom)
}

/// Bias-corrected and accelerated bootstrap interval at level `1 - alpha`.
///
/// `z0 = Φ⁻¹(#{θ* < θ̂} / R)` (strict inequality; proportions 0 and 1 are
/// moved to `1/(2R)` and `1 - 1/(2R)`), the acceleration comes from the
/// jackknife values and the endpoints are type-7 quantiles of the bootstrap
/// distribution at the adjusted levels.
pub fn bca_interval(
    boot: &[f64],
    theta_hat: f64,
    jack: &[f64],
    alpha: f64,
    sided: Sidedness,
) -> Result<BcaInterval> {
    if boot.is_empty() || boot.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "bootstrap estimates must be finite and non-empty".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let upper_inf = matches!(sided, Sidedness::LowerUnilateral);
    if boot.iter().all(|&v| v == boot[0]) {
        return Ok(BcaInterval {
            lower: theta_hat,
            upper: if upper_inf { f64::INFINITY } else { theta_hat },
            z0: 0.0,
            acceleration: 0.0,
            sided,
            degenerate: true,
            acceleration_undefined: false,
        });
    }
    let r = boot.len();
    let below = boot.iter().filter(|&&v| v < theta_hat).count();
    let prop = if below == 0 {
        0.5 / r as f64
    } else if below == r {
        1.0 - 0.5 / r as f64
    } else {
        below as f64 / r as f64
    };
    let z0 = norm_quantile(prop);
    let (a, acceleration_undefined) = match jackknife_acceleration(jack) {
        Some(a) => (a, false),
        None => (0.0, true),
    };
    let mut sorted = boot.to_vec();
    sorted.sort_by(|x, y| x.total_cmp(y));
    let (lower, upper) = match sided {
        Sidedness::Bilateral => {
            let lo = adjusted_level(z0, a, norm_quantile(alpha / 2.0), true);
            let hi = adjusted_level(z0, a, norm_quantile(1.0 - alpha / 2.0), false);
            (quantile_sorted(&sorted, lo), quantile_sorted(&sorted, hi))
        }
        Sidedness::LowerUnilateral => {
            let lo = adjusted_level(z0, a, norm_quantile(alpha), true);
            (quantile_sorted(&sorted, lo), f64::INFINITY)
        }
    };
    Ok(BcaInterval {
        lower,
        upper,
        z0,
        acceleration: a,
        sided,
        degenerate: false,
        acceleration_undefined,
    })
}
