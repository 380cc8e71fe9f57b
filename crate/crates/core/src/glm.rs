//! Least squares and iteratively reweighted least squares for the binomial
//! (logit link) and Poisson (log link) families, with Wald inference.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::data::Family;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix, Qr};
use crate::special::{ln_gamma, norm_sf};

/// Bound applied to the linear predictor at every IRLS iteration.
pub const ETA_CLAMP: f64 = 30.0;

/// A fitted (generalized) linear model. Coefficients are ordered as the
/// design columns, with the intercept first when one was requested.
#[derive(Debug, Clone)]
pub struct GlmFit {
    pub coef: Vec<f64>,
    pub cov: Matrix,
    pub deviance: f64,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub family: Family,
    /// Fitted means on the response scale.
    pub fitted: Vec<f64>,
    /// Some linear predictor hit the clamp at the final iterate. For the
    /// binomial family this is how (quasi-)separation shows up.
    pub clamped: bool,
    /// Deviance after each accepted iterate.
    pub deviance_history: Vec<f64>,
}

impl GlmFit {
    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.coef.len())
            .map(|j| self.cov.get(j, j).max(0.0).sqrt())
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IrlsOptions {
    pub max_iter: usize,
    /// Tolerance on `|dev - dev_old| / (|dev| + 0.1)`.
    pub tol: f64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-8,
        }
    }
}

/// Numerically stable logistic function.
pub fn inv_logit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn design(x: &Matrix, intercept: bool) -> Matrix {
    if intercept {
        x.with_intercept()
    } else {
        x.clone()
    }
}

/// Ordinary least squares through Householder QR.
pub fn fit_ols(x: &Matrix, y: &[f64], intercept: bool) -> Result<GlmFit> {
    let a = design(x, intercept);
    let (n, q) = (a.nrows(), a.ncols());
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if n < q + 1 {
        return Err(Error::InvalidArgument(alloc::format!(
            "OLS needs more rows ({n}) than coefficients ({q})"
        )));
    }
    let qr = Qr::new(&a)?;
    let coef = qr.solve(y);
    let fitted = a.mul_vec(&coef);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let sigma2 = rss / (n - q) as f64;
    let mut cov = qr.inverse_gram();
    for i in 0..q {
        for j in 0..q {
            cov.set(i, j, cov.get(i, j) * sigma2);
        }
    }
    let loglik = gaussian_loglik(rss, n);
    Ok(GlmFit {
        coef,
        cov,
        deviance: rss,
        loglik,
        iterations: 1,
        converged: true,
        family: Family::Gaussian,
        fitted,
        clamped: false,
        deviance_history: alloc::vec![rss],
    })
}

/// Gaussian log-likelihood at the maximum-likelihood variance `rss / n`.
pub fn gaussian_loglik(rss: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s2 = rss / nf;
    -0.5 * nf * ((2.0 * core::f64::consts::PI * s2).ln() + 1.0)
}

fn link_inverse(family: Family, eta: f64) -> f64 {
    match family {
        Family::Binomial => inv_logit(eta),
        Family::Poisson => eta.exp(),
        Family::Gaussian => eta,
    }
}

fn variance(family: Family, mu: f64) -> f64 {
    match family {
        Family::Binomial => mu * (1.0 - mu),
        Family::Poisson => mu,
        Family::Gaussian => 1.0,
    }
}

/// Log-likelihood of `y` under fitted means `mu`.
pub fn loglik(family: Family, y: &[f64], mu: &[f64]) -> f64 {
    match family {
        Family::Binomial => y
            .iter()
            .zip(mu)
            .map(|(&yi, &m)| if yi > 0.5 { m.ln() } else { (1.0 - m).ln() })
            .sum(),
        Family::Poisson => y
            .iter()
            .zip(mu)
            .map(|(&yi, &m)| yi * m.ln() - m - ln_gamma(yi + 1.0))
            .sum(),
        Family::Gaussian => {
            let rss: f64 = y.iter().zip(mu).map(|(a, b)| (a - b) * (a - b)).sum();
            gaussian_loglik(rss, y.len())
        }
    }
}

/// Residual deviance of `y` under fitted means `mu`.
pub fn deviance(family: Family, y: &[f64], mu: &[f64]) -> f64 {
    match family {
        Family::Binomial => -2.0 * loglik(family, y, mu),
        Family::Poisson => {
            2.0 * y
                .iter()
                .zip(mu)
                .map(|(&yi, &m)| {
                    let t = if yi > 0.0 { yi * (yi / m).ln() } else { 0.0 };
                    t - (yi - m)
                })
                .sum::<f64>()
        }
        Family::Gaussian => y.iter().zip(mu).map(|(a, b)| (a - b) * (a - b)).sum(),
    }
}

struct Iterate {
    beta: Vec<f64>,
    mu: Vec<f64>,
    dev: f64,
    clamped: bool,
}

fn evaluate(a: &Matrix, y: &[f64], family: Family, beta: Vec<f64>) -> Iterate {
    let mut clamped = false;
    let mu: Vec<f64> = a
        .mul_vec(&beta)
        .into_iter()
        .map(|e| {
            let e = if e.abs() >= ETA_CLAMP {
                clamped = true;
                e.clamp(-ETA_CLAMP, ETA_CLAMP)
            } else {
                e
            };
            link_inverse(family, e)
        })
        .collect();
    let dev = deviance(family, y, &mu);
    Iterate {
        beta,
        mu,
        dev,
        clamped,
    }
}

fn weighted_qr(a: &Matrix, w: &[f64]) -> Result<Qr> {
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let aw = Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a.get(i, j) * sw[i]);
    Qr::new(&aw)
}

/// Fits a canonical-link GLM by IRLS with step halving.
///
/// The linear predictor is clamped to `[-30, 30]` at every iterate, so
/// separated binomial data still produce finite coefficients; such fits are
/// reported through [`GlmFit::clamped`]. Non-convergence is reported through
/// `converged = false`, not as an error.
pub fn fit_irls(
    x: &Matrix,
    y: &[f64],
    family: Family,
    intercept: bool,
    opts: IrlsOptions,
) -> Result<GlmFit> {
    if family == Family::Gaussian {
        return fit_ols(x, y, intercept);
    }
    let a = design(x, intercept);
    let n = a.nrows();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    // starting means as in the usual glm initialization
    let mut mu: Vec<f64> = match family {
        Family::Binomial => y.iter().map(|v| (v + 0.5) / 2.0).collect(),
        _ => y.iter().map(|v| v + 0.1).collect(),
    };
    let mut eta: Vec<f64> = mu
        .iter()
        .map(|&m| match family {
            Family::Binomial => (m / (1.0 - m)).ln(),
            _ => m.ln(),
        })
        .collect();
    let mut dev_old = deviance(family, y, &mu);
    let mut current: Option<Iterate> = None;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        let w: Vec<f64> = mu
            .iter()
            .map(|&m| variance(family, m).max(1e-300))
            .collect();
        let z: Vec<f64> = (0..n).map(|i| eta[i] + (y[i] - mu[i]) / w[i]).collect();
        let qr = weighted_qr(&a, &w)?;
        let zw: Vec<f64> = z.iter().zip(&w).map(|(zi, wi)| zi * wi.sqrt()).collect();
        let mut next = evaluate(&a, y, family, qr.solve(&zw));

        if let Some(prev) = &current {
            let mut halvings = 0;
            while !(next.dev <= prev.dev * (1.0 + 1e-10) + 1e-10) && halvings < 40 {
                let beta: Vec<f64> = next
                    .beta
                    .iter()
                    .zip(&prev.beta)
                    .map(|(b, o)| 0.5 * (b + o))
                    .collect();
                next = evaluate(&a, y, family, beta);
                halvings += 1;
            }
            if !(next.dev <= prev.dev * (1.0 + 1e-10) + 1e-10) {
                // no descent direction left; keep the previous iterate
                converged = true;
                break;
            }
        }

        let dev = next.dev;
        eta = a
            .mul_vec(&next.beta)
            .into_iter()
            .map(|e| e.clamp(-ETA_CLAMP, ETA_CLAMP))
            .collect();
        mu.clone_from(&next.mu);
        history.push(dev);
        current = Some(next);
        if (dev - dev_old).abs() / (dev.abs() + 0.1) < opts.tol {
            converged = true;
            break;
        }
        dev_old = dev;
    }

    let fit = current.ok_or(Error::SingularDesign)?;
    let w: Vec<f64> = fit
        .mu
        .iter()
        .map(|&m| variance(family, m).max(1e-300))
        .collect();
    let cov = weighted_qr(&a, &w)?.inverse_gram();
    Ok(GlmFit {
        loglik: loglik(family, y, &fit.mu),
        deviance: fit.dev,
        coef: fit.beta,
        cov,
        iterations: if converged { iterations } else { opts.max_iter },
        converged,
        family,
        fitted: fit.mu,
        clamped: fit.clamped,
        deviance_history: history,
    })
}

/// Two-sided Wald p-values against the standard normal reference.
///
/// A zero standard error gives `p = 0` for a nonzero coefficient and `p = 1`
/// otherwise; a non-finite one gives `p = 1`.
pub fn wald_pvalues(fit: &GlmFit) -> Vec<f64> {
    fit.coef
        .iter()
        .zip(fit.std_errors())
        .map(|(&b, se)| wald_pvalue(b, se))
        .collect()
}

pub fn wald_pvalue(coef: f64, se: f64) -> f64 {
    if !se.is_finite() || !coef.is_finite() {
        return 1.0;
    }
    if se == 0.0 {
        return if coef != 0.0 { 0.0 } else { 1.0 };
    }
    (2.0 * norm_sf((coef / se).abs())).min(1.0)
}

/// Linear predictor `[1, x] · coef` (or `x · coef` without intercept),
/// clamped like the IRLS iterates, mapped to the response scale.
pub fn predict_mean(fit: &GlmFit, x: &Matrix, intercept: bool) -> Vec<f64> {
    let a = design(x, intercept);
    a.mul_vec(&fit.coef)
        .into_iter()
        .map(|e| match fit.family {
            Family::Gaussian => e,
            f => link_inverse(f, e.clamp(-ETA_CLAMP, ETA_CLAMP)),
        })
        .collect()
}

/// `‖Aᵀ r‖∞` for residuals `r = y - fitted`; used by tests and diagnostics.
pub fn residual_orthogonality(x: &Matrix, y: &[f64], fitted: &[f64], intercept: bool) -> f64 {
    let a = design(x, intercept);
    let r: Vec<f64> = y.iter().zip(fitted).map(|(a, b)| a - b).collect();
    (0..a.ncols())
        .map(|j| dot(a.col(j), &r).abs())
        .fold(0.0, f64::max)
}
