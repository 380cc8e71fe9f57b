//! Double bootstrapping-pairs criterion (BootYT).
//!
//! X-step: bootstrap rows of `(X, T_k)`, regress every predictor on the
//! components and test the newest loading column with bilateral BCa
//! intervals; the last `k` with some interval excluding 0 is `k_max`.
//!
//! y-step: bootstrap rows of `(y, T_k)`, regress `y` on the components (OLS
//! for gaussian, the family GLM otherwise) and keep `t_k` while the lower
//! bound of the one-sided BCa interval for `c_k` is positive and
//! `k <= k_max`.

use alloc::vec;
use alloc::vec::Vec;

use super::{component_cap, CriterionKind, CriterionResult, Decision, TraceRecord};
use crate::data::{center_scale, Dataset, Family};
use crate::error::Result;
use crate::glm::{self, IrlsOptions};
use crate::linalg::{dot, norm, Matrix, Qr, RANK_TOL};
use crate::pls::PlsPath;
use crate::resampling::{
    bca_interval, bootstrap_indices, jackknife_indices, ResamplePlan, Sidedness,
};
use crate::rng::tag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootYtOptions {
    /// Upper bound on the components considered (further capped by
    /// `min(n - 1, p)` and the rank of `X`).
    pub kmax: usize,
}

impl Default for BootYtOptions {
    fn default() -> Self {
        Self { kmax: 10 }
    }
}

/// Residual of the last column of `t` after regression on the others (no
/// intercept); `None` when the column is numerically collinear with them.
fn last_column_residual(t: &Matrix) -> Option<Vec<f64>> {
    let k = t.ncols();
    let last = t.col(k - 1);
    let nl = norm(last);
    if nl == 0.0 {
        return None;
    }
    let r = if k == 1 {
        last.to_vec()
    } else {
        let others = t.leading_cols(k - 1);
        let coef = Qr::new(&others).ok()?.solve(last);
        let fit = others.mul_vec(&coef);
        last.iter().zip(&fit).map(|(a, b)| a - b).collect()
    };
    if norm(&r) <= RANK_TOL * nl {
        None
    } else {
        Some(r)
    }
}

/// Coefficient of the last column of `t_rows` in the no-intercept OLS of
/// `target[rows]` on `t_rows`, for every target, via the residualized last
/// column.
fn last_coefficients(t_rows: &Matrix, rows: &[usize], targets: &[&[f64]]) -> Option<Vec<f64>> {
    let r = last_column_residual(t_rows)?;
    let rr = dot(&r, &r);
    Some(
        targets
            .iter()
            .map(|x| rows.iter().zip(&r).map(|(&i, ri)| x[i] * ri).sum::<f64>() / rr)
            .collect(),
    )
}

/// GLM coefficient of `t_k` in `y[rows] ~ 1 + T_k[rows]`.
fn glm_last_coefficient(t_rows: &Matrix, y: &[f64], rows: &[usize], family: Family) -> Option<f64> {
    let yb: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
    let fit = glm::fit_irls(t_rows, &yb, family, true, IrlsOptions::default()).ok()?;
    let c = *fit.coef.last()?;
    (fit.converged && c.is_finite()).then_some(c)
}

struct XStep {
    significant: usize,
}

fn x_step(x: &Matrix, t: &Matrix, plan: &ResamplePlan) -> Result<XStep> {
    let (n, p) = (x.nrows(), x.ncols());
    let k = t.ncols();
    let targets: Vec<&[f64]> = (0..p).map(|l| x.col(l)).collect();
    let all: Vec<usize> = (0..n).collect();
    let theta = last_coefficients(t, &all, &targets).unwrap_or_else(|| vec![0.0; p]);
    let mut boot: Vec<Vec<f64>> = vec![Vec::with_capacity(plan.replicates); p];
    for r in 0..plan.replicates {
        let idx = bootstrap_indices(n, plan, r);
        if let Some(est) = last_coefficients(&t.select_rows(&idx), &idx, &targets) {
            for (b, e) in boot.iter_mut().zip(est) {
                b.push(e);
            }
        }
    }
    let mut jack: Vec<Vec<f64>> = vec![Vec::with_capacity(n); p];
    for i in 0..n {
        let idx = jackknife_indices(n, i);
        if let Some(est) = last_coefficients(&t.select_rows(&idx), &idx, &targets) {
            for (j, e) in jack.iter_mut().zip(est) {
                j.push(e);
            }
        }
    }
    let tk_norm = norm(t.col(k - 1));
    let mut significant = 0;
    if boot[0].len() >= plan.replicates.div_ceil(2) {
        for l in 0..p {
            let ci = bca_interval(
                &boot[l],
                theta[l],
                &jack[l],
                plan.alpha,
                Sidedness::Bilateral,
            )?;
            // loadings at rounding level are treated as zero
            let guard = RANK_TOL * norm(x.col(l)) / tk_norm;
            if ci.lower > guard || ci.upper < -guard {
                significant += 1;
            }
        }
    }
    Ok(XStep { significant })
}

struct YStep {
    c_hat: f64,
    lower: f64,
}

fn y_step(y: &[f64], t: &Matrix, family: Family, plan: &ResamplePlan) -> Result<Option<YStep>> {
    let n = y.len();
    let all: Vec<usize> = (0..n).collect();
    let estimate = |rows: &[usize]| -> Option<f64> {
        let tb = t.select_rows(rows);
        match family {
            Family::Gaussian => last_coefficients(&tb, rows, &[y]).map(|v| v[0]),
            f => glm_last_coefficient(&tb, y, rows, f),
        }
    };
    let Some(c_hat) = estimate(&all) else {
        return Ok(None);
    };
    let boot: Vec<f64> = (0..plan.replicates)
        .filter_map(|r| estimate(&bootstrap_indices(n, plan, r)))
        .collect();
    if boot.len() < plan.replicates.div_ceil(2) {
        return Ok(None);
    }
    let jack: Vec<f64> = (0..n)
        .filter_map(|i| estimate(&jackknife_indices(n, i)))
        .collect();
    let ci = bca_interval(&boot, c_hat, &jack, plan.alpha, Sidedness::LowerUnilateral)?;
    Ok(Some(YStep {
        c_hat,
        lower: ci.lower,
    }))
}

/// Runs both bootstrap steps. The X-step and the y-step at each `k` draw
/// from their own sub-streams of `plan.seed`.
pub fn select_boot_yt(
    data: &Dataset,
    plan: &ResamplePlan,
    opts: BootYtOptions,
) -> Result<CriterionResult> {
    let std = center_scale(data)?;
    let (n, p) = (std.n(), std.p());
    let cap = component_cap(n, p, opts.kmax);
    let path = PlsPath::build(&std, cap)?;
    let cap = path.ncomp();
    let mut notes = Vec::new();
    if path.exhausted() {
        notes.push(alloc::format!("only {cap} components could be extracted"));
    }

    let mut x_sig = Vec::new();
    let mut k_max = 0;
    for k in 1..=cap {
        let t = path.components().leading_cols(k);
        let step = x_step(&std.x, &t, &plan.derive(&[tag::BOOT_X_STEP, k as u64]))?;
        x_sig.push(step.significant);
        if step.significant == 0 {
            break;
        }
        k_max = k;
    }

    let mut y_steps: Vec<Option<YStep>> = Vec::new();
    let mut k_sel = 0;
    for k in 1..=k_max {
        let t = path.components().leading_cols(k);
        let step = y_step(
            &std.y,
            &t,
            std.family,
            &plan.derive(&[tag::BOOT_Y_STEP, k as u64]),
        )?;
        let pass = step.as_ref().is_some_and(|s| s.lower > 0.0);
        if step.is_none() {
            notes.push(alloc::format!(
                "y-step at k={k} had too few usable replicates"
            ));
        }
        y_steps.push(step);
        if !pass {
            break;
        }
        k_sel = k;
    }

    let rows = x_sig.len().max(y_steps.len());
    let trace = (0..rows)
        .map(|i| {
            let k = i + 1;
            let ys = y_steps.get(i).and_then(|s| s.as_ref());
            let stat = match (ys, y_steps.get(i)) {
                (Some(s), _) => s.lower,
                (None, Some(None)) => f64::NAN,
                _ => x_sig[i] as f64,
            };
            let mut r = TraceRecord::new(
                k,
                stat,
                if k <= k_sel {
                    Decision::Accept
                } else {
                    Decision::Reject
                },
            );
            r.x_significant = x_sig.get(i).copied();
            r.ci_lower = ys.map(|s| s.lower);
            r.c_hat = ys.map(|s| s.c_hat);
            r
        })
        .collect();
    Ok(CriterionResult {
        criterion: CriterionKind::BootYt,
        k: k_sel,
        trace,
        k_max: Some(k_max),
        notes,
    })
}
