//! AIC and BIC with the naive `k + 1` parameter count.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{component_cap, CriterionKind, CriterionResult, Decision, TraceRecord};
use crate::data::{center_scale, Dataset, Family};
use crate::error::Result;
use crate::glm;
use crate::pls::PlsPath;

/// Largest component count searched by the naive criteria.
pub const NAIVE_KMAX_CAP: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoKind {
    Aic,
    Bic,
}

/// Index of the smallest value, ties to the smallest index. NaN never wins.
pub fn argmin_smallest(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] || v[best].is_nan() {
            best = i;
        }
    }
    best
}

/// AIC `-2ℓ + 2(k+1)` or BIC `-2ℓ + (k+1) ln n` for `k = 0..kmax`, `ℓ` the
/// log-likelihood of the final regression on `k` components (gaussian
/// variance at `RSS_k / n`); the minimizer is selected.
pub fn select_aic_bic_naive(
    data: &Dataset,
    kmax: usize,
    which: InfoKind,
) -> Result<CriterionResult> {
    let kind = match which {
        InfoKind::Aic => CriterionKind::Aic,
        InfoKind::Bic => CriterionKind::Bic,
    };
    let (n, p) = (data.n(), data.p());
    let mut notes = Vec::new();
    let mut kmax = kmax;
    if kmax > NAIVE_KMAX_CAP {
        notes.push(alloc::format!("kmax {kmax} clamped to {NAIVE_KMAX_CAP}"));
        kmax = NAIVE_KMAX_CAP;
    }
    let cap = component_cap(n, p, kmax);
    let path = PlsPath::build(&center_scale(data)?, cap)?;
    let cap = cap.min(path.ncomp());
    let y = data.y();
    let nf = n as f64;
    let mut values = Vec::with_capacity(cap + 1);
    let mut nonconverged = 0;
    for k in 0..=cap {
        let m = path.model(k)?;
        if !m.final_converged {
            nonconverged += 1;
        }
        let ll = match data.family() {
            Family::Gaussian => {
                let rss: f64 = y
                    .iter()
                    .zip(&m.fitted)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                glm::gaussian_loglik(rss, n)
            }
            f => glm::loglik(f, y, &m.fitted),
        };
        let df = (k + 1) as f64;
        values.push(match which {
            InfoKind::Aic => -2.0 * ll + 2.0 * df,
            InfoKind::Bic => -2.0 * ll + df * nf.ln(),
        });
    }
    if nonconverged > 0 {
        notes.push(alloc::format!(
            "{nonconverged} final GLM fits did not converge"
        ));
    }
    let k_sel = argmin_smallest(&values);
    let trace = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut r = TraceRecord::new(
                k,
                v,
                if k == k_sel {
                    Decision::Selected
                } else {
                    Decision::Evaluated
                },
            );
            match which {
                InfoKind::Aic => r.aic = Some(v),
                InfoKind::Bic => r.bic = Some(v),
            }
            r
        })
        .collect();
    Ok(CriterionResult {
        criterion: kind,
        k: k_sel,
        trace,
        k_max: None,
        notes,
    })
}
