//! Degrees of freedom of the PLS fit map and the BICdof criterion.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{component_cap, CriterionKind, CriterionResult, Decision, TraceRecord};
use crate::data::{center_scale, Dataset, Standardized};
use crate::error::Result;
use crate::glm;
use crate::linalg::{mean, sample_variance};
use crate::pls::PlsPath;

/// Selection rule applied to the BIC sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BicRule {
    FirstLocalMin,
    GlobalMin,
}

/// Smallest `k` with `v[k] < v[k-1]` (vacuous for `k = 0`) and
/// `v[k] <= v[k+1]` (vacuous for the last index).
pub fn first_local_min(v: &[f64]) -> usize {
    let last = v.len().saturating_sub(1);
    (0..v.len())
        .find(|&k| (k == 0 || v[k] < v[k - 1]) && (k == last || v[k] <= v[k + 1]))
        .unwrap_or(last)
}

/// Index of the minimum, ties to the smallest index.
pub fn global_min(v: &[f64]) -> usize {
    super::argmin_smallest(v)
}

/// In-sample fitted values (original scale) of the `0..=kmax` component
/// models along one path, given standardized predictors and a raw response.
fn fitted_by_k(xs: &Standardized, y: &[f64], kmax: usize) -> Result<Vec<Vec<f64>>> {
    let m = mean(y);
    let sd = sample_variance(y).sqrt();
    let std = Standardized {
        x: xs.x.clone(),
        y: y.iter().map(|v| (v - m) / sd).collect(),
        family: xs.family,
        scaling: crate::data::ScalingParams {
            y_mean: m,
            y_sd: sd,
            ..xs.scaling.clone()
        },
    };
    let path = PlsPath::build(&std, kmax)?;
    Ok((0..=kmax)
        .map(|k| path.fitted_std(k).into_iter().map(|v| m + sd * v).collect())
        .collect())
}

/// `γ_0..γ_kmax`: trace of the Jacobian of `y ↦ ŷ` for each component
/// count, by forward differences with step `1e-6 sd(y)`. Centering is part
/// of the differentiated map, so `γ_0 = 1`.
pub fn dof_path(data: &Dataset, kmax: usize) -> Result<Vec<f64>> {
    CriterionKind::BicDof.check(data.family())?;
    let xs = center_scale(data)?;
    let y = data.y();
    let n = y.len();
    let h = 1e-6 * sample_variance(y).sqrt();
    let base = fitted_by_k(&xs, y, kmax)?;
    let mut gamma = vec![0.0; kmax + 1];
    let mut yp = y.to_vec();
    for i in 0..n {
        yp[i] = y[i] + h;
        let pert = fitted_by_k(&xs, &yp, kmax)?;
        for k in 0..=kmax {
            gamma[k] += (pert[k][i] - base[k][i]) / h;
        }
        yp[i] = y[i];
    }
    Ok(gamma)
}

/// `γ_k` for a single component count.
pub fn dof_estimate(data: &Dataset, k: usize) -> Result<f64> {
    Ok(dof_path(data, k)?[k])
}

/// BICdof `RSS_k/n + ln(n) (γ_k/n) σ̂²` over `k = 0..kmax`.
///
/// `σ̂²` comes from OLS on all predictors when `n > p + 1` and the design has
/// full column rank, and otherwise from the largest PLS model as
/// `RSS / (n - γ)` (with `RSS / 1` if `n - γ < 1`).
pub fn select_bic_dof(data: &Dataset, kmax: usize, rule: BicRule) -> Result<CriterionResult> {
    let kind = match rule {
        BicRule::FirstLocalMin => CriterionKind::BicDof,
        BicRule::GlobalMin => CriterionKind::BicGlob,
    };
    kind.check(data.family())?;
    let (n, p) = (data.n(), data.p());
    let y = data.y();
    let xs = center_scale(data)?;
    let cap = component_cap(n, p, kmax);
    let cap = cap.min(PlsPath::build(&xs, cap)?.ncomp());
    let mut notes = Vec::new();
    if cap < kmax {
        notes.push(alloc::format!("component search capped at {cap}"));
    }
    let fitted = fitted_by_k(&xs, y, cap)?;
    let rss: Vec<f64> = fitted
        .iter()
        .map(|f| y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    let gamma = dof_path(data, cap)?;

    let ols = if n > p + 1 {
        glm::fit_ols(data.x(), y, true).ok()
    } else {
        None
    };
    let sigma2 = match ols {
        Some(fit) => fit.deviance / (n - p - 1) as f64,
        None => {
            let resid_df = n as f64 - gamma[cap];
            if resid_df >= 1.0 {
                rss[cap] / resid_df
            } else {
                notes.push("residual degrees of freedom below 1; sigma^2 uses RSS / 1".into());
                rss[cap]
            }
        }
    };
    let nf = n as f64;
    let bic: Vec<f64> = (0..=cap)
        .map(|k| rss[k] / nf + nf.ln() * (gamma[k] / nf) * sigma2)
        .collect();
    let k_sel = match rule {
        BicRule::FirstLocalMin => first_local_min(&bic),
        BicRule::GlobalMin => global_min(&bic),
    };
    let trace = (0..=cap)
        .map(|k| {
            let mut r = TraceRecord::new(
                k,
                bic[k],
                if k == k_sel {
                    Decision::Selected
                } else {
                    Decision::Evaluated
                },
            );
            r.bic = Some(bic[k]);
            r.rss = Some(rss[k]);
            r.dof = Some(gamma[k]);
            r.sigma2 = Some(sigma2);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Family;
    use crate::linalg::Matrix;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn rule_examples() {
        let v = [5.0, 3.0, 4.0, 2.0];
        assert_eq!(first_local_min(&v), 1);
        assert_eq!(global_min(&v), 3);
        let dec = [5.0, 4.0, 3.0, 2.0];
        assert_eq!((first_local_min(&dec), global_min(&dec)), (3, 3));
        let inc = [1.0, 2.0, 3.0];
        assert_eq!((first_local_min(&inc), global_min(&inc)), (0, 0));
        assert_eq!(global_min(&[2.0, 1.0, 1.0]), 1);
    }

    fn data(n: usize, p: usize, seed: u64) -> Dataset {
        let mut r = rng::stream(seed, &[5]);
        let x = Matrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut r));
        let y = (0..n)
            .map(|i| {
                x.get(i, 0)
                    + 0.5 * x.get(i, p - 1)
                    + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r)
            })
            .collect();
        Dataset::new(x, y, Family::Gaussian).unwrap()
    }

    #[test]
    fn dof_at_saturation_is_p_plus_one() {
        let d = data(40, 4, 1);
        let g = dof_estimate(&d, 4).unwrap();
        assert!((g - 5.0).abs() < 0.05, "{g}");
    }

    #[test]
    fn dof_single_predictor_is_two() {
        let d = data(30, 1, 2);
        let g = dof_path(&d, 1).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-6);
        assert!((g[1] - 2.0).abs() < 0.05, "{}", g[1]);
    }

    #[test]
    fn dof_is_finite_along_path() {
        let d = data(30, 6, 4);
        assert!(dof_path(&d, 5).unwrap().iter().all(|g| g.is_finite()));
    }

    #[test]
    fn first_local_min_predicate_holds_on_trace() {
        let d = data(50, 6, 8);
        let res = select_bic_dof(&d, 5, BicRule::FirstLocalMin).unwrap();
        let v: Vec<f64> = res.trace.iter().map(|r| r.bic.unwrap()).collect();
        let k = res.k;
        let is_local =
            |k: usize| (k == 0 || v[k] < v[k - 1]) && (k + 1 == v.len() || v[k] <= v[k + 1]);
        assert!(is_local(k));
        assert!((0..k).all(|j| !is_local(j)));
        assert_eq!(res.trace[0].k, 0);
    }
}
