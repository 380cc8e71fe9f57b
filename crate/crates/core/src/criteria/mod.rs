//! Stopping criteria for the number of PLS / PLSGLR components.
//!
//! Every criterion maps a dataset to a selected count `K` (0 allowed) and a
//! per-`k` diagnostic trace.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::data::{Dataset, Family};
use crate::error::{Error, Result};
use crate::rng::{self, tag};

mod bic;
mod bootyt;
mod cv;
mod cvmc;
mod info;
mod pval;

pub use bic::{dof_estimate, dof_path, first_local_min, global_min, select_bic_dof, BicRule};
pub use bootyt::{select_boot_yt, BootYtOptions};
pub use cv::{
    fold_partition, press_rss, press_rss_path, q2_decide, select_q2, Folds, Q2_THRESHOLD,
};
pub use cvmc::select_cv_missclassed;
pub use info::{argmin_smallest, select_aic_bic_naive, InfoKind, NAIVE_KMAX_CAP};
pub use pval::{consecutive_significant, select_pval};

/// Criterion tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriterionKind {
    Q2,
    BicDof,
    BicGlob,
    Aic,
    Bic,
    CvMclassed,
    Pval,
    BootYt,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 8] = [
        CriterionKind::Q2,
        CriterionKind::BicDof,
        CriterionKind::BicGlob,
        CriterionKind::Aic,
        CriterionKind::Bic,
        CriterionKind::CvMclassed,
        CriterionKind::Pval,
        CriterionKind::BootYt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionKind::Q2 => "q2",
            CriterionKind::BicDof => "bicdof",
            CriterionKind::BicGlob => "bicglob",
            CriterionKind::Aic => "aic",
            CriterionKind::Bic => "bic",
            CriterionKind::CvMclassed => "cvmc",
            CriterionKind::Pval => "pval",
            CriterionKind::BootYt => "bootyt",
        }
    }

    /// Families the criterion accepts, as a human-readable requirement.
    pub fn requirement(self) -> Option<&'static str> {
        match self {
            CriterionKind::Q2 | CriterionKind::BicDof | CriterionKind::BicGlob => Some("gaussian"),
            CriterionKind::CvMclassed => Some("binomial"),
            CriterionKind::Pval => Some("binomial or poisson"),
            _ => None,
        }
    }

    pub fn supports(self, family: Family) -> bool {
        match self {
            CriterionKind::Q2 | CriterionKind::BicDof | CriterionKind::BicGlob => {
                family == Family::Gaussian
            }
            CriterionKind::CvMclassed => family == Family::Binomial,
            CriterionKind::Pval => family.is_glm(),
            _ => true,
        }
    }

    pub(crate) fn check(self, family: Family) -> Result<()> {
        match self.requirement() {
            Some(required) if !self.supports(family) => Err(Error::FamilyMismatch {
                criterion: self.as_str(),
                required,
            }),
            _ => Ok(()),
        }
    }

    fn index(self) -> u64 {
        CriterionKind::ALL
            .iter()
            .position(|&k| k == self)
            .unwrap_or(0) as u64
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown criterion `{s}`")))
    }
}

/// A criterion together with its tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionSpec {
    Q2 { folds: Folds },
    BicDof,
    BicGlob,
    Aic,
    Bic,
    CvMclassed { q: usize },
    Pval { alpha: f64 },
    BootYt { replicates: usize, alpha: f64 },
}

impl CriterionSpec {
    pub fn kind(&self) -> CriterionKind {
        match self {
            CriterionSpec::Q2 { .. } => CriterionKind::Q2,
            CriterionSpec::BicDof => CriterionKind::BicDof,
            CriterionSpec::BicGlob => CriterionKind::BicGlob,
            CriterionSpec::Aic => CriterionKind::Aic,
            CriterionSpec::Bic => CriterionKind::Bic,
            CriterionSpec::CvMclassed { .. } => CriterionKind::CvMclassed,
            CriterionSpec::Pval { .. } => CriterionKind::Pval,
            CriterionSpec::BootYt { .. } => CriterionKind::BootYt,
        }
    }

    /// Default parameters: 5-fold Q², 5-fold CV-MClassed, alpha 0.05,
    /// 500 bootstrap replicates.
    pub fn default_for(kind: CriterionKind) -> Self {
        match kind {
            CriterionKind::Q2 => CriterionSpec::Q2 {
                folds: Folds::KFold(5),
            },
            CriterionKind::BicDof => CriterionSpec::BicDof,
            CriterionKind::BicGlob => CriterionSpec::BicGlob,
            CriterionKind::Aic => CriterionSpec::Aic,
            CriterionKind::Bic => CriterionSpec::Bic,
            CriterionKind::CvMclassed => CriterionSpec::CvMclassed { q: 5 },
            CriterionKind::Pval => CriterionSpec::Pval { alpha: 0.05 },
            CriterionKind::BootYt => CriterionSpec::BootYt {
                replicates: 500,
                alpha: 0.05,
            },
        }
    }
}

/// Outcome recorded for one `k` of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Component `k` passed the criterion's test.
    Accept,
    /// Component `k` failed the test (sequential criteria stop here).
    Reject,
    /// `k` is the minimizer of an optimized criterion.
    Selected,
    /// `k` was evaluated but not selected.
    Evaluated,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
            Decision::Selected => "selected",
            Decision::Evaluated => "evaluated",
        }
    }
}

/// Diagnostics for one `k`. Fields a criterion does not compute are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub statistic: f64,
    pub decision: Decision,
    pub q2: Option<f64>,
    pub press: Option<f64>,
    pub rss: Option<f64>,
    pub bic: Option<f64>,
    pub dof: Option<f64>,
    pub sigma2: Option<f64>,
    pub aic: Option<f64>,
    pub missclassed: Option<usize>,
    pub min_pvalue: Option<f64>,
    /// BootYT y-step: lower bound of the one-sided interval for `c_k`.
    pub ci_lower: Option<f64>,
    /// BootYT y-step: estimate of `c_k`.
    pub c_hat: Option<f64>,
    /// BootYT X-step: number of loadings whose interval excludes 0.
    pub x_significant: Option<usize>,
}

impl TraceRecord {
    pub fn new(k: usize, statistic: f64, decision: Decision) -> Self {
        Self {
            k,
            statistic,
            decision,
            q2: None,
            press: None,
            rss: None,
            bic: None,
            dof: None,
            sigma2: None,
            aic: None,
            missclassed: None,
            min_pvalue: None,
            ci_lower: None,
            c_hat: None,
            x_significant: None,
        }
    }
}

/// Selected component count and its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub criterion: CriterionKind,
    pub k: usize,
    pub trace: Vec<TraceRecord>,
    /// BootYT: the X-step bound.
    pub k_max: Option<usize>,
    /// Non-fatal conditions met along the way.
    pub notes: Vec<String>,
}

/// Largest usable component count for an `n x p` dataset.
pub(crate) fn component_cap(n: usize, p: usize, kmax: usize) -> usize {
    kmax.min(p).min(n.saturating_sub(1))
}

/// Seed of the criterion's own random stream.
pub(crate) fn criterion_seed(seed: u64, kind: CriterionKind) -> u64 {
    rng::derive_seed(seed, &[tag::CRITERION, kind.index()])
}

/// Runs one criterion with components searched up to `kmax`.
pub fn select(
    data: &Dataset,
    spec: &CriterionSpec,
    kmax: usize,
    seed: u64,
) -> Result<CriterionResult> {
    let kind = spec.kind();
    kind.check(data.family())?;
    let s = criterion_seed(seed, kind);
    match *spec {
        CriterionSpec::Q2 { folds } => select_q2(data, kmax, folds, s),
        CriterionSpec::BicDof => select_bic_dof(data, kmax, BicRule::FirstLocalMin),
        CriterionSpec::BicGlob => select_bic_dof(data, kmax, BicRule::GlobalMin),
        CriterionSpec::Aic => select_aic_bic_naive(data, kmax, InfoKind::Aic),
        CriterionSpec::Bic => select_aic_bic_naive(data, kmax, InfoKind::Bic),
        CriterionSpec::CvMclassed { q } => select_cv_missclassed(data, kmax, q, s),
        CriterionSpec::Pval { alpha } => select_pval(data, kmax, alpha),
        CriterionSpec::BootYt { replicates, alpha } => {
            let plan = crate::resampling::ResamplePlan::new(replicates, s, alpha)?;
            select_boot_yt(data, &plan, BootYtOptions { kmax })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in CriterionKind::ALL {
            assert_eq!(k.as_str().parse::<CriterionKind>().unwrap(), k);
        }
        assert!("nope".parse::<CriterionKind>().is_err());
    }

    #[test]
    fn family_guards() {
        assert_eq!(
            alloc::string::ToString::to_string(
                &CriterionKind::Q2.check(Family::Binomial).unwrap_err()
            ),
            "criterion requires gaussian family (got `q2`)"
        );
        assert!(CriterionKind::CvMclassed.check(Family::Poisson).is_err());
        assert!(CriterionKind::Pval.check(Family::Gaussian).is_err());
        assert!(CriterionKind::BootYt.check(Family::Poisson).is_ok());
        assert!(CriterionKind::Aic.check(Family::Gaussian).is_ok());
    }
}
