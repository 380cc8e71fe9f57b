//! Cross-validated PRESS and the Q² criterion.

use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;

use super::{component_cap, CriterionKind, CriterionResult, Decision, TraceRecord};
use crate::data::{center_scale, Dataset};
use crate::error::{Error, Result};
use crate::linalg::mean;
use crate::pls::PlsPath;
use crate::rng::{self, tag};

/// A new component is kept while `Q²_k >= 0.0975`, i.e.
/// `sqrt(PRESS_k) <= 0.95 sqrt(RSS_{k-1})`.
pub const Q2_THRESHOLD: f64 = 0.0975;

/// Cross-validation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Folds {
    /// Leave-one-out (`q = n`).
    Loo,
    /// `q` folds.
    KFold(usize),
}

impl Folds {
    pub fn count(self, n: usize) -> usize {
        match self {
            Folds::Loo => n,
            Folds::KFold(q) => q,
        }
    }
}

/// Random partition of `0..n` into `q` folds: with `n = m q + r`, `r` folds
/// of `m + 1` rows followed by `q - r` folds of `m` rows. Leave-one-out is
/// the identity partition and uses no randomness.
pub fn fold_partition(n: usize, q: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if q < 2 || q > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "fold count must lie in 2..={n}, got {q}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if q < n {
        let mut r = rng::stream(seed, &[tag::CV_FOLDS, n as u64, q as u64]);
        idx.shuffle(&mut r);
    }
    let (m, r) = (n / q, n % q);
    let mut out = Vec::with_capacity(q);
    let mut start = 0;
    for f in 0..q {
        let len = if f < r { m + 1 } else { m };
        let mut fold = idx[start..start + len].to_vec();
        fold.sort_unstable();
        out.push(fold);
        start += len;
    }
    Ok(out)
}

fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in fold {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

/// `PRESS_1..PRESS_kmax` and `RSS_0..RSS_kmax` (original response scale).
///
/// `RSS_k` comes from the full-data fit; `PRESS_k` refits standardization
/// and components on every training part and sums squared held-out errors.
pub fn press_rss_path(
    data: &Dataset,
    kmax: usize,
    folds: Folds,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    CriterionKind::Q2.check(data.family())?;
    let n = data.n();
    let parts = fold_partition(n, folds.count(n), seed)?;
    let min_train = n - parts.iter().map(Vec::len).max().unwrap_or(0);
    if kmax + 1 > min_train {
        return Err(Error::FoldTooSmall {
            train: min_train,
            k: kmax,
        });
    }
    let y = data.y();
    let full = PlsPath::build(&center_scale(data)?, kmax)?;
    let ybar = mean(y);
    let mut rss = vec![y.iter().map(|v| (v - ybar) * (v - ybar)).sum::<f64>()];
    for k in 1..=kmax {
        let f = full.model(k)?.fitted;
        rss.push(y.iter().zip(&f).map(|(a, b)| (a - b) * (a - b)).sum());
    }
    let mut press = vec![0.0; kmax];
    for fold in &parts {
        let train = data.subset(&complement(n, fold))?;
        let test = data.x().select_rows(fold);
        let path = PlsPath::build(&center_scale(&train)?, kmax)?;
        for k in 1..=kmax {
            let pred = path.model(k)?.predict(&test)?;
            press[k - 1] += fold
                .iter()
                .zip(&pred)
                .map(|(&i, p)| (y[i] - p) * (y[i] - p))
                .sum::<f64>();
        }
    }
    Ok((press, rss))
}

/// `(PRESS_k, RSS_k)` for a single `k >= 1`.
pub fn press_rss(data: &Dataset, k: usize, folds: Folds, seed: u64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("PRESS needs k >= 1".into()));
    }
    let (press, rss) = press_rss_path(data, k, folds, seed)?;
    Ok((press[k - 1], rss[k]))
}

/// Sequential Q² rule: `Q²_k = 1 - PRESS_k / RSS_{k-1}` for `k = 1..`,
/// stopping at the first `k` below [`Q2_THRESHOLD`]. Returns the selected
/// count and the computed `Q²` values (up to and including the failure).
pub fn q2_decide(press: &[f64], rss: &[f64]) -> (usize, Vec<f64>) {
    let mut q2s = Vec::new();
    let mut k_sel = 0;
    for (k, &pr) in press.iter().enumerate() {
        let q2 = (rss[k] - pr) / rss[k];
        q2s.push(q2);
        if q2 >= Q2_THRESHOLD {
            k_sel = k + 1;
        } else {
            break;
        }
    }
    (k_sel, q2s)
}

/// Q² criterion with `q`-fold or leave-one-out cross-validation.
pub fn select_q2(data: &Dataset, kmax: usize, folds: Folds, seed: u64) -> Result<CriterionResult> {
    CriterionKind::Q2.check(data.family())?;
    let n = data.n();
    let q = folds.count(n);
    let largest_fold = n.div_ceil(q.max(1));
    let cap = component_cap(n - largest_fold, data.p(), kmax);
    let full_rank = PlsPath::build(&center_scale(data)?, cap)?.ncomp();
    let cap = cap.min(full_rank);
    let mut notes = Vec::new();
    if cap < kmax {
        notes.push(alloc::format!("component search capped at {cap}"));
    }
    if cap == 0 {
        return Ok(CriterionResult {
            criterion: CriterionKind::Q2,
            k: 0,
            trace: Vec::new(),
            k_max: None,
            notes,
        });
    }
    let (press, rss) = press_rss_path(data, cap, folds, seed)?;
    let (k_sel, q2s) = q2_decide(&press, &rss);
    let trace = q2s
        .iter()
        .enumerate()
        .map(|(i, &q2)| {
            let k = i + 1;
            let mut r = TraceRecord::new(
                k,
                q2,
                if q2 >= Q2_THRESHOLD {
                    Decision::Accept
                } else {
                    Decision::Reject
                },
            );
            r.q2 = Some(q2);
            r.press = Some(press[i]);
            r.rss = Some(rss[k]);
            r
        })
        .collect();
    Ok(CriterionResult {
        criterion: CriterionKind::Q2,
        k: k_sel,
        trace,
        k_max: None,
        notes,
    })
}
