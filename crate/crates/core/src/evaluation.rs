//! Prediction metrics, Welch tests, set-partition counts, robustness
//! distributions of a selected component count and grid summaries.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::One;

use crate::criteria::{self, CriterionKind, CriterionSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{mean, sample_variance};
use crate::resampling::{bootstrap_indices, jackknife_indices, ResamplePlan};
use crate::rng::{self, tag};
use crate::simulation::GridRow;
use crate::special::t_two_sided_p;

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `Σ(y - ŷ)² / Σ(y - ȳ_train)²`.
pub fn nmse(y_true: &[f64], y_pred: &[f64], y_train_mean: f64) -> Result<f64> {
    check_len(y_true, y_pred)?;
    let num: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let den: f64 = y_true
        .iter()
        .map(|a| (a - y_train_mean) * (a - y_train_mean))
        .sum();
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Rows where the 0.5-thresholded probability disagrees with the 0/1 label.
/// A probability of exactly 0.5 predicts class 0.
pub fn missclassed_count(y_true: &[f64], p_pred: &[f64]) -> Result<usize> {
    check_len(y_true, p_pred)?;
    Ok(y_true
        .iter()
        .zip(p_pred)
        .filter(|(&y, &p)| (p > 0.5) != (y == 1.0))
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Two-sided Welch t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument(
            "each sample needs at least 2 values".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (var_a, var_b) = (sample_variance(a), sample_variance(b));
    let (va, vb) = (var_a / na, var_b / nb);
    let se2 = va + vb;
    if se2 <= 0.0 {
        return Err(Error::DegenerateVariances);
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTestResult {
        t,
        df,
        p_value: t_two_sided_p(t, df),
        mean_a: ma,
        mean_b: mb,
        var_a,
        var_b,
        n_a: a.len(),
        n_b: b.len(),
    })
}

/// Number of ways to split `n` labelled items into `q` nonempty blocks of
/// sizes `m` and `m + 1` (`m = n div q`), blocks unordered:
/// `n! / (m!^(q-r) (m+1)!^r (q-r)! r!)` with `r = n mod q`.
pub fn partition_count(n: usize, q: usize) -> Result<BigUint> {
    if q == 0 || q > n {
        return Err(Error::InvalidArgument(alloc::format!(
            "need 1 <= q <= n, got n={n}, q={q}"
        )));
    }
    let fact =
        |k: usize| -> BigUint { (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i)) };
    let (m, r) = (n / q, n % q);
    let pow = |b: BigUint, e: usize| -> BigUint { (0..e).fold(BigUint::one(), |acc, _| acc * &b) };
    let den = pow(fact(m), q - r) * pow(fact(m + 1), r) * fact(q - r) * fact(r);
    Ok(fact(n) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustnessMode {
    /// `B` bootstrap resamples of the rows.
    Bootstrap(usize),
    /// The `n` leave-one-out subsets.
    Jackknife,
}

/// Distribution of the selected component count over resamples.
#[derive(Debug, Clone, PartialEq)]
pub struct Robustness {
    pub criterion: CriterionKind,
    /// `histogram[k]` is the number of resamples selecting `k`.
    pub histogram: Vec<usize>,
    /// Resamples on which the criterion failed, with the error message.
    pub errors: Vec<(usize, String)>,
    pub resamples: usize,
}

impl Robustness {
    /// Tallies per-resample outcomes, indexed by resample.
    pub fn from_outcomes(criterion: CriterionKind, outcomes: Vec<Result<usize>>) -> Self {
        let resamples = outcomes.len();
        let mut histogram = Vec::new();
        let mut errors = Vec::new();
        for (i, o) in outcomes.into_iter().enumerate() {
            match o {
                Ok(k) => {
                    if histogram.len() <= k {
                        histogram.resize(k + 1, 0);
                    }
                    histogram[k] += 1;
                }
                Err(e) => errors.push((i, e.to_string())),
            }
        }
        Self {
            criterion,
            histogram,
            errors,
            resamples,
        }
    }

    pub fn successes(&self) -> usize {
        self.histogram.iter().sum()
    }

    /// Most frequent `k`, ties to the smallest.
    pub fn mode(&self) -> Option<usize> {
        let best = *self.histogram.iter().max()?;
        (best > 0).then(|| self.histogram.iter().position(|&c| c == best).unwrap_or(0))
    }

    pub fn mean(&self) -> Option<f64> {
        let s = self.successes();
        (s > 0).then(|| {
            self.histogram
                .iter()
                .enumerate()
                .map(|(k, &c)| (k * c) as f64)
                .sum::<f64>()
                / s as f64
        })
    }
}

/// Number of resamples in `mode` for `n` rows.
pub fn resample_count(n: usize, mode: RobustnessMode) -> usize {
    match mode {
        RobustnessMode::Bootstrap(b) => b,
        RobustnessMode::Jackknife => n,
    }
}

/// Row subset of resample `index`.
pub fn resample_rows(n: usize, mode: RobustnessMode, index: usize, seed: u64) -> Vec<usize> {
    match mode {
        RobustnessMode::Bootstrap(b) => {
            let plan = ResamplePlan {
                replicates: b,
                seed: rng::derive_seed(seed, &[tag::ROBUSTNESS]),
                alpha: 0.05,
            };
            bootstrap_indices(n, &plan, index)
        }
        RobustnessMode::Jackknife => jackknife_indices(n, index),
    }
}

/// Runs the criterion on resample `index`.
pub fn robustness_one(
    data: &Dataset,
    spec: &CriterionSpec,
    kmax: usize,
    mode: RobustnessMode,
    index: usize,
    seed: u64,
) -> Result<usize> {
    let rows = resample_rows(data.n(), mode, index, seed);
    let sub = data.subset(&rows)?;
    let crit_seed = rng::derive_seed(seed, &[tag::ROBUSTNESS, 1, index as u64]);
    criteria::select(&sub, spec, kmax, crit_seed).map(|r| r.k)
}

/// Serial robustness distribution over all resamples.
pub fn robustness_distribution(
    data: &Dataset,
    spec: &CriterionSpec,
    kmax: usize,
    mode: RobustnessMode,
    seed: u64,
) -> Result<Robustness> {
    if let RobustnessMode::Bootstrap(0) = mode {
        return Err(Error::InvalidArgument(
            "need at least one bootstrap resample".into(),
        ));
    }
    spec.kind().check(data.family())?;
    let outcomes = (0..resample_count(data.n(), mode))
        .map(|i| robustness_one(data, spec, kmax, mode, i, seed))
        .collect();
    Ok(Robustness::from_outcomes(spec.kind(), outcomes))
}

/// Per-row quantity summarized across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    K,
    NmseTrain,
    NmseTest,
    MissclassedTest,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::K,
        Metric::NmseTrain,
        Metric::NmseTest,
        Metric::MissclassedTest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::K => "k",
            Metric::NmseTrain => "nmse_train",
            Metric::NmseTest => "nmse_test",
            Metric::MissclassedTest => "missclassed_test",
        }
    }

    fn value(self, row: &GridRow) -> Option<f64> {
        match self {
            Metric::K => row.k.map(|k| k as f64),
            Metric::NmseTrain => row.nmse_train,
            Metric::NmseTest => row.nmse_test,
            Metric::MissclassedTest => row.missclassed_test.map(|m| m as f64),
        }
        .filter(|v| v.is_finite())
    }
}

/// Mean and variance of one metric for one `(couple, criterion)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStat {
    pub couple_index: usize,
    pub sigma4: f64,
    pub sigma5: f64,
    pub criterion: CriterionKind,
    pub metric: Metric,
    pub count: usize,
    pub mean: f64,
    /// `NaN` with fewer than 2 values.
    pub variance: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ABetter,
    BBetter,
    NoDifference,
    Insufficient,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ABetter => "A_better",
            Verdict::BBetter => "B_better",
            Verdict::NoDifference => "no_difference",
            Verdict::Insufficient => "insufficient",
        }
    }
}

/// Welch comparison of two criteria on one metric at one couple. Lower
/// metric values are better.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTest {
    pub couple_index: usize,
    pub sigma4: f64,
    pub sigma5: f64,
    pub criterion_a: CriterionKind,
    pub criterion_b: CriterionKind,
    pub metric: Metric,
    pub test: Option<TTestResult>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridSummary {
    pub stats: Vec<CellStat>,
    pub tests: Vec<PairTest>,
}

/// Significance level of the pairwise verdicts.
pub const SUMMARY_ALPHA: f64 = 0.05;

/// Verdict for samples `a` and `b` of a lower-is-better metric.
pub fn compare_samples(a: &[f64], b: &[f64], alpha: f64) -> (Option<TTestResult>, Verdict) {
    if a.len() < 2 || b.len() < 2 {
        return (None, Verdict::Insufficient);
    }
    match welch_t_test(a, b) {
        Ok(t) => {
            let v = if t.p_value >= alpha {
                Verdict::NoDifference
            } else if t.mean_a < t.mean_b {
                Verdict::ABetter
            } else {
                Verdict::BBetter
            };
            (Some(t), v)
        }
        Err(_) if mean(a) == mean(b) => (None, Verdict::NoDifference),
        Err(_) => (None, Verdict::Insufficient),
    }
}

/// Per-couple statistics for every criterion and metric, and Welch tests
/// for every criterion pair (in first-appearance order) on every metric
/// with data.
pub fn summarize_grid(rows: &[GridRow]) -> GridSummary {
    let mut order: Vec<CriterionKind> = Vec::new();
    let mut couples: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut by_key: BTreeMap<(usize, usize, Metric), Vec<f64>> = BTreeMap::new();
    let mut failures: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for row in rows {
        let ci = match order.iter().position(|&c| c == row.criterion) {
            Some(i) => i,
            None => {
                order.push(row.criterion);
                order.len() - 1
            }
        };
        couples
            .entry(row.couple_index)
            .or_insert((row.sigma4, row.sigma5));
        if row.error.is_some() {
            *failures.entry((row.couple_index, ci)).or_default() += 1;
        }
        for m in Metric::ALL {
            if let Some(v) = m.value(row) {
                by_key.entry((row.couple_index, ci, m)).or_default().push(v);
            }
        }
    }
    let empty = Vec::new();
    let mut out = GridSummary::default();
    for (&c, &(s4, s5)) in &couples {
        for (ci, &crit) in order.iter().enumerate() {
            for m in Metric::ALL {
                let Some(v) = by_key.get(&(c, ci, m)) else {
                    continue;
                };
                out.stats.push(CellStat {
                    couple_index: c,
                    sigma4: s4,
                    sigma5: s5,
                    criterion: crit,
                    metric: m,
                    count: v.len(),
                    mean: mean(v),
                    variance: if v.len() >= 2 {
                        sample_variance(v)
                    } else {
                        f64::NAN
                    },
                    failures: failures.get(&(c, ci)).copied().unwrap_or(0),
                });
            }
        }
        for a in 0..order.len() {
            for b in a + 1..order.len() {
                for m in Metric::ALL {
                    let va = by_key.get(&(c, a, m));
                    let vb = by_key.get(&(c, b, m));
                    if va.is_none() && vb.is_none() {
                        continue;
                    }
                    let (test, verdict) =
                        compare_samples(va.unwrap_or(&empty), vb.unwrap_or(&empty), SUMMARY_ALPHA);
                    out.tests.push(PairTest {
                        couple_index: c,
                        sigma4: s4,
                        sigma5: s5,
                        criterion_a: order[a],
                        criterion_b: order[b],
                        metric: m,
                        test,
                        verdict,
                    });
                }
            }
        }
    }
    out
}

/// Histogram helper: counts of each value of `ks`, indexed by value.
pub fn k_histogram(ks: &[usize]) -> Vec<usize> {
    let mut h = vec![0; ks.iter().max().map_or(0, |m| m + 1)];
    for &k in ks {
        h[k] += 1;
    }
    h
}
