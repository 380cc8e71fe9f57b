//! Synthetic datasets with a known three-component structure, and grids of
//! criterion runs over `(σ₄, σ₅)` noise couples.
//!
//! Construction of one dataset:
//!
//! 1. Four latent columns are drawn as independent centered gaussians with
//!    standard deviations `σ₁..σ₄`, orthogonalized by Gram–Schmidt and
//!    rescaled to exactly those sample standard deviations.
//! 2. Predictors are unit-norm mixes of the latents. Complete groups of four
//!    columns use the rows of a 4x4 Hadamard matrix times a random sign
//!    vector, divided by 2; the `p mod 4` remaining columns copy latents 1,
//!    2, 3. Columns are then randomly permuted. This keeps `X Xᵀ` diagonal in
//!    the latent basis after standardization, so the response lies in a
//!    three-dimensional Krylov space.
//! 3. The linear predictor is `η = s (ℓ₁ + ℓ₂ + ℓ₃)` with `s = 1` for
//!    gaussian and binomial and `s = 1.727 / sqrt(σ₁² + σ₂² + σ₃²)` for
//!    poisson, so that the poisson log-mean has standard deviation 1.727.
//! 4. `σ₅` noise enters on the link scale: `y = η + ε` (gaussian),
//!    `y ~ Bernoulli(logit⁻¹(η + ε))`, `y ~ Poisson(exp(η + ε))`.
//!
//! Test rows, when requested, use fresh (non-orthogonalized) latent draws
//! pushed through the same mixing and response law.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::criteria::{self, CriterionKind, CriterionSpec};
use crate::data::{center_scale, Dataset, Family};
use crate::error::{Error, Result};
use crate::evaluation::{missclassed_count, nmse};
use crate::glm::inv_logit;
use crate::linalg::{dot, mean, Matrix};
use crate::pls::PlsPath;
use crate::rng::{self, tag, StreamRng};

/// Standard deviation targeted for the poisson log-mean.
pub const POISSON_ETA_SD: f64 = 1.727;

const HADAMARD4: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// Generator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    /// Inclusive range the predictor count is drawn from.
    pub p_range: (usize, usize),
    /// `σ₁..σ₅`.
    pub sigma: [f64; 5],
    pub family: Family,
    pub datasets_per_cell: usize,
    pub seed: u64,
    /// Extra rows drawn from the same law for out-of-sample evaluation.
    pub test_rows: usize,
}

impl SimConfig {
    /// `n = 200`, `p ∈ [7, 50]`, 100 test rows.
    pub fn n_greater_than_p(family: Family) -> Self {
        Self {
            n: 200,
            p_range: (7, 50),
            sigma: [10.0, 8.0, 6.0, 0.01, 0.01],
            family,
            datasets_per_cell: 20,
            seed: 42,
            test_rows: 100,
        }
    }

    /// `n = 20`, `p ∈ [25, 50]`, 80 test rows.
    pub fn n_less_than_p(family: Family) -> Self {
        Self {
            n: 20,
            p_range: (25, 50),
            test_rows: 80,
            ..Self::n_greater_than_p(family)
        }
    }

    pub fn with_noise(mut self, sigma4: f64, sigma5: f64) -> Self {
        self.sigma[3] = sigma4;
        self.sigma[4] = sigma5;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let [s1, s2, s3, s4, s5] = self.sigma;
        if !(s1 >= s2 && s2 >= s3 && s3 > 0.0) || !s1.is_finite() {
            return Err(Error::InvalidArgument("need σ₁ ≥ σ₂ ≥ σ₃ > 0".into()));
        }
        if !(s4 >= 0.0 && s5 >= 0.0 && s4.is_finite() && s5.is_finite()) {
            return Err(Error::InvalidArgument(
                "σ₄ and σ₅ must be finite and non-negative".into(),
            ));
        }
        let (lo, hi) = self.p_range;
        if lo < 1 || lo > hi {
            return Err(Error::InvalidArgument(alloc::format!(
                "invalid predictor range [{lo}, {hi}]"
            )));
        }
        if self.n < 5 {
            return Err(Error::InvalidArgument("need at least 5 rows".into()));
        }
        Ok(())
    }

    /// Scale `s` applied to `ℓ₁ + ℓ₂ + ℓ₃`.
    pub fn eta_scale(&self) -> f64 {
        match self.family {
            Family::Poisson => {
                let [s1, s2, s3, ..] = self.sigma;
                POISSON_ETA_SD / (s1 * s1 + s2 * s2 + s3 * s3).sqrt()
            }
            _ => 1.0,
        }
    }
}

/// A generated dataset with its latent truth.
#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub data: Dataset,
    /// The four generating components (n x 4).
    pub latent: Matrix,
    /// Mixing matrix (4 x p): column `j` of `X` is `latent * mixing[:, j]`.
    pub mixing: Matrix,
    /// Number of informative components (always 3).
    pub true_k: usize,
    pub p_drawn: usize,
    pub eta_scale: f64,
    pub test_extension: Option<Dataset>,
}

fn normal(r: &mut StreamRng, sd: f64) -> f64 {
    if sd == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sd).map(|d| d.sample(r)).unwrap_or(0.0)
}

fn draw_latent(r: &mut StreamRng, n: usize, sds: &[f64; 4]) -> Matrix {
    let mut m = Matrix::zeros(n, 4);
    for (j, &sd) in sds.iter().enumerate() {
        for i in 0..n {
            m.set(i, j, normal(r, sd));
        }
    }
    m
}

/// Centers, orthogonalizes (modified Gram–Schmidt) and rescales the latent
/// columns to the target sample standard deviations. A zero target gives a
/// zero column.
fn orthogonalize(latent: &mut Matrix, sds: &[f64; 4]) {
    let n = latent.nrows();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (j, &sd) in sds.iter().enumerate() {
        let mut v = latent.col(j).to_vec();
        let m = mean(&v);
        v.iter_mut().for_each(|a| *a -= m);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b) / dot(b, b);
                v.iter_mut().zip(b).for_each(|(a, bb)| *a -= c * bb);
            }
        }
        let ss = dot(&v, &v);
        let target = sd * sd * (n - 1) as f64;
        if sd == 0.0 || ss == 0.0 {
            v.iter_mut().for_each(|a| *a = 0.0);
        } else {
            let f = (target / ss).sqrt();
            v.iter_mut().for_each(|a| *a *= f);
            basis.push(v.clone());
        }
        latent.col_mut(j).copy_from_slice(&v);
    }
}

fn mixing_matrix(r: &mut StreamRng, p: usize) -> Matrix {
    let mut cols: Vec<[f64; 4]> = Vec::with_capacity(p);
    for _ in 0..p / 4 {
        let signs: [f64; 4] = core::array::from_fn(|_| if r.random::<bool>() { 1.0 } else { -1.0 });
        for h in HADAMARD4 {
            cols.push(core::array::from_fn(|m| 0.5 * h[m] * signs[m]));
        }
    }
    for j in 0..p % 4 {
        let mut c = [0.0; 4];
        c[j] = 1.0;
        cols.push(c);
    }
    cols.shuffle(r);
    Matrix::from_fn(4, p, |m, j| cols[j][m])
}

fn respond(r: &mut StreamRng, latent: &Matrix, cfg: &SimConfig, s: f64) -> Vec<f64> {
    let sigma5 = cfg.sigma[4];
    (0..latent.nrows())
        .map(|i| {
            let eta = s * (latent.get(i, 0) + latent.get(i, 1) + latent.get(i, 2));
            let e = eta + normal(r, sigma5);
            match cfg.family {
                Family::Gaussian => e,
                Family::Binomial => (r.random::<f64>() < inv_logit(e)) as u8 as f64,
                Family::Poisson => {
                    let lam = e.min(30.0).exp();
                    if lam > 0.0 {
                        Poisson::new(lam).map(|d| d.sample(r)).unwrap_or(0.0)
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect()
}

/// Generates replicate `cell_replicate` of the configuration. Fully
/// determined by `(config, cell_replicate)`.
pub fn simulate_univ_yx(config: &SimConfig, cell_replicate: u64) -> Result<SimulatedDataset> {
    config.validate()?;
    let n = config.n;
    let mut r = rng::stream(config.seed, &[tag::SIMULATION, cell_replicate]);
    let (lo, hi) = config.p_range;
    let p = r.random_range(lo..=hi);
    let sds: [f64; 4] = [
        config.sigma[0],
        config.sigma[1],
        config.sigma[2],
        config.sigma[3],
    ];
    let mut latent = draw_latent(&mut r, n, &sds);
    orthogonalize(&mut latent, &sds);
    let mixing = mixing_matrix(&mut r, p);
    let x = latent.mul(&mixing);
    let s = config.eta_scale();
    let y = respond(&mut r, &latent, config, s);
    let names = (1..=p).map(|j| alloc::format!("x{j}")).collect();
    let data = Dataset::new(x, y, config.family)?.with_column_names(names)?;

    let test_extension = if config.test_rows > 0 {
        let mut rt = rng::stream(config.seed, &[tag::TEST_EXTENSION, cell_replicate]);
        let lt = draw_latent(&mut rt, config.test_rows, &sds);
        let yt = respond(&mut rt, &lt, config, s);
        Some(Dataset::new(lt.mul(&mixing), yt, config.family)?)
    } else {
        None
    };
    Ok(SimulatedDataset {
        data,
        latent,
        mixing,
        true_k: 3,
        p_drawn: p,
        eta_scale: s,
        test_extension,
    })
}

/// `count` values `start, start + step, ...`, rounded to 10 decimals.
pub fn sigma_sequence(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| ((start + step * i as f64) * 1e10).round() / 1e10)
        .collect()
}

/// Cartesian product of `σ₄` and `σ₅` values, `σ₄` varying slowest.
pub fn couples(sigma4: &[f64], sigma5: &[f64]) -> Vec<(f64, f64)> {
    sigma4
        .iter()
        .flat_map(|&a| sigma5.iter().map(move |&b| (a, b)))
        .collect()
}

/// A grid of criterion runs.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub couples: Vec<(f64, f64)>,
    /// Generator settings; `σ₄` and `σ₅` are taken from each couple.
    pub template: SimConfig,
    pub criteria: Vec<CriterionSpec>,
    pub kmax: usize,
    /// Master seed for data generation and criteria.
    pub seed: u64,
}

impl GridSpec {
    pub fn cell_count(&self) -> usize {
        self.couples.len() * self.template.datasets_per_cell
    }

    /// Couple index and replicate of cell `cell`.
    pub fn cell(&self, cell: usize) -> (usize, usize) {
        let d = self.template.datasets_per_cell;
        (cell / d, cell % d)
    }

    /// Generator configuration of couple `couple`.
    pub fn config_for(&self, couple: usize) -> SimConfig {
        let (s4, s5) = self.couples[couple];
        SimConfig {
            seed: rng::derive_seed(self.seed, &[tag::SIMULATION, couple as u64]),
            ..self.template.clone().with_noise(s4, s5)
        }
    }
}

/// One `(couple, replicate, criterion)` outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub couple_index: usize,
    pub sigma4: f64,
    pub sigma5: f64,
    pub replicate: usize,
    pub criterion: CriterionKind,
    pub p: usize,
    pub k: Option<usize>,
    pub k_max: Option<usize>,
    pub nmse_train: Option<f64>,
    pub nmse_test: Option<f64>,
    pub missclassed_test: Option<usize>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

struct Metrics {
    nmse_train: Option<f64>,
    nmse_test: Option<f64>,
    missclassed_test: Option<usize>,
}

fn metrics(sim: &SimulatedDataset, path: &PlsPath, k: usize) -> Result<Metrics> {
    let model = path.model(k)?;
    let y = sim.data.y();
    let ybar = mean(y);
    let nmse_train = nmse(y, &model.fitted, ybar).ok();
    let (nmse_test, missclassed_test) = match &sim.test_extension {
        Some(test) => {
            let pred = model.predict(test.x())?;
            let mc = if sim.data.family() == Family::Binomial {
                Some(missclassed_count(test.y(), &pred)?)
            } else {
                None
            };
            (nmse(test.y(), &pred, ybar).ok(), mc)
        }
        None => (None, None),
    };
    Ok(Metrics {
        nmse_train,
        nmse_test,
        missclassed_test,
    })
}

/// Generates the dataset of one cell and runs every criterion on it,
/// returning one row per criterion in `spec.criteria` order. `timer`, when
/// given, returns a monotone clock in milliseconds used for `runtime_ms`.
pub fn run_cell(
    spec: &GridSpec,
    couple: usize,
    replicate: usize,
    timer: Option<&dyn Fn() -> f64>,
) -> Vec<GridRow> {
    let (sigma4, sigma5) = spec.couples[couple];
    let cfg = spec.config_for(couple);
    let blank = |criterion: CriterionKind, p: usize, error: Option<String>| GridRow {
        couple_index: couple,
        sigma4,
        sigma5,
        replicate,
        criterion,
        p,
        k: None,
        k_max: None,
        nmse_train: None,
        nmse_test: None,
        missclassed_test: None,
        runtime_ms: None,
        error,
    };
    let sim = match simulate_univ_yx(&cfg, replicate as u64) {
        Ok(s) => s,
        Err(e) => {
            return spec
                .criteria
                .iter()
                .map(|c| blank(c.kind(), 0, Some(e.to_string())))
                .collect();
        }
    };
    let p = sim.p_drawn;
    let path =
        center_scale(&sim.data).and_then(|s| PlsPath::build(&s, spec.kmax.min(p).min(cfg.n - 1)));
    let crit_seed = rng::derive_seed(cfg.seed, &[tag::CRITERION, replicate as u64]);
    spec.criteria
        .iter()
        .map(|c| {
            let start = timer.map(|t| t());
            let outcome = criteria::select(&sim.data, c, spec.kmax, crit_seed);
            let runtime_ms = match (timer, start) {
                (Some(t), Some(s)) => Some(t() - s),
                _ => None,
            };
            let mut row = blank(c.kind(), p, None);
            row.runtime_ms = runtime_ms;
            match outcome {
                Ok(res) => {
                    row.k = Some(res.k);
                    row.k_max = res.k_max;
                    let m = path
                        .as_ref()
                        .map_err(Clone::clone)
                        .and_then(|pa| metrics(&sim, pa, res.k));
                    match m {
                        Ok(m) => {
                            row.nmse_train = m.nmse_train;
                            row.nmse_test = m.nmse_test;
                            row.missclassed_test = m.missclassed_test;
                        }
                        Err(e) => row.error = Some(e.to_string()),
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// All cells in index order (couple-major), serially.
pub fn grid_run(spec: &GridSpec) -> Result<Vec<GridRow>> {
    if spec.couples.is_empty() || spec.criteria.is_empty() {
        return Err(Error::InvalidArgument(
            "grid needs at least one couple and one criterion".into(),
        ));
    }
    spec.template.validate()?;
    let mut rows = Vec::with_capacity(spec.cell_count() * spec.criteria.len());
    for cell in 0..spec.cell_count() {
        let (c, r) = spec.cell(cell);
        rows.extend(run_cell(spec, c, r, None));
    }
    Ok(rows)
}
