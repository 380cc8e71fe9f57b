//! PLS and PLSGLR component extraction by iterative deflation.
//!
//! A [`PlsPath`] extracts components once, up to a cap; a model with any
//! smaller number of components is read off it with [`PlsPath::model`].
//! Component `k` depends only on components `1..k`, so the `k`-component
//! model of a longer path is the model a direct `k`-component fit returns.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::data::{Family, ScalingParams, Standardized};
use crate::error::{Error, Result};
use crate::glm::{self, IrlsOptions};
use crate::linalg::{dot, inverse, norm, Matrix, RANK_TOL};

/// A fitted `k`-component model.
#[derive(Debug, Clone)]
pub struct PlsModel {
    pub k: usize,
    pub family: Family,
    /// Unit-norm weights on the deflated predictors (p x k).
    pub w: Matrix,
    /// Weights on the standardized predictors, `W (PᵀW)⁻¹` (p x k).
    pub wstar: Matrix,
    /// Components (n x k).
    pub t: Matrix,
    /// X-loadings (p x k).
    pub loadings: Matrix,
    /// Component coefficients.
    pub c: Vec<f64>,
    /// Intercept on the standardized scale (0 for gaussian, GLM intercept
    /// otherwise).
    pub intercept: f64,
    /// Predictor coefficients on the original scale.
    pub beta: Vec<f64>,
    /// Intercept on the original scale.
    pub beta0: f64,
    pub scaling: ScalingParams,
    /// In-sample fitted values on the response scale.
    pub fitted: Vec<f64>,
    /// Fewer components than requested could be extracted.
    pub rank_exhausted: bool,
    /// PLSGLR weight steps whose GLM failed to converge (weight set to 0).
    pub glm_nonconverged: usize,
    /// PLSGLR weight steps that hit the linear-predictor clamp.
    pub separations: usize,
    /// PLSGLR: smallest predictor Wald p-value at each component step.
    pub step_min_pvalues: Vec<f64>,
    /// The final GLM on the components converged (always true for gaussian).
    pub final_converged: bool,
}

impl PlsModel {
    /// `W* c`: coefficients of the standardized predictors.
    pub fn std_coefficients(&self) -> Vec<f64> {
        self.wstar.mul_vec(&self.c)
    }

    /// Linear predictor for standardized predictors (standardized response
    /// scale for gaussian).
    pub fn linear_predictor_std(&self, xs: &Matrix) -> Vec<f64> {
        let b = self.std_coefficients();
        xs.mul_vec(&b)
            .into_iter()
            .map(|v| v + self.intercept)
            .collect()
    }

    /// Predictions for raw predictors: the response on its original scale
    /// (gaussian), a probability (binomial) or a mean (poisson).
    pub fn predict(&self, xnew: &Matrix) -> Result<Vec<f64>> {
        let xs = self.scaling.scale_x(xnew)?;
        let eta = self.linear_predictor_std(&xs);
        Ok(eta.into_iter().map(|e| self.response(e)).collect())
    }

    fn response(&self, eta: f64) -> f64 {
        match self.family {
            Family::Gaussian => self.scaling.unscale_y(eta),
            Family::Binomial => glm::inv_logit(eta.clamp(-glm::ETA_CLAMP, glm::ETA_CLAMP)),
            Family::Poisson => eta.clamp(-glm::ETA_CLAMP, glm::ETA_CLAMP).exp(),
        }
    }

    /// Prediction through the original-scale coefficients `beta0 + X beta`.
    pub fn predict_via_beta(&self, xnew: &Matrix) -> Result<Vec<f64>> {
        if xnew.ncols() != self.beta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.beta.len(),
                found: xnew.ncols(),
            });
        }
        let eta = xnew.mul_vec(&self.beta);
        Ok(eta
            .into_iter()
            .map(|e| {
                let e = e + self.beta0;
                match self.family {
                    Family::Gaussian => e,
                    _ => self.response(e),
                }
            })
            .collect())
    }
}

/// Components extracted up to some cap, with everything needed to build the
/// model for any prefix.
#[derive(Debug, Clone)]
pub struct PlsPath {
    family: Family,
    scaling: ScalingParams,
    x: Matrix,
    y: Vec<f64>,
    w: Matrix,
    t: Matrix,
    loadings: Matrix,
    /// Gaussian component coefficients (y-deflation coefficients).
    c: Vec<f64>,
    step_min_pvalues: Vec<f64>,
    glm_nonconverged: Vec<usize>,
    separations: Vec<usize>,
    requested: usize,
    irls: IrlsOptions,
}

impl PlsPath {
    /// Extracts up to `kmax` components (gaussian: NIPALS on `X` and `y`;
    /// binomial/poisson: PLSGLR weights from per-predictor GLMs).
    pub fn build(data: &Standardized, kmax: usize) -> Result<Self> {
        Self::build_with(data, kmax, IrlsOptions::default())
    }

    pub fn build_with(data: &Standardized, kmax: usize, irls: IrlsOptions) -> Result<Self> {
        let (n, p) = (data.n(), data.p());
        if data.y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.y.len(),
            });
        }
        let mut path = Self {
            family: data.family,
            scaling: data.scaling.clone(),
            x: data.x.clone(),
            y: data.y.clone(),
            w: Matrix::zeros(p, 0),
            t: Matrix::zeros(n, 0),
            loadings: Matrix::zeros(p, 0),
            c: Vec::new(),
            step_min_pvalues: Vec::new(),
            glm_nonconverged: Vec::new(),
            separations: Vec::new(),
            requested: kmax,
            irls,
        };
        let x_norm = data.x.frobenius_norm();
        let col_norms: Vec<f64> = (0..p).map(|j| norm(data.x.col(j))).collect();
        let mut xd = data.x.clone();
        let mut yd = data.y.clone();
        let y_norm = norm(&yd);
        for _ in 0..kmax {
            if xd.frobenius_norm() < RANK_TOL * x_norm {
                break;
            }
            let step = match data.family {
                Family::Gaussian => {
                    let w = xd.tr_mul_vec(&yd);
                    let wn = norm(&w);
                    if !(wn > 1e-12 * x_norm * y_norm.max(1e-300)) {
                        break;
                    }
                    Step {
                        w: w.into_iter().map(|v| v / wn).collect(),
                        min_p: f64::NAN,
                        nonconverged: 0,
                        separated: 0,
                    }
                }
                family => match path.glr_weights(&xd, &col_norms, family)? {
                    Some(s) => s,
                    None => break,
                },
            };
            let t = xd.mul_vec(&step.w);
            let tt = dot(&t, &t);
            if !(tt > (RANK_TOL * x_norm).powi(2)) {
                break;
            }
            let load: Vec<f64> = xd.tr_mul_vec(&t).into_iter().map(|v| v / tt).collect();
            for j in 0..p {
                let pj = load[j];
                for (xv, tv) in xd.col_mut(j).iter_mut().zip(&t) {
                    *xv -= tv * pj;
                }
            }
            if data.family == Family::Gaussian {
                let ck = dot(&yd, &t) / tt;
                for (yv, tv) in yd.iter_mut().zip(&t) {
                    *yv -= ck * tv;
                }
                path.c.push(ck);
            }
            path.w.push_col(&step.w)?;
            path.t.push_col(&t)?;
            path.loadings.push_col(&load)?;
            path.step_min_pvalues.push(step.min_p);
            path.glm_nonconverged.push(step.nonconverged);
            path.separations.push(step.separated);
        }
        Ok(path)
    }

    /// One PLSGLR weight vector: for each predictor, a GLM of `y` on the
    /// previous components and the deflated predictor; the weight is the
    /// predictor's coefficient. `None` when no predictor carries a weight.
    fn glr_weights(&self, xd: &Matrix, col_norms: &[f64], family: Family) -> Result<Option<Step>> {
        let (n, p) = (xd.nrows(), xd.ncols());
        let k = self.t.ncols();
        let mut design = Matrix::zeros(n, 0);
        for j in 0..k {
            design.push_col(self.t.col(j))?;
        }
        design.push_col(&vec![0.0; n])?;
        let mut w = vec![0.0; p];
        let mut min_p = 1.0f64;
        let (mut nonconverged, mut separated) = (0, 0);
        for j in 0..p {
            let xj = xd.col(j);
            if norm(xj) < RANK_TOL * col_norms[j] {
                continue;
            }
            design.col_mut(k).copy_from_slice(xj);
            match glm::fit_irls(&design, &self.y, family, true, self.irls) {
                Ok(fit) if fit.converged && fit.coef.iter().all(|v| v.is_finite()) => {
                    if fit.clamped {
                        separated += 1;
                    }
                    let last = fit.coef.len() - 1;
                    w[j] = fit.coef[last];
                    let se = fit.cov.get(last, last).max(0.0).sqrt();
                    min_p = min_p.min(glm::wald_pvalue(fit.coef[last], se));
                }
                _ => nonconverged += 1,
            }
        }
        let wn = norm(&w);
        if !(wn > 0.0) {
            return Ok(None);
        }
        Ok(Some(Step {
            w: w.into_iter().map(|v| v / wn).collect(),
            min_p,
            nonconverged,
            separated,
        }))
    }

    /// Number of components actually extracted.
    pub fn ncomp(&self) -> usize {
        self.t.ncols()
    }

    /// Fewer components than the requested cap could be extracted.
    pub fn exhausted(&self) -> bool {
        self.ncomp() < self.requested
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn components(&self) -> &Matrix {
        &self.t
    }

    pub fn loadings(&self) -> &Matrix {
        &self.loadings
    }

    /// Standardized predictors the path was built on.
    pub fn x(&self) -> &Matrix {
        &self.x
    }

    /// Response the path was built on (standardized for gaussian).
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn scaling(&self) -> &ScalingParams {
        &self.scaling
    }

    /// Smallest predictor Wald p-value per component step (PLSGLR; NaN for
    /// gaussian paths).
    pub fn step_min_pvalues(&self) -> &[f64] {
        &self.step_min_pvalues
    }

    /// Fitted values of the `k`-component model on the standardized scale
    /// (gaussian only): `T_k c_k`.
    pub fn fitted_std(&self, k: usize) -> Vec<f64> {
        let mut f = vec![0.0; self.x.nrows()];
        for j in 0..k.min(self.c.len()) {
            for (fv, tv) in f.iter_mut().zip(self.t.col(j)) {
                *fv += self.c[j] * tv;
            }
        }
        f
    }

    /// Model with `k` components (`k = 0` is the intercept-only model). `k`
    /// larger than [`ncomp`](Self::ncomp) yields the full path with
    /// `rank_exhausted` set.
    pub fn model(&self, k: usize) -> Result<PlsModel> {
        let kk = k.min(self.ncomp());
        let (n, p) = (self.x.nrows(), self.x.ncols());
        let w = self.w.leading_cols(kk);
        let t = self.t.leading_cols(kk);
        let loadings = self.loadings.leading_cols(kk);
        let wstar = if kk == 0 {
            Matrix::zeros(p, 0)
        } else {
            w.mul(&inverse(&loadings.tr_mul(&w))?)
        };
        let (c, intercept, final_converged, glm_fit) = match self.family {
            Family::Gaussian => (self.c[..kk].to_vec(), 0.0, true, None),
            family => {
                let fit = glm::fit_irls(&t, &self.y, family, true, self.irls)?;
                let c = fit.coef[1..].to_vec();
                (c, fit.coef[0], fit.converged, Some(fit))
            }
        };
        let b_std = wstar.mul_vec(&c);
        let s = &self.scaling;
        let (beta, beta0) = match self.family {
            Family::Gaussian => {
                let beta: Vec<f64> = (0..p).map(|j| s.y_sd * b_std[j] / s.x_sds[j]).collect();
                let b0 = s.y_mean - (0..p).map(|j| beta[j] * s.x_means[j]).sum::<f64>();
                (beta, b0)
            }
            _ => {
                let beta: Vec<f64> = (0..p).map(|j| b_std[j] / s.x_sds[j]).collect();
                let b0 = intercept - (0..p).map(|j| beta[j] * s.x_means[j]).sum::<f64>();
                (beta, b0)
            }
        };
        let fitted = match glm_fit {
            None => self
                .fitted_std(kk)
                .into_iter()
                .map(|v| s.unscale_y(v))
                .collect(),
            Some(fit) => fit.fitted,
        };
        debug_assert_eq!(fitted.len(), n);
        Ok(PlsModel {
            k: kk,
            family: self.family,
            w,
            wstar,
            t,
            loadings,
            c,
            intercept,
            beta,
            beta0,
            scaling: self.scaling.clone(),
            fitted,
            rank_exhausted: kk < k,
            glm_nonconverged: self.glm_nonconverged[..kk].iter().sum(),
            separations: self.separations[..kk].iter().sum(),
            step_min_pvalues: self.step_min_pvalues[..kk].to_vec(),
            final_converged,
        })
    }
}

struct Step {
    w: Vec<f64>,
    min_p: f64,
    nonconverged: usize,
    separated: usize,
}

/// Gaussian PLS regression with `k` components.
pub fn fit_pls(data: &Standardized, k: usize) -> Result<PlsModel> {
    if data.family != Family::Gaussian {
        return Err(Error::FamilyMismatch {
            criterion: "fit_pls",
            required: "gaussian",
        });
    }
    PlsPath::build(data, k)?.model(k)
}

/// PLS generalized linear regression (binomial or poisson) with `k`
/// components.
pub fn fit_plsglr(data: &Standardized, k: usize) -> Result<PlsModel> {
    if data.family == Family::Gaussian {
        return Err(Error::FamilyMismatch {
            criterion: "fit_plsglr",
            required: "binomial or poisson",
        });
    }
    PlsPath::build(data, k)?.model(k)
}

/// `max_{i≠j} |t_iᵀ t_j| / (‖t_i‖ ‖t_j‖)` over the columns of `t`.
pub fn max_component_correlation(t: &Matrix) -> f64 {
    let k = t.ncols();
    let norms: Vec<f64> = (0..k).map(|j| norm(t.col(j))).collect();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in i + 1..k {
            worst = worst.max(dot(t.col(i), t.col(j)).abs() / (norms[i] * norms[j]));
        }
    }
    worst
}
