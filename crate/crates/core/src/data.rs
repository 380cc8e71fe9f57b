//! Datasets, response families and standardization.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{mean, Matrix};

/// Distribution of the response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Gaussian,
    Binomial,
    Poisson,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Binomial => "binomial",
            Family::Poisson => "poisson",
        }
    }

    pub fn is_glm(self) -> bool {
        !matches!(self, Family::Gaussian)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Family::Gaussian),
            "binomial" => Ok(Family::Binomial),
            "poisson" => Ok(Family::Poisson),
            other => Err(Error::InvalidArgument(format!("unknown family `{other}`"))),
        }
    }
}

/// Predictors `x` (n x p), response `y` and its family.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Matrix,
    y: Vec<f64>,
    family: Family,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    /// Validates shape, finiteness and family-specific response support.
    pub fn new(x: Matrix, y: Vec<f64>, family: Family) -> Result<Self> {
        let (n, p) = (x.nrows(), x.ncols());
        if n < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 rows, got {n}"
            )));
        }
        if p < 1 {
            return Err(Error::InvalidDataset("need at least one predictor".into()));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite entry".into()));
        }
        match family {
            Family::Gaussian => {}
            Family::Binomial => {
                if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
                    return Err(Error::InvalidDataset(format!(
                        "binomial response must be 0/1, row {i} is {}",
                        y[i]
                    )));
                }
            }
            Family::Poisson => {
                if let Some(i) = y.iter().position(|&v| v < 0.0 || v.fract() != 0.0) {
                    return Err(Error::InvalidDataset(format!(
                        "poisson response must be a non-negative integer, row {i} is {}",
                        y[i]
                    )));
                }
            }
        }
        Ok(Self {
            x,
            y,
            family,
            column_names: None,
        })
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.x.ncols(),
                found: names.len(),
            });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Row subset (repetitions allowed), re-validated.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let y = rows.iter().map(|&i| self.y[i]).collect();
        let mut d = Self::new(self.x.select_rows(rows), y, self.family)?;
        d.column_names = self.column_names.clone();
        Ok(d)
    }
}

/// Per-column centering and scaling constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    pub x_means: Vec<f64>,
    pub x_sds: Vec<f64>,
    pub y_mean: f64,
    pub y_sd: f64,
}

impl ScalingParams {
    /// Maps a raw predictor matrix into the standardized space.
    pub fn scale_x(&self, x: &Matrix) -> Result<Matrix> {
        if x.ncols() != self.x_means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x_means.len(),
                found: x.ncols(),
            });
        }
        Ok(Matrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            (x.get(i, j) - self.x_means[j]) / self.x_sds[j]
        }))
    }

    pub fn unscale_x(&self, xs: &Matrix) -> Matrix {
        Matrix::from_fn(xs.nrows(), xs.ncols(), |i, j| {
            xs.get(i, j) * self.x_sds[j] + self.x_means[j]
        })
    }

    pub fn unscale_y(&self, ys: f64) -> f64 {
        ys * self.y_sd + self.y_mean
    }
}

/// A dataset mapped to standardized coordinates.
#[derive(Debug, Clone)]
pub struct Standardized {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub family: Family,
    pub scaling: ScalingParams,
}

impl Standardized {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

fn sample_sd(v: &[f64], m: f64) -> f64 {
    let ss: f64 = v.iter().map(|a| (a - m) * (a - m)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

fn is_constant(v: &[f64], sd: f64, m: f64) -> bool {
    sd == 0.0 || sd <= 1e-13 * m.abs() || v.iter().all(|&a| a == v[0])
}

/// Centers every predictor column and scales it to unit sample standard
/// deviation (denominator `n - 1`). The response is standardized the same
/// way for the gaussian family and left untouched otherwise.
pub fn center_scale(data: &Dataset) -> Result<Standardized> {
    let x = data.x();
    let (n, p) = (x.nrows(), x.ncols());
    let mut x_means = Vec::with_capacity(p);
    let mut x_sds = Vec::with_capacity(p);
    for j in 0..p {
        let c = x.col(j);
        let m = mean(c);
        let sd = sample_sd(c, m);
        if is_constant(c, sd, m) {
            return Err(Error::ZeroVarianceColumn(j));
        }
        x_means.push(m);
        x_sds.push(sd);
    }
    let xs = Matrix::from_fn(n, p, |i, j| (x.get(i, j) - x_means[j]) / x_sds[j]);
    let (y_mean, y_sd, ys) = if data.family() == Family::Gaussian {
        let y = data.y();
        let m = mean(y);
        let sd = sample_sd(y, m);
        if is_constant(y, sd, m) {
            return Err(Error::ZeroVarianceResponse);
        }
        (m, sd, y.iter().map(|v| (v - m) / sd).collect())
    } else {
        (0.0, 1.0, data.y().to_vec())
    };
    Ok(Standardized {
        x: xs,
        y: ys,
        family: data.family(),
        scaling: ScalingParams {
            x_means,
            x_sds,
            y_mean,
            y_sd,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ds(cols: &[&[f64]], y: &[f64], family: Family) -> Result<Dataset> {
        Dataset::new(Matrix::from_columns(cols).unwrap(), y.to_vec(), family)
    }

    #[test]
    fn symmetric_column_scales_to_minus_one_zero_one() {
        // sample sd of [1,2,3] is exactly 1
        let d = ds(&[&[1.0, 2.0, 3.0]], &[0.0, 1.0, 5.0], Family::Gaussian).unwrap();
        let s = center_scale(&d).unwrap();
        assert_eq!(s.x.col(0), &[-1.0, 0.0, 1.0]);
        assert_eq!(s.scaling.x_means, vec![2.0]);
        assert_eq!(s.scaling.x_sds, vec![1.0]);
    }

    #[test]
    fn constant_column_is_rejected() {
        let d = ds(
            &[&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]],
            &[0.0, 1.0, 5.0],
            Family::Gaussian,
        )
        .unwrap();
        assert_eq!(center_scale(&d).unwrap_err(), Error::ZeroVarianceColumn(1));
    }

    #[test]
    fn scaling_round_trips() {
        let c0 = [0.3, -1.7, 2.2, 9.1, 4.4];
        let c1 = [1e3, 2e3, -5e2, 7.5, 0.1];
        let d = ds(&[&c0, &c1], &[1.0, 0.0, 1.0, 1.0, 0.0], Family::Binomial).unwrap();
        let s = center_scale(&d).unwrap();
        let back = s.scaling.unscale_x(&s.x);
        for j in 0..2 {
            for i in 0..5 {
                let orig = d.x().get(i, j);
                assert!((back.get(i, j) - orig).abs() <= 1e-12 * orig.abs().max(1.0));
            }
        }
        // non-gaussian responses stay on their own scale
        assert_eq!(s.y, d.y());
    }

    #[test]
    fn family_support_is_checked() {
        assert!(ds(&[&[1.0, 2.0]], &[0.0, 2.0], Family::Binomial).is_err());
        assert!(ds(&[&[1.0, 2.0]], &[0.5, 2.0], Family::Poisson).is_err());
        assert!(ds(&[&[1.0, 2.0]], &[-1.0, 2.0], Family::Poisson).is_err());
        assert!(ds(&[&[1.0, f64::NAN]], &[0.0, 1.0], Family::Gaussian).is_err());
        assert!(ds(&[&[1.0]], &[0.0], Family::Gaussian).is_err());
        assert!(ds(&[&[1.0, 2.0]], &[3.0, 2.0], Family::Poisson).is_ok());
    }
}
