//! Small dense linear algebra: a column-major matrix and a Householder QR
//! with a relative rank check.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative tolerance used to declare a QR diagonal entry zero.
pub const RANK_TOL: f64 = 1e-10;

/// Dense column-major `f64` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. All rows must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        for r in rows {
            if r.as_ref().len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    found: r.as_ref().len(),
                });
            }
        }
        Ok(Self::from_fn(n, p, |i, j| rows[i].as_ref()[j]))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[f64]>>(cols: &[C]) -> Result<Self> {
        let p = cols.len();
        let n = cols.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(n * p);
        for c in cols {
            let c = c.as_ref();
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            rows: n,
            cols: p,
            data,
        })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Appends a column in place.
    pub fn push_col(&mut self, c: &[f64]) -> Result<()> {
        if self.cols > 0 && c.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: c.len(),
            });
        }
        if self.cols == 0 {
            self.rows = c.len();
        }
        self.data.extend_from_slice(c);
        self.cols += 1;
        Ok(())
    }

    /// Rows picked by index, repetitions allowed.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j))
    }

    /// The first `k` columns.
    pub fn leading_cols(&self, k: usize) -> Self {
        let k = k.min(self.cols);
        Self {
            rows: self.rows,
            cols: k,
            data: self.data[..k * self.rows].to_vec(),
        }
    }

    /// A copy with a leading column of ones.
    pub fn with_intercept(&self) -> Self {
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        data.extend(core::iter::repeat_n(1.0, self.rows));
        data.extend_from_slice(&self.data);
        Self {
            rows: self.rows,
            cols: self.cols + 1,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                axpy(vj, self.col(j), &mut out);
            }
        }
        out
    }

    /// `selfᵀ * v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|j| dot(self.col(j), v)).collect()
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let c = self.mul_vec(other.col(j));
            out.col_mut(j).copy_from_slice(&c);
        }
        out
    }

    /// `selfᵀ * other`.
    pub fn tr_mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.cols, other.cols, |i, j| dot(self.col(i), other.col(j)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

/// Sample variance with denominator `n - 1`; zero for fewer than two values.
pub fn sample_variance(a: &[f64]) -> f64 {
    if a.len() < 2 {
        return 0.0;
    }
    let m = mean(a);
    a.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (a.len() - 1) as f64
}

/// Householder QR factorization of an `n x q` matrix, `n >= q`.
///
/// Construction fails with [`Error::SingularDesign`] when some diagonal entry
/// of `R` is below [`RANK_TOL`] times the norm of the corresponding input
/// column.
#[derive(Debug, Clone)]
pub struct Qr {
    /// Householder vectors below the diagonal, `R` on and above it.
    qr: Matrix,
    /// Leading element of each Householder vector (the rest lives in `qr`).
    v0: Vec<f64>,
    /// Diagonal of `R`.
    rdiag: Vec<f64>,
}

impl Qr {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (n, q) = (a.nrows(), a.ncols());
        if n < q || q == 0 {
            return Err(Error::SingularDesign);
        }
        let col_norms: Vec<f64> = (0..q).map(|j| norm(a.col(j))).collect();
        let mut qr = a.clone();
        let mut v0 = vec![0.0; q];
        let mut rdiag = vec![0.0; q];
        for j in 0..q {
            let x_norm = norm(&qr.col(j)[j..]);
            if col_norms[j] == 0.0 || x_norm <= RANK_TOL * col_norms[j] {
                return Err(Error::SingularDesign);
            }
            let x0 = qr.get(j, j);
            let alpha = if x0 >= 0.0 { -x_norm } else { x_norm };
            // v = x - alpha e1, normalized to unit length
            let mut v_head = x0 - alpha;
            let tail_sq: f64 = qr.col(j)[j + 1..].iter().map(|v| v * v).sum();
            let v_norm = (v_head * v_head + tail_sq).sqrt();
            v_head /= v_norm;
            for i in j + 1..n {
                let val = qr.get(i, j) / v_norm;
                qr.set(i, j, val);
            }
            v0[j] = v_head;
            rdiag[j] = alpha;
            for c in j + 1..q {
                let mut s = v_head * qr.get(j, c);
                for i in j + 1..n {
                    s += qr.get(i, j) * qr.get(i, c);
                }
                s *= 2.0;
                let val = qr.get(j, c) - s * v_head;
                qr.set(j, c, val);
                for i in j + 1..n {
                    let val = qr.get(i, c) - s * qr.get(i, j);
                    qr.set(i, c, val);
                }
            }
        }
        Ok(Self { qr, v0, rdiag })
    }

    pub fn ncols(&self) -> usize {
        self.rdiag.len()
    }

    /// Applies `Qᵀ` to `b` in place.
    pub fn apply_qt(&self, b: &mut [f64]) {
        let n = self.qr.nrows();
        for j in 0..self.ncols() {
            let mut s = self.v0[j] * b[j];
            for i in j + 1..n {
                s += self.qr.get(i, j) * b[i];
            }
            s *= 2.0;
            b[j] -= s * self.v0[j];
            for i in j + 1..n {
                b[i] -= s * self.qr.get(i, j);
            }
        }
    }

    #[inline]
    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else {
            self.qr.get(i, j)
        }
    }

    /// Least-squares solution of `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        self.back_substitute(&qtb[..self.ncols()])
    }

    fn back_substitute(&self, rhs: &[f64]) -> Vec<f64> {
        let q = self.ncols();
        let mut x = rhs.to_vec();
        for i in (0..q).rev() {
            let mut s = x[i];
            for j in i + 1..q {
                s -= self.r(i, j) * x[j];
            }
            x[i] = s / self.rdiag[i];
        }
        x
    }

    /// `(AᵀA)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub fn inverse_gram(&self) -> Matrix {
        let q = self.ncols();
        // R^{-1}, upper triangular
        let mut rinv = Matrix::zeros(q, q);
        for c in 0..q {
            let mut e = vec![0.0; q];
            e[c] = 1.0;
            let x = self.back_substitute(&e);
            rinv.col_mut(c).copy_from_slice(&x);
        }
        Matrix::from_fn(q, q, |i, j| {
            (i.max(j)..q).map(|m| rinv.get(i, m) * rinv.get(j, m)).sum()
        })
    }
}

/// Solves the square system `A x = b` through QR.
pub fn solve_square(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Qr::new(a)?.solve(b))
}

/// Inverse of a square non-singular matrix.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let qr = Qr::new(a)?;
    let q = a.ncols();
    let mut out = Matrix::zeros(q, q);
    for c in 0..q {
        let mut e = vec![0.0; q];
        e[c] = 1.0;
        out.col_mut(c).copy_from_slice(&qr.solve(&e));
    }
    Ok(out)
}
