//! Dense vectors and row-major matrices.
//!
//! Every reduction here sums strictly left to right so that results are
//! bit-reproducible no matter how callers schedule work across threads.

use std::ops::{Deref, DerefMut};

use crate::error::{ensure_dims, MgviError, Result};

/// A finite real vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Wraps `entries`, rejecting NaN and infinities.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().all(|v| v.is_finite()) {
            Ok(Self(entries))
        } else {
            Err(MgviError::NonFinite("vector"))
        }
    }

    /// For values produced from already-finite data.
    pub(crate) fn trusted(entries: Vec<f64>) -> Self {
        debug_assert!(all_finite(&entries));
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn filled(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Dense row-major matrix. Zero rows or columns are allowed so that empty
/// blocks of a two-block problem can be represented uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure_dims!(
            data.len() == rows * cols,
            "{rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            data.len()
        );
        if !data.iter().all(|v| v.is_finite()) {
            return Err(MgviError::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            ensure_dims!(row.len() == cols, "row {i} has {} entries, expected {cols}", row.len());
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = scale;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Largest entry of `|M - Mᵀ|`; `None` for non-square matrices.
    pub fn asymmetry(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Some(worst)
    }

    /// If the matrix equals `s·I` exactly, returns `s`.
    pub fn as_scaled_identity(&self) -> Option<f64> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let s = self.get(0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { s } else { 0.0 };
                if self.get(i, j) != expected {
                    return None;
                }
            }
        }
        Some(s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// Largest Euclidean norm among the columns.
    pub fn max_column_norm(&self) -> f64 {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, &v) in sq.iter_mut().zip(self.row(i)) {
                *acc += v * v;
            }
        }
        sq.into_iter().fold(0.0, f64::max).sqrt()
    }

    /// `out = M v` without allocation. Dimensions are the caller's problem.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o = dot(row, v);
        }
        if self.cols == 0 {
            out.fill(0.0);
        }
    }

    /// `out = Mᵀ v` accumulated row by row, so the transpose is never formed.
    pub fn mul_transpose_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        if self.cols == 0 {
            return;
        }
        for (&vi, row) in v.iter().zip(self.data.chunks_exact(self.cols)) {
            if vi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * vi;
            }
        }
    }

    /// Dense product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        ensure_dims!(
            self.cols == other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }
}

/// `M v`.
pub fn mat_vec(m: &DenseMatrix, v: &[f64]) -> Result<Vector> {
    ensure_dims!(v.len() == m.cols, "matrix has {} columns, vector has {} entries", m.cols, v.len());
    let mut out = vec![0.0; m.rows];
    m.mul_vec_into(v, &mut out);
    Ok(Vector(out))
}

/// `Mᵀ v`.
pub fn mat_vec_transpose(m: &DenseMatrix, v: &[f64]) -> Result<Vector> {
    ensure_dims!(v.len() == m.rows, "matrix has {} rows, vector has {} entries", m.rows, v.len());
    let mut out = vec![0.0; m.cols];
    m.mul_transpose_vec_into(v, &mut out);
    Ok(Vector(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Estimate of the largest singular value.
    pub value: f64,
    pub iterations: usize,
    /// `false` when `max_iter` ran out before the relative change fell below `tol`.
    pub converged: bool,
}

/// Power iteration on `MᵀM` for `‖M‖₂`.
///
/// Starts from the normalized all-ones vector. The Rayleigh estimate is a
/// lower bound on the largest singular value, and so is the largest column
/// norm; the larger of the two is returned.
pub fn spectral_norm_estimate(m: &DenseMatrix, tol: f64, max_iter: usize) -> Result<SpectralEstimate> {
    if !(tol > 0.0) {
        return Err(MgviError::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let col_bound = m.max_column_norm();
    if col_bound == 0.0 {
        return Err(MgviError::InvalidParameter("spectral norm of a zero matrix".into()));
    }
    let n = m.cols;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut mv = vec![0.0; m.rows];
    let mut w = vec![0.0; n];

    m.mul_vec_into(&v, &mut mv);
    if norm2(&mv) == 0.0 {
        // all-ones lies in the null space; restart from the heaviest column
        let heaviest = (0..n)
            .map(|j| (j, (0..m.rows).map(|i| m.get(i, j).powi(2)).sum::<f64>()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        v.fill(0.0);
        v[heaviest] = 1.0;
        m.mul_vec_into(&v, &mut mv);
    }

    let mut sigma = norm2(&mv);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        m.mul_transpose_vec_into(&mv, &mut w);
        let wn = norm2(&w);
        if wn == 0.0 {
            converged = true;
            break;
        }
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        m.mul_vec_into(&v, &mut mv);
        let next = norm2(&mv);
        let change = (next - sigma).abs();
        sigma = next;
        if change <= tol * sigma {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("spectral norm estimate did not converge in {max_iter} iterations");
    }
    Ok(SpectralEstimate { value: sigma.max(col_bound), iterations, converged })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

pub fn norm2_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm2(a: &[f64]) -> f64 {
    norm2_sq(a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `a - b` as a fresh vector.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}
