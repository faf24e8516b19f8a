//! Dense row-major matrices and the norm/factorization primitives built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::math::{abs, sqrt};
use crate::svd::exact_svd;
use crate::{Error, Result};

/// Dense real matrix, row-major: entry `(i, j)` lives at `data[i * cols + j]`.
///
/// Both dimensions are positive. Constructors that take caller data reject
/// non-finite entries; arithmetic on finite inputs is not re-checked.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if rows * cols != data.len() {
            return Err(Error::BadShape { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: pos / cols, col: pos % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    op: "from_rows",
                    left: (i, ncols),
                    right: (i, row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), ncols, data)
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let ncols = columns.len();
        let nrows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != nrows) {
            return Err(Error::param("columns of unequal length"));
        }
        let mut data = vec![0.0; nrows * ncols];
        for (j, c) in columns.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                data[i * ncols + j] = x;
            }
        }
        Self::new(nrows, ncols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn set_col(&mut self, j: usize, values: &[f64]) {
        for (i, &v) in values.iter().enumerate() {
            self.data[i * self.cols + j] = v;
        }
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

    /// The first `n` columns.
    pub fn leading_cols(&self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.cols);
        Self::from_fn(self.rows, n, |i, j| self[(i, j)])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        multiply(self, other)
    }

    /// `selfᵀ · other` without forming the transpose.
    pub fn t_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "t_matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = other.row(k);
            for (i, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(b_row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`, symmetric by construction.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..n {
                let ri = r[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += ri * r[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(abs(x)))
    }

    pub fn squared_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Standard matrix product `a · b`.
pub fn multiply(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch { op: "multiply", left: a.shape(), right: b.shape() });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let dst = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for (d, &bkj) in dst.iter_mut().zip(b.row(k)) {
                *d += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    sqrt(a.squared_norm())
}

pub const SPECTRAL_TOL: f64 = 1e-10;
pub const SPECTRAL_MAX_ITERS: usize = 10_000;

/// Largest singular value by power iteration on the smaller Gram matrix,
/// started from the all-ones vector.
///
/// Stops when the Rayleigh quotient changes by at most `tol` relative. On
/// running out of iterations the error carries the last estimate.
pub fn spectral_norm(a: &Matrix, tol: f64, max_iters: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::param("spectral_norm tolerance must be positive"));
    }
    let g = if a.cols <= a.rows { a.gram() } else { a.transpose().gram() };
    let n = g.rows;
    if g.is_zero() {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / sqrt(n as f64); n];
    let mut lambda = 0.0;
    for iter in 0..max_iters {
        let mut y = mat_vec(&g, &x);
        let mut norm = sqrt(y.iter().map(|v| v * v).sum());
        if norm == 0.0 {
            // The start vector hit the null space; restart on the heaviest coordinate.
            let j = (0..n)
                .max_by(|&p, &q| g[(p, p)].total_cmp(&g[(q, q)]))
                .unwrap_or(0);
            x = vec![0.0; n];
            x[j] = 1.0;
            y = mat_vec(&g, &x);
            norm = sqrt(y.iter().map(|v| v * v).sum());
        }
        for v in &mut y {
            *v /= norm;
        }
        let gy = mat_vec(&g, &y);
        let next: f64 = y.iter().zip(&gy).map(|(p, q)| p * q).sum();
        x = y;
        if iter > 0 && abs(next - lambda) <= tol * abs(next) {
            return Ok(sqrt(next.max(0.0)));
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        what: "spectral_norm",
        iterations: max_iters,
        estimate: sqrt(lambda.max(0.0)),
    })
}

fn mat_vec(a: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..a.rows)
        .map(|i| a.row(i).iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Orthonormal basis for the column space of `y` (`y.rows ≥ y.cols`), same width.
///
/// Householder QR. A column whose residual after the earlier reflections is at
/// most `1e-12·‖y‖_F` is swapped for the next canonical basis vector with a
/// usable component orthogonal to the columns already produced, so the
/// output always has `y.cols` orthonormal columns.
pub fn qr_orthonormalize(y: &Matrix) -> Result<Matrix> {
    let (m, n) = y.shape();
    if m < n {
        return Err(Error::param("qr_orthonormalize needs rows >= cols"));
    }
    let threshold = 1e-12 * frobenius_norm(y);
    // Working copy in column-major order so reflections touch contiguous memory.
    let mut work: Vec<Vec<f64>> = (0..n).map(|j| y.col(j)).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut next_canonical = 0usize;

    for j in 0..n {
        let tail_norm = sqrt(work[j][j..].iter().map(|v| v * v).sum());
        if tail_norm <= threshold {
            work[j] = replacement_column(m, j, &reflectors, &mut next_canonical);
        }
        let v = householder_vector(&work[j][j..]);
        for col in work.iter_mut().skip(j + 1) {
            apply_reflector(&v, &mut col[j..]);
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 … H_{n-1} [I_n; 0]
    let mut q = Matrix::zeros(m, n);
    for j in 0..n {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        for (t, v) in reflectors.iter().enumerate().rev() {
            apply_reflector(v, &mut e[t..]);
        }
        q.set_col(j, &e);
    }
    Ok(q)
}

/// First canonical vector (from the cursor on) whose component outside the
/// span of the first `j` output columns has squared norm at least `1/(2m)`.
/// One always exists: those squared norms sum to `m - j ≥ 1`.
fn replacement_column(m: usize, j: usize, reflectors: &[Vec<f64>], cursor: &mut usize) -> Vec<f64> {
    let floor = 1.0 / (2.0 * m as f64);
    for step in 0..m {
        let t = (*cursor + step) % m;
        let mut e = vec![0.0; m];
        e[t] = 1.0;
        for (s, v) in reflectors.iter().enumerate() {
            apply_reflector(v, &mut e[s..]);
        }
        let tail: f64 = e[j..].iter().map(|x| x * x).sum();
        if tail >= floor {
            *cursor = t + 1;
            return e;
        }
    }
    unreachable!("some canonical vector always has a large orthogonal component")
}

/// Unit Householder vector `v` with `(I - 2vvᵀ) x = ∓‖x‖ e₁`; zero when `x = 0`.
fn householder_vector(x: &[f64]) -> Vec<f64> {
    let norm = sqrt(x.iter().map(|v| v * v).sum());
    let mut v = x.to_vec();
    if norm == 0.0 {
        return v;
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    v[0] -= alpha;
    let vn = sqrt(v.iter().map(|t| t * t).sum());
    if vn == 0.0 {
        return vec![0.0; x.len()];
    }
    for t in &mut v {
        *t /= vn;
    }
    v
}

fn apply_reflector(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    if dot == 0.0 {
        return;
    }
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= 2.0 * dot * vi;
    }
}

pub const PINV_RANK_TOL: f64 = 1e-12;

/// Moore-Penrose pseudo-inverse through the exact SVD; singular values at or
/// below `rank_tol · σ_max` are treated as zero.
pub fn pseudo_inverse(a: &Matrix, rank_tol: f64) -> Result<Matrix> {
    if !(rank_tol > 0.0) {
        return Err(Error::param("rank_tol must be positive"));
    }
    let svd = exact_svd(a)?;
    let cutoff = rank_tol * svd.sigma.first().copied().unwrap_or(0.0);
    let (m, n) = a.shape();
    let mut out = Matrix::zeros(n, m);
    for (idx, &s) in svd.sigma.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            break;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vi = svd.v[(i, idx)] * inv;
            if vi == 0.0 {
                continue;
            }
            let dst = out.row_mut(i);
            for (j, d) in dst.iter_mut().enumerate() {
                *d += vi * svd.u[(j, idx)];
            }
        }
    }
    Ok(out)
}
