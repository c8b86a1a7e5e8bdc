use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense real matrix, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// An `n x r` block of columns, usually with orthonormal columns.
pub type ColumnBlock = Mat;

/// Small `r x r` matrix: triangular factors, rotations, Ritz matrices.
pub type SmallSquare = Mat;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Plain,
    Transposed,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::eye_cols(n, n)
    }

    /// The first `k` columns of the `n x n` identity.
    pub fn eye_cols(n: usize, k: usize) -> Self {
        let mut m = Self::zeros(n, k);
        for j in 0..k.min(n) {
            m[(j, j)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from row-major values.
    pub fn from_row_slice(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols, "from_row_slice: length mismatch");
        Self::from_fn(rows, cols, |i, j| values[i * cols + j])
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "from_col_major: length mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_column(v: &[f64]) -> Self {
        Mat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn leading_cols(&self, k: usize) -> Mat {
        assert!(k <= self.cols);
        Mat { rows: self.rows, cols: k, data: self.data[..k * self.rows].to_vec() }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Mat { rows: self.rows, cols: idx.len(), data }
    }

    /// Horizontal concatenation `[self, other]`.
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows, cols: self.cols + other.cols, data }
    }

    /// `self * diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Mat {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for (j, &s) in d.iter().enumerate() {
            out.col_mut(j).iter_mut().for_each(|x| *x *= s);
        }
        out
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Mat {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for j in 0..self.cols {
            out.col_mut(j).iter_mut().zip(d).for_each(|(x, s)| *x *= s);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= s);
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Mat, f: impl Fn(f64, f64) -> f64) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a += alpha * b);
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        gemm(self, Side::Plain, other, Side::Plain)
    }

    /// `selfᵀ * other`.
    pub fn tr_matmul(&self, other: &Mat) -> Mat {
        gemm(self, Side::Transposed, other, Side::Plain)
    }

    /// `self * otherᵀ`.
    pub fn matmul_tr(&self, other: &Mat) -> Mat {
        gemm(self, Side::Plain, other, Side::Transposed)
    }

    /// `self += alpha * a * bᵀ`, the rank-k update used when assembling
    /// dense operators from factors.
    pub fn add_matmul_tr(&mut self, alpha: f64, a: &Mat, b: &Mat) {
        assert_eq!(a.cols, b.cols);
        assert_eq!((self.rows, self.cols), (a.rows, b.rows));
        gemm_into(alpha, a, Side::Plain, b, Side::Transposed, 1.0, self);
    }

    /// `max |QᵀQ - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.tr_matmul(self);
        let mut worst: f64 = 0.0;
        for j in 0..g.cols {
            for i in 0..g.rows {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.orthonormality_defect() <= tol
    }

    /// Largest `|A - Aᵀ|` entry; `Err` if not square.
    pub fn asymmetry(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Dimension("asymmetry of a non-square matrix"));
        }
        let mut worst: f64 = 0.0;
        for j in 0..self.cols {
            for i in 0..j {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Ok(worst)
    }
}

fn gemm(a: &Mat, sa: Side, b: &Mat, sb: Side) -> Mat {
    let m = if sa == Side::Plain { a.rows } else { a.cols };
    let n = if sb == Side::Plain { b.cols } else { b.rows };
    let mut c = Mat::zeros(m, n);
    gemm_into(1.0, a, sa, b, sb, 0.0, &mut c);
    c
}

fn gemm_into(alpha: f64, a: &Mat, sa: Side, b: &Mat, sb: Side, beta: f64, c: &mut Mat) {
    let (m, k) = if sa == Side::Plain { (a.rows, a.cols) } else { (a.cols, a.rows) };
    let (kb, n) = if sb == Side::Plain { (b.rows, b.cols) } else { (b.cols, b.rows) };
    assert_eq!(k, kb, "inner dimensions differ");
    assert_eq!((c.rows, c.cols), (m, n));
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c.data.iter_mut().for_each(|x| *x *= beta);
        return;
    }
    // Column-major element (i, j) sits at i + j * rows.
    let (rsa, csa) = match sa {
        Side::Plain => (1, a.rows as isize),
        Side::Transposed => (a.rows as isize, 1),
    };
    let (rsb, csb) = match sb {
        Side::Plain => (1, b.rows as isize),
        Side::Transposed => (b.rows as isize, 1),
    };
    // SAFETY: strides and extents above describe exactly the buffers of `a`,
    // `b` and `c`; `c` does not alias either input.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            beta,
            c.data.as_mut_ptr(),
            1,
            c.rows as isize,
        );
    }
}

/// `x -= B_k (B_kᵀ x)` where `B_k` is the first `k` columns of `basis`.
pub(crate) fn project_out_prefix(basis: &Mat, k: usize, x: &mut Mat) {
    let (n, m) = (x.rows, x.cols);
    assert_eq!(basis.rows, n);
    assert!(k <= basis.cols);
    if k == 0 || m == 0 || n == 0 {
        return;
    }
    let mut coeffs = Mat::zeros(k, m);
    // SAFETY: the first k columns of `basis` are the contiguous prefix of
    // length n * k; `coeffs` and `x` are distinct owned buffers.
    unsafe {
        matrixmultiply::dgemm(
            k,
            n,
            m,
            1.0,
            basis.data.as_ptr(),
            n as isize,
            1,
            x.data.as_ptr(),
            1,
            n as isize,
            0.0,
            coeffs.data.as_mut_ptr(),
            1,
            k as isize,
        );
        matrixmultiply::dgemm(
            n,
            k,
            m,
            -1.0,
            basis.data.as_ptr(),
            1,
            n as isize,
            coeffs.data.as_ptr(),
            1,
            k as isize,
            1.0,
            x.data.as_mut_ptr(),
            1,
            n as isize,
        );
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}
