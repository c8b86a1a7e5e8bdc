use super::dense::Mat;
use crate::error::{Error, Result};

/// A symmetric linear map on `R^n`, applied to blocks of column vectors.
pub trait SymOperator {
    fn dim(&self) -> usize;

    /// `A X` for an `n x k` block `X`.
    fn apply(&self, x: &Mat) -> Mat;

    /// `A X` with `X` and the result stored row-major, `k` entries per row.
    fn apply_row_major(&self, x: &[f64], k: usize, y: &mut [f64]) {
        let n = self.dim();
        let ax = self.apply(&Mat::from_fn(n, k, |i, j| x[i * k + j]));
        for j in 0..k {
            for (i, &v) in ax.col(j).iter().enumerate() {
                y[i * k + j] = v;
            }
        }
    }
}

impl<O: SymOperator + ?Sized> SymOperator for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &Mat) -> Mat {
        (**self).apply(x)
    }

    fn apply_row_major(&self, x: &[f64], k: usize, y: &mut [f64]) {
        (**self).apply_row_major(x, k, y)
    }
}

/// A dense matrix checked to be symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSym(Mat);

impl DenseSym {
    /// Accepts `a` if `max |A - Aᵀ| <= tol * max |A|`.
    pub fn new(a: Mat, tol: f64) -> Result<Self> {
        let asym = a.asymmetry()?;
        if asym > tol * a.max_abs() {
            return Err(Error::Config("dense operator is not symmetric"));
        }
        Ok(DenseSym(a))
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_inner(self) -> Mat {
        self.0
    }
}

impl SymOperator for DenseSym {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &Mat) -> Mat {
        // Aᵀ X reads A column-wise, which is the cache-friendly direction.
        self.0.tr_matmul(x)
    }
}

/// `A + shift * I`.
#[derive(Clone, Debug)]
pub struct Shifted<O> {
    pub inner: O,
    pub shift: f64,
}

impl<O: SymOperator> SymOperator for Shifted<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &Mat) -> Mat {
        let mut y = self.inner.apply(x);
        y.axpy(self.shift, x);
        y
    }
}

/// `(I - U Uᵀ) A (I - U Uᵀ)` for a block `U` with orthonormal columns.
#[derive(Clone, Debug)]
pub struct Deflated<O> {
    pub inner: O,
    basis: Mat,
}

impl<O: SymOperator> Deflated<O> {
    pub fn new(inner: O, basis: Mat) -> Result<Self> {
        if basis.nrows() != inner.dim() {
            return Err(Error::Dimension("deflation basis has the wrong length"));
        }
        Ok(Deflated { inner, basis })
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    /// Removes the components along the deflation basis.
    pub fn project(&self, x: &Mat) -> Mat {
        let coeff = self.basis.tr_matmul(x);
        let mut out = x.clone();
        out.axpy(-1.0, &self.basis.matmul(&coeff));
        out
    }
}

impl<O: SymOperator> SymOperator for Deflated<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &Mat) -> Mat {
        self.project(&self.inner.apply(&self.project(x)))
    }
}
