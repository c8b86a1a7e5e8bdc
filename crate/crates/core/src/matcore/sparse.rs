use alloc::vec;
use alloc::vec::Vec;

use super::dense::Mat;
use super::operator::SymOperator;
use crate::error::{Error, Result};

/// Symmetric matrix in compressed sparse row form. Column indices are
/// strictly increasing inside each row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Validates the CSR arrays and the mirror entry of every stored value.
    pub fn from_csr(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 {
            return Err(Error::Dimension("row_ptr must have n + 1 entries starting at 0"));
        }
        if row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Dimension("row_ptr must be nondecreasing"));
        }
        if row_ptr[n] != col_idx.len() || col_idx.len() != values.len() {
            return Err(Error::Dimension("col_idx / values length disagree with row_ptr"));
        }
        for i in 0..n {
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.iter().any(|&c| c >= n) {
                return Err(Error::Dimension("column index out of range"));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Dimension("column indices must increase within a row"));
            }
        }
        let m = SparseSymMatrix { n, row_ptr, col_idx, values };
        if !m.is_symmetric() {
            return Err(Error::Config("CSR matrix is not symmetric"));
        }
        Ok(m)
    }

    /// Builds from `(i, j, v)` triplets, mirroring every off-diagonal entry.
    /// Duplicates are summed, so pass each unordered pair once.
    pub fn from_upper_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut full = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::Dimension("triplet index out of range"));
            }
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(full.len());
        let mut values: Vec<f64> = Vec::with_capacity(full.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in full {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseSymMatrix { n, row_ptr, col_idx, values })
    }

    /// 0/1 adjacency matrix of an undirected simple graph.
    pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let trip: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_upper_triplets(n, &trip)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    /// Every stored `(i, j, v)` has a stored `(j, i, v)`.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).all(|(&j, &v)| {
                let (cj, vj) = self.row(j);
                matches!(cj.binary_search(&i), Ok(k) if vj[k] == v)
            })
        })
    }

    /// Row sums.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

impl SymOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &Mat) -> Mat {
        assert_eq!(x.nrows(), self.n, "operand has the wrong number of rows");
        let k = x.ncols();
        let mut y = Mat::zeros(self.n, k);
        if k == 1 {
            self.matvec(x.col(0), y.col_mut(0));
            return y;
        }
        // Row-major copy so the CSR structure is streamed once per block.
        let mut xr = vec![0.0; self.n * k];
        for j in 0..k {
            for (i, &v) in x.col(j).iter().enumerate() {
                xr[i * k + j] = v;
            }
        }
        let mut yr = vec![0.0; self.n * k];
        self.apply_row_major(&xr, k, &mut yr);
        for j in 0..k {
            for (i, out) in y.col_mut(j).iter_mut().enumerate() {
                *out = yr[i * k + j];
            }
        }
        y
    }

    fn apply_row_major(&self, x: &[f64], k: usize, y: &mut [f64]) {
        assert_eq!(x.len(), self.n * k, "operand has the wrong shape");
        assert_eq!(y.len(), self.n * k, "output has the wrong shape");
        for (i, yi) in y.chunks_exact_mut(k).enumerate() {
            yi.fill(0.0);
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let src = &x[c * k..(c + 1) * k];
                yi.iter_mut().zip(src).for_each(|(a, s)| *a += v * s);
            }
        }
    }
}
