use alloc::vec::Vec;

use super::dense::Mat;

/// Eigenvalues sorted descending, optionally with matching eigenvectors as
/// columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: Option<Mat>,
}

impl Spectrum {
    /// Sorts `values` descending and permutes `vectors` to match.
    pub fn new(values: Vec<f64>, vectors: Option<Mat>) -> Self {
        if let Some(v) = &vectors {
            assert_eq!(v.ncols(), values.len(), "one eigenvector per eigenvalue");
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let sorted = order.iter().map(|&i| values[i]).collect();
        let vectors = vectors.map(|v| v.select_cols(&order));
        Spectrum { values: sorted, vectors }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self::new(values, None)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> Option<&Mat> {
        self.vectors.as_ref()
    }

    pub fn into_parts(self) -> (Vec<f64>, Option<Mat>) {
        (self.values, self.vectors)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One-based access, `lambda(1)` being the largest.
    pub fn lambda(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|k| self.values.get(k)).copied()
    }

    /// Keeps the leading `k` eigenpairs.
    pub fn truncated(&self, k: usize) -> Spectrum {
        let k = k.min(self.values.len());
        Spectrum {
            values: self.values[..k].to_vec(),
            vectors: self.vectors.as_ref().map(|v| v.leading_cols(k)),
        }
    }
}
