//! Subspace comparisons: Procrustes alignment, the `ℓ2` subspace distance,
//! the row-wise alignment proxy and coherence.

use super::dense::Mat;
use super::norms::{spectral_norm, two_to_inf_norm};
use super::svd::small_svd;
use crate::error::{Error, Result};

fn check_pair(a: &Mat, b: &Mat) -> Result<()> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::Dimension("subspace bases must have equal shape"));
    }
    if a.is_empty() {
        return Err(Error::Dimension("empty subspace basis"));
    }
    Ok(())
}

/// Orthogonal `Z` minimizing `‖vhat - V Z‖_F`, i.e. `U Wᵀ` from the SVD
/// `Vᵀ vhat = U Σ Wᵀ`.
pub fn procrustes_align(vhat: &Mat, v: &Mat) -> Result<Mat> {
    check_pair(vhat, v)?;
    let svd = small_svd(&v.tr_matmul(vhat))?;
    Ok(svd.u.matmul_tr(&svd.w))
}

/// `‖V Vᵀ - Q Qᵀ‖_2`, evaluated as `‖(I - V Vᵀ) Q‖_2` on the `n x r`
/// residual so no `n x n` projector is formed.
pub fn dist_2(q: &Mat, v: &Mat) -> Result<f64> {
    check_pair(q, v)?;
    let mut resid = q.clone();
    resid.axpy(-1.0, &v.matmul(&v.tr_matmul(q)));
    Ok(spectral_norm(&resid, 1e-14)?.min(1.0))
}

/// `‖Q - V Z_F‖_{2->inf}` with `Z_F` the Procrustes rotation. Upper-bounds
/// the rotation-minimized `2->inf` distance.
pub fn dist_2inf_proxy(q: &Mat, v: &Mat) -> Result<f64> {
    let z = procrustes_align(q, v)?;
    two_to_inf_norm(&q.sub(&v.matmul(&z)))
}

/// `‖V‖_{2->inf} sqrt(n / r)`.
pub fn coherence(v: &Mat) -> Result<f64> {
    let (n, r) = (v.nrows() as f64, v.ncols() as f64);
    Ok(two_to_inf_norm(v)? * libm::sqrt(n / r))
}
