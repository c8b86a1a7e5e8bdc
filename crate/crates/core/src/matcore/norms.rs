use alloc::vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::dense::{dot, norm2, Mat};
use super::eigen::sym_eigen;
use super::operator::SymOperator;
use crate::error::{Error, Result};
use crate::DEFAULT_SEED;

/// Matrices whose smaller side is at most this size get an exact spectral
/// norm through the Gram matrix; larger ones use power iteration.
pub const EXACT_NORM_DIM: usize = 200;

/// `max_i ‖M_{i,:}‖_2`.
pub fn two_to_inf_norm(m: &Mat) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::Dimension("2->inf norm of an empty matrix"));
    }
    Ok(row_norms(m).into_iter().fold(0.0, f64::max))
}

/// Euclidean norm of every row.
pub fn row_norms(m: &Mat) -> alloc::vec::Vec<f64> {
    let mut acc = vec![0.0; m.nrows()];
    for j in 0..m.ncols() {
        for (a, x) in acc.iter_mut().zip(m.col(j)) {
            *a += x * x;
        }
    }
    acc.into_iter().map(libm::sqrt).collect()
}

/// Max absolute row sum.
pub fn inf_op_norm(m: &Mat) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::Dimension("inf norm of an empty matrix"));
    }
    let mut acc = vec![0.0; m.nrows()];
    for j in 0..m.ncols() {
        for (a, x) in acc.iter_mut().zip(m.col(j)) {
            *a += x.abs();
        }
    }
    Ok(acc.into_iter().fold(0.0, f64::max))
}

/// Largest singular value.
///
/// When one side is at most [`EXACT_NORM_DIM`] the value is
/// `sqrt(λ_max(MᵀM))` from a Jacobi eigensolve of the small Gram matrix,
/// exact to working precision. Otherwise power iteration on `MᵀM` from a
/// fixed seed runs for at most `10 n` steps until the relative change of the
/// estimate drops below `tol`.
pub fn spectral_norm(m: &Mat, tol: f64) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    if !(tol > 0.0) {
        return Err(Error::Config("spectral_norm tolerance must be positive"));
    }
    if m.ncols() <= EXACT_NORM_DIM {
        return gram_norm(&m.tr_matmul(m));
    }
    if m.nrows() <= EXACT_NORM_DIM {
        return gram_norm(&m.matmul_tr(m));
    }
    let cap = 10 * m.nrows().max(m.ncols());
    power_norm(m.ncols(), tol, cap, |x| {
        let y = m.matmul(x);
        m.tr_matmul(&y)
    })
    .map(libm::sqrt)
}

fn gram_norm(g: &Mat) -> Result<f64> {
    let top = sym_eigen(g)?.values()[0];
    Ok(libm::sqrt(top.max(0.0)))
}

/// `max |λ|` of a symmetric operator by power iteration (applied twice per
/// step so that `±λ` pairs do not stall it).
pub fn operator_norm<O: SymOperator + ?Sized>(op: &O, tol: f64, max_iters: usize) -> Result<f64> {
    if op.dim() == 0 {
        return Ok(0.0);
    }
    power_norm(op.dim(), tol, max_iters, |x| op.apply(&op.apply(x))).map(libm::sqrt)
}

/// Power iteration for the top eigenvalue of a positive semidefinite map.
fn power_norm(n: usize, tol: f64, cap: usize, mut apply: impl FnMut(&Mat) -> Mat) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut x = Mat::from_fn(n, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
    let nx = norm2(x.col(0));
    x.col_mut(0).iter_mut().for_each(|v| *v /= nx);
    let mut estimate = 0.0;
    for it in 0..cap.max(1) {
        let y = apply(&x);
        let rayleigh = dot(x.col(0), y.col(0));
        let ny = norm2(y.col(0));
        if ny == 0.0 {
            return Ok(0.0);
        }
        let converged = it > 0 && (rayleigh - estimate).abs() <= tol * rayleigh.abs();
        estimate = rayleigh;
        if converged {
            return Ok(estimate.max(0.0));
        }
        x = y;
        x.col_mut(0).iter_mut().for_each(|v| *v /= ny);
    }
    Err(Error::NonConvergence { estimate: libm::sqrt(estimate.max(0.0)), iterations: cap })
}
