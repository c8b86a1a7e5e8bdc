//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use alloc::vec::Vec;

use super::dense::Mat;
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a symmetric matrix. Only the lower triangle's
/// mirror image is assumed to match; the input is symmetrized first.
pub fn sym_eigen(a: &Mat) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::Dimension("sym_eigen needs a square matrix"));
    }
    let n = a.nrows();
    let mut m = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Mat::identity(n);
    let scale = m.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|j| (0..j).map(move |i| (i, j)))
                .map(|(i, j)| m[(i, j)] * m[(i, j)])
                .sum();
            if libm::sqrt(off) <= f64::EPSILON * scale {
                converged = true;
                break;
            }
            for q in 1..n {
                for p in 0..q {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
        if !converged {
            return Err(Error::NonConvergence { estimate: scale, iterations: MAX_SWEEPS });
        }
    }
    let values: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    Ok(Spectrum::new(values, Some(v)))
}

fn rotate(m: &mut Mat, v: &mut Mat, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
