//! One-sided (Hestenes) Jacobi SVD.

use alloc::vec::Vec;

use super::dense::{dot, norm2, Mat};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `M = U diag(sigma) Wᵀ` with `sigma` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub w: Mat,
}

/// SVD of an `m x n` matrix with `m >= n`. For square input `U` and `W` are
/// both orthogonal; columns of `U` belonging to zero singular values are
/// completed to an orthonormal set.
pub fn small_svd(m: &Mat) -> Result<Svd> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows < cols {
        return Err(Error::Dimension("small_svd needs rows >= cols"));
    }
    let mut a = m.clone();
    let mut w = Mat::identity(cols);
    let tol = rows as f64 * f64::EPSILON;
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for q in 1..cols {
            for p in 0..q {
                let alpha = dot(a.col(p), a.col(p));
                let beta = dot(a.col(q), a.col(q));
                let gamma = dot(a.col(p), a.col(q));
                if gamma == 0.0 || gamma.abs() <= tol * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_cols(&mut a, p, q, c, s);
                rotate_cols(&mut w, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NonConvergence { estimate: a.frobenius_norm(), iterations: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..cols).map(|j| norm2(a.col(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let w = w.select_cols(&order);
    let mut u = a.select_cols(&order);
    let tiny = sigma.first().copied().unwrap_or(0.0) * f64::EPSILON * rows as f64;
    let mut needs_completion = Vec::new();
    for (j, &s) in sigma.iter().enumerate() {
        if s > tiny && s > 0.0 {
            u.col_mut(j).iter_mut().for_each(|x| *x /= s);
        } else {
            needs_completion.push(j);
        }
    }
    for j in needs_completion {
        complete_column(&mut u, j);
    }
    Ok(Svd { u, sigma, w })
}

fn rotate_cols(m: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let x = m[(k, p)];
        let y = m[(k, q)];
        m[(k, p)] = c * x - s * y;
        m[(k, q)] = s * x + c * y;
    }
}

/// Replaces column `j` by a unit vector orthogonal to every other column
/// that has already been normalized.
fn complete_column(u: &mut Mat, j: usize) {
    let rows = u.nrows();
    let others: Vec<usize> = (0..u.ncols())
        .filter(|&k| k != j && (norm2(u.col(k)) - 1.0).abs() < 1e-8)
        .collect();
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for e in 0..rows {
        let mut x = alloc::vec![0.0; rows];
        x[e] = 1.0;
        for _ in 0..2 {
            for &k in &others {
                let h = dot(u.col(k), &x);
                x.iter_mut().zip(u.col(k)).for_each(|(xi, uk)| *xi -= h * uk);
            }
        }
        let nx = norm2(&x);
        if nx > best_norm {
            best_norm = nx;
            best = Some(x);
        }
        if nx > 0.5 {
            break;
        }
    }
    if let Some(x) = best {
        u.col_mut(j).iter_mut().zip(&x).for_each(|(dst, v)| *dst = v / best_norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        let s = small_svd(&Mat::from_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(s.sigma, [2.0, 1.0]);
    }

    #[test]
    fn rank_deficient_square_keeps_u_orthogonal() {
        let m = Mat::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 0.0]);
        let s = small_svd(&m).unwrap();
        assert!(s.u.orthonormality_defect() < 1e-12);
        assert!(s.w.orthonormality_defect() < 1e-12);
        let back = s.u.scale_cols(&s.sigma).matmul_tr(&s.w);
        assert!(back.sub(&m).max_abs() < 1e-12);
        assert!(s.sigma[1] < 1e-12);
    }

    #[test]
    fn wide_input_rejected() {
        assert!(small_svd(&Mat::zeros(2, 3)).is_err());
    }
}
