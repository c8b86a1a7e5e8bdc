//! Thin Householder QR with a nonnegative `R` diagonal.

use alloc::vec::Vec;

use super::dense::Mat;
use crate::error::{Error, Result};

/// `|R_jj|` below this fraction of `‖M‖_F` counts as rank deficiency.
pub const RANK_TOL: f64 = 1e-12;

/// Thin QR of an `n x r` matrix (`n >= r`): `Q` is `n x r` with orthonormal
/// columns and `R` is `r x r` upper triangular with `R_jj >= 0`.
pub fn thin_qr(m: &Mat) -> Result<(Mat, Mat)> {
    let (n, r) = (m.nrows(), m.ncols());
    if r == 0 || n < r {
        return Err(Error::Dimension("thin_qr needs n >= r >= 1"));
    }
    let scale = m.frobenius_norm();
    let mut a = m.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(r);

    for k in 0..r {
        let x = &a.col(k)[k..];
        let xnorm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v: Vec<f64> = x.to_vec();
        v[0] -= alpha;
        let vnorm = libm::sqrt(v.iter().map(|t| t * t).sum::<f64>());
        if vnorm > 0.0 {
            v.iter_mut().for_each(|t| *t /= vnorm);
            for j in k..r {
                let col = &mut a.col_mut(j)[k..];
                let h: f64 = 2.0 * col.iter().zip(&v).map(|(c, w)| c * w).sum::<f64>();
                col.iter_mut().zip(&v).for_each(|(c, w)| *c -= h * w);
            }
        }
        reflectors.push(v);
    }

    let mut rmat = Mat::from_fn(r, r, |i, j| if i <= j { a[(i, j)] } else { 0.0 });
    for j in 0..r {
        let d = rmat[(j, j)].abs();
        if !(d > RANK_TOL * scale) {
            return Err(Error::Rank { column: j, magnitude: d });
        }
    }

    // Q = H_0 H_1 ... H_{r-1} applied to the leading identity columns.
    let mut q = Mat::eye_cols(n, r);
    for k in (0..r).rev() {
        let v = &reflectors[k];
        for j in 0..r {
            let col = &mut q.col_mut(j)[k..];
            let h: f64 = 2.0 * col.iter().zip(v).map(|(c, w)| c * w).sum::<f64>();
            if h != 0.0 {
                col.iter_mut().zip(v).for_each(|(c, w)| *c -= h * w);
            }
        }
    }

    for j in 0..r {
        if rmat[(j, j)] < 0.0 {
            for c in j..r {
                rmat[(j, c)] = -rmat[(j, c)];
            }
            q.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((q, rmat))
}
