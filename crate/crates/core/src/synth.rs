//! Dense test matrices `A = [V W] Λ [V W]ᵀ` with a geometric spectrum and a
//! Haar-random leading subspace.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, so an instance
//! is reproducible bit for bit on every platform.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::{verify_assumption1_spectral, AssumptionReport, GroundTruth};
use crate::matcore::{coherence, dot, norm2, project_out_prefix, thin_qr, DenseSym, Mat, Spectrum};
use crate::{Error, Result};

/// Largest `n` assembled densely.
pub const DENSE_CAP: usize = 8000;

/// Fresh identity-column subsets tried before giving up.
pub const MAX_RETRIES: usize = 10;

/// A tail column whose norm falls below this after projection counts as
/// a breakdown.
const BREAKDOWN_TOL: f64 = 1e-8;

const BLOCK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailStyle {
    /// Random identity columns orthogonalized against `V`.
    IdentityResidual,
    /// Remaining columns of a full Haar sample.
    FullHaar,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub r: usize,
    pub rho: f64,
    pub seed: u64,
    pub tail_style: TailStyle,
}

impl SyntheticSpec {
    pub fn new(n: usize, r: usize, rho: f64, seed: u64) -> Self {
        Self { n, r, rho, seed, tail_style: TailStyle::IdentityResidual }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config("rho must lie in (0, 1)"));
        }
        if self.r == 0 || self.r >= self.n {
            return Err(Error::Config("need 1 <= r < n"));
        }
        if self.n > DENSE_CAP {
            return Err(Error::Config("n exceeds the dense assembly cap"));
        }
        Ok(())
    }

    /// `λ_i = ρ^{i-1}`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.n).map(|i| libm::pow(self.rho, i as f64)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticInstance {
    pub spec: SyntheticSpec,
    a: DenseSym,
    v: Mat,
    w: Mat,
    eigenvalues: Vec<f64>,
    mu: f64,
}

impl SyntheticInstance {
    /// Rebuilds an instance from its factors. `eigenvalues[..r]` belong to
    /// `v`, the rest to `w` in column order.
    pub fn from_parts(spec: SyntheticSpec, v: Mat, w: Mat, eigenvalues: Vec<f64>) -> Result<Self> {
        let n = spec.n;
        if v.nrows() != n || w.nrows() != n || v.ncols() != spec.r || v.ncols() + w.ncols() != n || eigenvalues.len() != n {
            return Err(Error::Dimension("factors do not match the spec"));
        }
        let basis = v.hcat(&w);
        let mut a = basis.scale_cols(&eigenvalues).matmul_tr(&basis);
        for j in 0..n {
            for i in 0..j {
                let s = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = s;
                a[(j, i)] = s;
            }
        }
        let mu = coherence(&v)?;
        Ok(Self { spec, a: DenseSym::new(a, 0.0)?, v, w, eigenvalues, mu })
    }

    pub fn a(&self) -> &Mat {
        self.a.matrix()
    }

    pub fn operator(&self) -> &DenseSym {
        &self.a
    }

    pub fn v(&self) -> &Mat {
        &self.v
    }

    /// Orthonormal tail basis, columns in eigenvalue order.
    pub fn w(&self) -> &Mat {
        &self.w
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::from_values(self.eigenvalues.clone())
    }

    pub fn coherence(&self) -> f64 {
        self.mu
    }

    /// Ground truth relative to the start block `q0`, with the full
    /// spectrum and the next eigenvector filled in.
    pub fn ground_truth(&self, q0: &Mat) -> Result<GroundTruth> {
        Ok(GroundTruth::new(self.v.clone(), self.spectrum(), q0)?.with_next_vector(self.w.col(0)))
    }

    /// Assumption-1 ratios through the known tail eigenbasis.
    pub fn assumption_constant(&self, t_max: usize) -> Result<AssumptionReport> {
        verify_assumption1_spectral(&self.v, &self.w, &self.eigenvalues[self.spec.r..], t_max)
    }
}

/// `n x k` block with Haar-distributed orthonormal columns: QR of a
/// Gaussian matrix with the `R` diagonal made positive.
pub fn haar_orthogonal(n: usize, k: usize, seed: u64) -> Result<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_from(&mut rng, n, k)
}

fn haar_from(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<Mat> {
    if k == 0 || k > n {
        return Err(Error::Dimension("need 1 <= k <= n"));
    }
    let g = Mat::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(thin_qr(&g)?.0)
}

pub fn make_instance(spec: SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let (n, r) = (spec.n, spec.r);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (v, w) = match spec.tail_style {
        TailStyle::FullHaar => {
            let full = haar_from(&mut rng, n, n)?;
            (full.leading_cols(r), full.select_cols(&(r..n).collect::<Vec<_>>()))
        }
        TailStyle::IdentityResidual => {
            let v = haar_from(&mut rng, n, r)?;
            let mut attempt = 0;
            loop {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut rng);
                idx.truncate(n - r);
                match identity_residual(&v, &idx) {
                    Ok(w) => break (v, w),
                    Err(Error::OrthogonalizationBreakdown) if attempt + 1 < MAX_RETRIES => attempt += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    };
    SyntheticInstance::from_parts(spec, v, w, spec.eigenvalues())
}

/// Identity columns `idx`, orthogonalized against `v` and each other with
/// two passes of block Gram-Schmidt.
fn identity_residual(v: &Mat, idx: &[usize]) -> Result<Mat> {
    let (n, r) = (v.nrows(), v.ncols());
    let mut basis = Mat::zeros(n, r + idx.len());
    basis.as_mut_slice()[..n * r].copy_from_slice(v.as_slice());
    for (k, &i) in idx.iter().enumerate() {
        basis[(i, r + k)] = 1.0;
    }
    let mut start = r;
    while start < basis.ncols() {
        let width = BLOCK.min(basis.ncols() - start);
        let cols: Vec<usize> = (start..start + width).collect();
        let mut x = basis.select_cols(&cols);
        for pass in 0..2 {
            project_out_prefix(&basis, start, &mut x);
            for j in 0..width {
                for i in 0..j {
                    let c = dot(x.col(i), x.col(j));
                    let (head, tail) = x.as_mut_slice().split_at_mut(j * n);
                    let xi = &head[i * n..(i + 1) * n];
                    tail[..n].iter_mut().zip(xi).for_each(|(y, s)| *y -= c * s);
                }
                let nrm = norm2(x.col(j));
                if pass == 0 && !(nrm > BREAKDOWN_TOL) {
                    return Err(Error::OrthogonalizationBreakdown);
                }
                x.col_mut(j).iter_mut().for_each(|y| *y /= nrm);
            }
        }
        basis.as_mut_slice()[start * n..(start + width) * n].copy_from_slice(x.as_slice());
        start += width;
    }
    Ok(basis.select_cols(&(r..basis.ncols()).collect::<Vec<_>>()))
}
