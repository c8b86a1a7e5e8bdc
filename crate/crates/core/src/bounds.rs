//! Convergence-rate formulas, perturbation bounds, and the empirical checks
//! that accompany them.

use alloc::vec;
use alloc::vec::Vec;

use crate::matcore::{
    coherence, dist_2, dist_2inf_proxy, operator_norm, Deflated, Mat, Spectrum, SymOperator,
};
use crate::{Error, Result};

/// Default horizon for [`verify_assumption1`].
pub const DEFAULT_T_MAX: usize = 500;

/// Terms of a spectral power sum whose weight falls below this are dropped.
pub const SPECTRAL_TRUNCATION: f64 = 1e-18;

/// Exact spectral data for an instance plus the starting-point statistics
/// every rate needs.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub n: usize,
    pub r: usize,
    pub v: Mat,
    /// Leading eigenvalues in descending order; at least `r + 1` of them.
    pub spectrum: Spectrum,
    pub mu: f64,
    pub d0: f64,
    pub dist2inf0: f64,
    pub c_assumption: f64,
    /// `‖v_{r+1} v_{r+1}ᵀ‖_∞`, when the next eigenvector is known.
    pub next_vector_inf: Option<f64>,
    /// Smallest eigenvalue `λ_n`, when known.
    pub lambda_min: Option<f64>,
}

impl GroundTruth {
    pub fn new(v: Mat, spectrum: Spectrum, q0: &Mat) -> Result<Self> {
        let (n, r) = (v.nrows(), v.ncols());
        if spectrum.len() < r + 1 {
            return Err(Error::InsufficientSpectrum { needed: r + 1, available: spectrum.len() });
        }
        let mu = coherence(&v)?;
        let d0 = dist_2(q0, &v)?;
        let dist2inf0 = dist_2inf_proxy(q0, &v)?;
        let lambda_min = if spectrum.len() == n { spectrum.values().last().copied() } else { None };
        Ok(Self { n, r, v, spectrum, mu, d0, dist2inf0, c_assumption: 1.0, next_vector_inf: None, lambda_min })
    }

    pub fn with_assumption_constant(mut self, c: f64) -> Self {
        self.c_assumption = c;
        self
    }

    /// Records `‖v v ᵀ‖_∞ = ‖v‖_∞ ‖v‖_1` for the (r+1)-th eigenvector.
    pub fn with_next_vector(mut self, v_next: &[f64]) -> Self {
        let max = v_next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let sum: f64 = v_next.iter().map(|x| x.abs()).sum();
        self.next_vector_inf = Some(max * sum);
        self
    }

    pub fn with_smallest_eigenvalue(mut self, lambda_n: f64) -> Self {
        self.lambda_min = Some(lambda_n);
        self
    }

    fn lambda(&self, i: usize) -> Result<f64> {
        self.spectrum
            .lambda(i)
            .ok_or(Error::InsufficientSpectrum { needed: i, available: self.spectrum.len() })
    }

    fn cos0(&self) -> Result<f64> {
        if !(self.d0 < 1.0) {
            return Err(Error::DegenerateStart);
        }
        Ok(libm::sqrt(1.0 - self.d0 * self.d0))
    }

    pub fn tan_theta0(&self) -> Result<f64> {
        Ok(self.d0 / self.cos0()?)
    }

    fn ratio_pow(&self, k: usize, t: usize) -> Result<f64> {
        Ok(powu(self.lambda(k)? / self.lambda(self.r)?, t))
    }
}

fn powu(x: f64, t: usize) -> f64 {
    libm::pow(x, t as f64)
}

pub fn rate_naive(gt: &GroundTruth, t: usize) -> Result<f64> {
    Ok(gt.ratio_pow(gt.r + 1, t)? * gt.tan_theta0()?)
}

pub fn rate1(gt: &GroundTruth, t: usize) -> Result<f64> {
    Ok(gt.ratio_pow(gt.r + 1, t)? * gt.dist2inf0 / gt.cos0()?)
}

pub fn rate2(gt: &GroundTruth, t: usize) -> Result<f64> {
    let cos0 = gt.cos0()?;
    let tan0 = gt.d0 / cos0;
    let vnext = gt
        .next_vector_inf
        .ok_or(Error::InsufficientSpectrum { needed: gt.r + 1, available: gt.r })?;
    let (n, r) = (gt.n as f64, gt.r as f64);
    let bracket = gt.mu * libm::sqrt(2.0 * r / n) * tan0 + vnext / cos0 * gt.dist2inf0;
    Ok(gt.ratio_pow(gt.r + 1, t)? * bracket + gt.ratio_pow(gt.r + 2, t)? * tan0)
}

pub fn rate3(gt: &GroundTruth, t: usize) -> Result<f64> {
    let cos0 = gt.cos0()?;
    let tan0 = gt.d0 / cos0;
    let (n, r) = (gt.n as f64, gt.r as f64);
    let bracket = gt.mu * libm::sqrt(2.0 * r / n) * tan0
        + gt.c_assumption * (1.0 + gt.mu * libm::sqrt(r)) / cos0 * gt.dist2inf0;
    Ok(gt.ratio_pow(gt.r + 1, t)? * bracket)
}

pub fn rate_noassumption(gt: &GroundTruth, t: usize) -> Result<f64> {
    let cos0 = gt.cos0()?;
    let tan0 = gt.d0 / cos0;
    let (n, r) = (gt.n as f64, gt.r as f64);
    let lambda_n = gt
        .lambda_min
        .ok_or(Error::InsufficientSpectrum { needed: gt.n, available: gt.spectrum.len() })?;
    let q1 = gt.ratio_pow(gt.r + 1, t)?;
    let q2 = gt.ratio_pow(gt.r + 2, t)?;
    let qn = powu(lambda_n / gt.lambda(gt.r)?, t);
    let spread = (q1 - q2).max(q2 - qn);
    Ok(3.0 * (1.0 + gt.mu * libm::sqrt(r)) / cos0 * q2 * gt.dist2inf0
        + gt.mu * libm::sqrt(r / n) * q1 * tan0
        + spread * tan0)
}

/// Per-iteration rates alongside the measured distances.
#[derive(Clone, Debug, Default)]
pub struct RateTrace {
    pub t: Vec<usize>,
    pub rate1: Vec<f64>,
    pub rate2: Vec<f64>,
    pub rate3: Vec<f64>,
    pub rate_naive: Vec<f64>,
    pub rate_noassumption: Vec<f64>,
    pub measured_dist2inf: Vec<f64>,
    pub measured_dist2: Vec<f64>,
}

impl RateTrace {
    /// Appends iteration `t`. Rates that need data the ground truth lacks
    /// are recorded as NaN.
    pub fn push(&mut self, gt: &GroundTruth, t: usize, q: &Mat) -> Result<()> {
        let dist2inf = dist_2inf_proxy(q, &gt.v)?;
        let dist2 = dist_2(q, &gt.v)?;
        self.t.push(t);
        self.rate1.push(rate1(gt, t)?);
        self.rate3.push(rate3(gt, t)?);
        self.rate_naive.push(rate_naive(gt, t)?);
        self.rate2.push(optional(rate2(gt, t))?);
        self.rate_noassumption.push(optional(rate_noassumption(gt, t))?);
        self.measured_dist2inf.push(dist2inf);
        self.measured_dist2.push(dist2);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn optional(x: Result<f64>) -> Result<f64> {
    match x {
        Err(Error::InsufficientSpectrum { .. }) => Ok(f64::NAN),
        other => other,
    }
}

/// Outcome of comparing a measured proxy distance against a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCheck {
    Holds,
    /// Exceeds the bound but by at most a factor `√r`, the slack between
    /// the proxy and the true infimum.
    ProxySlack,
    Violated,
}

pub fn check_bound(measured: f64, bound: f64, slack: f64, r: usize) -> BoundCheck {
    if measured <= bound * slack {
        BoundCheck::Holds
    } else if measured <= bound * slack * libm::sqrt(r as f64) {
        BoundCheck::ProxySlack
    } else {
        BoundCheck::Violated
    }
}

fn positive_gaps(lambda_gap: f64, gap: f64) -> Result<()> {
    if !(lambda_gap > 0.0) {
        return Err(Error::Gap(lambda_gap));
    }
    if !(gap > 0.0) {
        return Err(Error::Gap(gap));
    }
    Ok(())
}

/// Perturbation bound expressed through coherence.
pub fn corollary_bound(mu: f64, r: usize, n: usize, eps1: f64, eps2: f64, lambda_gap: f64, gap: f64) -> Result<f64> {
    positive_gaps(lambda_gap, gap)?;
    let (r, n) = (r as f64, n as f64);
    let q = eps1 / lambda_gap;
    Ok(8.0 * mu * libm::sqrt(r / n) * q * q + 2.0 * (1.0 + mu * libm::sqrt(r)) / gap * (eps2 + 2.0 * eps1 * eps2 / lambda_gap))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    /// False when `‖E‖₂ > gap / 5`; the value is still reported.
    pub precondition_met: bool,
}

/// Perturbation bound expressed through the norms of V, V⊥ and E.
pub fn proposition32_bound(
    v2inf: f64,
    vperp_inf: f64,
    e2: f64,
    e2inf: f64,
    lambda_gap: f64,
    gap: f64,
) -> Result<BoundValue> {
    positive_gaps(lambda_gap, gap)?;
    let q = e2 / lambda_gap;
    let value = 8.0 * v2inf * q * q + 2.0 * vperp_inf * (e2inf / gap) * (1.0 + 2.0 * q);
    Ok(BoundValue { value, precondition_met: e2 <= gap / 5.0 })
}

/// Measured Assumption-1 ratios.
#[derive(Clone, Debug)]
pub struct AssumptionReport {
    /// Supremum of `ratios`.
    pub c: f64,
    /// `ratios[t - 1]` is the ratio at power `t`.
    pub ratios: Vec<f64>,
    /// `‖I − VVᵀ‖_∞`.
    pub denominator: f64,
    /// Upper bound on the error introduced by dropping small spectral terms.
    pub truncation_error: f64,
}

impl AssumptionReport {
    fn from_numerators(numerators: Vec<f64>, denominator: f64, truncation_error: f64) -> Self {
        let ratios: Vec<f64> = numerators.into_iter().map(|x| x / denominator).collect();
        let c = ratios.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        Self { c, ratios, denominator, truncation_error }
    }
}

/// `‖I − VVᵀ‖_∞` without forming the n×n projector.
pub fn complement_inf_norm(v: &Mat) -> f64 {
    let (n, r) = (v.nrows(), v.ncols());
    let vt = v.transpose();
    let mut best = 0.0f64;
    let mut row = vec![0.0; r];
    for i in 0..n {
        for (k, x) in row.iter_mut().enumerate() {
            *x = v[(i, k)];
        }
        let mut sum = 0.0;
        for j in 0..n {
            let pj = vt.col(j);
            let mut dot = 0.0;
            for k in 0..r {
                dot += row[k] * pj[k];
            }
            let entry = if i == j { 1.0 - dot } else { -dot };
            sum += entry.abs();
        }
        best = best.max(sum);
    }
    best
}

fn check_assumption_inputs(n: usize, v: &Mat, leading: &[f64], lambda_next: f64, t_max: usize) -> Result<()> {
    if v.nrows() != n || v.ncols() != leading.len() || v.ncols() == 0 {
        return Err(Error::Dimension("basis does not match operator and spectrum"));
    }
    if t_max == 0 {
        return Err(Error::Config("t_max must be positive"));
    }
    if !(lambda_next > 0.0) {
        return Err(Error::UnsupportedSpectrum(lambda_next));
    }
    Ok(())
}

/// Column block width used by [`verify_assumption1`].
const ASSUMPTION_BLOCK: usize = 16;

/// Measures `sup_{t ≤ t_max} ‖A^t − VΛ^tVᵀ‖_∞ / (λ_{r+1}^t ‖I − VVᵀ‖_∞)`.
///
/// Works on column blocks of the identity, applying
/// `M = (A − VΛVᵀ)/λ_{r+1}` repeatedly. By symmetry the ∞-norm is the
/// largest column absolute sum.
pub fn verify_assumption1<O: SymOperator + ?Sized>(
    a: &O,
    v: &Mat,
    leading: &[f64],
    lambda_next: f64,
    t_max: usize,
) -> Result<AssumptionReport> {
    let n = a.dim();
    check_assumption_inputs(n, v, leading, lambda_next, t_max)?;
    let r = v.ncols();
    let scaled: Vec<f64> = leading.iter().map(|l| l / lambda_next).collect();
    let inv = 1.0 / lambda_next;
    // Row i of V is column i of Vᵀ.
    let vt = v.transpose();
    let mut numerators = vec![0.0f64; t_max];
    let mut x = vec![0.0; n * ASSUMPTION_BLOCK];
    let mut y = vec![0.0; n * ASSUMPTION_BLOCK];
    let mut coeffs = vec![0.0; r * ASSUMPTION_BLOCK];
    let mut sums = [0.0; ASSUMPTION_BLOCK];
    let mut start = 0;
    while start < n {
        let k = ASSUMPTION_BLOCK.min(n - start);
        let (mut x, mut y) = (&mut x[..n * k], &mut y[..n * k]);
        let (coeffs, sums) = (&mut coeffs[..r * k], &mut sums[..k]);
        x.fill(0.0);
        for j in 0..k {
            x[(start + j) * k + j] = 1.0;
        }
        for slot in numerators.iter_mut() {
            // coeffs = (Λ/λ_{r+1}) Vᵀ X, stored row-major.
            coeffs.fill(0.0);
            for (i, xi) in x.chunks_exact(k).enumerate() {
                for (l, &vil) in vt.col(i).iter().enumerate() {
                    coeffs[l * k..(l + 1) * k].iter_mut().zip(xi).for_each(|(c, s)| *c += vil * s);
                }
            }
            for (l, &w) in scaled.iter().enumerate() {
                coeffs[l * k..(l + 1) * k].iter_mut().for_each(|c| *c *= w);
            }
            a.apply_row_major(x, k, y);
            sums.fill(0.0);
            for (i, yi) in y.chunks_exact_mut(k).enumerate() {
                yi.iter_mut().for_each(|e| *e *= inv);
                for (l, &vil) in vt.col(i).iter().enumerate() {
                    yi.iter_mut().zip(&coeffs[l * k..(l + 1) * k]).for_each(|(e, c)| *e -= vil * c);
                }
                sums.iter_mut().zip(yi.iter()).for_each(|(s, e)| *s += e.abs());
            }
            *slot = sums.iter().fold(*slot, |m, &s| m.max(s));
            core::mem::swap(&mut x, &mut y);
        }
        start += k;
    }
    Ok(AssumptionReport::from_numerators(numerators, complement_inf_norm(v), 0.0))
}

/// Assumption-1 ratios from a known tail eigenbasis `W` with eigenvalues
/// `tail`, using `A^t − VΛ^tVᵀ = W Λ⊥^t Wᵀ`.
pub fn verify_assumption1_spectral(v: &Mat, w: &Mat, tail: &[f64], t_max: usize) -> Result<AssumptionReport> {
    let n = v.nrows();
    if w.nrows() != n || w.ncols() != tail.len() || tail.is_empty() {
        return Err(Error::Dimension("tail basis does not match tail spectrum"));
    }
    let lambda_next = tail.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if !(lambda_next > 0.0) {
        return Err(Error::UnsupportedSpectrum(lambda_next));
    }
    if t_max == 0 {
        return Err(Error::Config("t_max must be positive"));
    }
    let mut order: Vec<usize> = (0..tail.len()).collect();
    let ratio: Vec<f64> = tail.iter().map(|l| l / lambda_next).collect();
    order.sort_by(|&a, &b| ratio[b].abs().total_cmp(&ratio[a].abs()).then(a.cmp(&b)));
    let sorted = w.select_cols(&order);
    let sorted_ratio: Vec<f64> = order.iter().map(|&k| ratio[k]).collect();
    let mut numerators = Vec::with_capacity(t_max);
    let mut worst_dropped = 0.0f64;
    let mut block = Mat::zeros(n, n);
    for t in 1..=t_max {
        let kept = sorted_ratio.iter().take_while(|q| powu(q.abs(), t) >= SPECTRAL_TRUNCATION).count().max(1);
        let dropped = (tail.len() - kept) as f64 * SPECTRAL_TRUNCATION * libm::sqrt(n as f64);
        worst_dropped = worst_dropped.max(dropped);
        let head = sorted.leading_cols(kept);
        let weights: Vec<f64> = sorted_ratio[..kept].iter().map(|&q| powu(q, t)).collect();
        block.as_mut_slice().iter_mut().for_each(|x| *x = 0.0);
        block.add_matmul_tr(1.0, &head.scale_cols(&weights), &head);
        let mut best = 0.0f64;
        for j in 0..n {
            best = best.max(block.col(j).iter().map(|e| e.abs()).sum());
        }
        numerators.push(best);
    }
    let denominator = complement_inf_norm(v);
    Ok(AssumptionReport::from_numerators(numerators, denominator, worst_dropped / denominator))
}

/// `‖(I − QQᵀ) A (I − QQᵀ)‖₂` by power iteration on the deflated operator.
pub fn localization_check<O: SymOperator + ?Sized>(a: &O, q: &Mat) -> Result<f64> {
    let deflated = Deflated::new(a, q.clone())?;
    operator_norm(&deflated, 1e-12, 20 * a.dim().max(1000))
}

/// Threshold `|λ₁| ε + |λ_{r+1}|` the localization value is compared with.
pub fn localization_threshold(lambda1: f64, lambda_next: f64, eps: f64) -> f64 {
    lambda1.abs() * eps + lambda_next.abs()
}
