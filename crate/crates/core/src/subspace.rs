//! Subspace iteration with Rayleigh-Ritz extraction and two stopping rules:
//! the classical per-column `ℓ2` residual test and the row-wise
//! (`2 -> inf`) residual estimate.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{norm2, row_norms, spectral_norm, sym_eigen, thin_qr, two_to_inf_norm, Mat, Spectrum, SymOperator};

/// Orthonormality tolerance for start blocks.
pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopMode {
    /// Stop once every leading Ritz pair has `‖A v - λ v‖ <= ε |λ|`.
    NaiveL2,
    /// Stop once the `2 -> inf` residual estimate drops to `ε`.
    TwoInf,
    /// Keep going until both rules have fired.
    Both,
}

/// Where the eigengap in the `2 -> inf` estimate comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapSource {
    /// `λ̂_r - λ̂_{r+1}` from the augmented Ritz values.
    Ritz,
    /// Caller-supplied `gap` and `λ_r - λ_{r+1}`.
    Fixed { gap: f64, lambda_gap: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingConfig {
    pub epsilon: f64,
    pub mode: StopMode,
    /// Width of the target subspace.
    pub r: usize,
    /// Extra columns carried along to estimate `λ_{r+1}`.
    pub p: usize,
    pub max_iters: usize,
    /// Gap estimates at or below this are treated as unusable.
    pub gap_floor: f64,
    /// `gap = sep_fraction * (λ̂_r - λ̂_{r+1})`.
    pub sep_fraction: f64,
    pub gap_source: GapSource,
    /// Flip each Ritz vector so its largest-magnitude entry is positive.
    pub sign_fix: bool,
}

impl StoppingConfig {
    pub fn new(r: usize, epsilon: f64, mode: StopMode) -> Self {
        StoppingConfig {
            epsilon,
            mode,
            r,
            p: 3,
            max_iters: 10_000,
            gap_floor: 0.0,
            sep_fraction: 1.0,
            gap_source: GapSource::Ritz,
            sign_fix: false,
        }
    }

    pub fn width(&self) -> usize {
        self.r + self.p
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive"));
        }
        if self.r == 0 {
            return Err(Error::Config("r must be at least 1"));
        }
        if self.p == 0 && self.gap_source == GapSource::Ritz {
            return Err(Error::Config("Ritz gap estimation needs p >= 1"));
        }
        if !(self.sep_fraction > 0.0) {
            return Err(Error::Config("sep_fraction must be positive"));
        }
        if let GapSource::Fixed { gap, lambda_gap } = self.gap_source {
            if !(gap > 0.0 && lambda_gap > 0.0) {
                return Err(Error::Gap(gap.min(lambda_gap)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct IterationState {
    pub t: usize,
    /// Current orthonormal block, width `r + p`.
    pub q: Mat,
    /// Ritz values of `QᵀAQ` once a Rayleigh-Ritz step has run.
    pub ritz: Option<Spectrum>,
    /// Triangular factor of the last QR step.
    pub r_factor: Mat,
}

impl IterationState {
    pub fn start(q0: Mat) -> Self {
        let w = q0.ncols();
        IterationState { t: 0, q: q0, ritz: None, r_factor: Mat::identity(w) }
    }
}

/// One row of the convergence trace.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub t: usize,
    /// `‖A v̂_j - λ̂_j v̂_j‖_2` for the leading `r` Ritz pairs.
    pub res2_per_column: Vec<f64>,
    /// The `2 -> inf` residual estimate; infinite while no usable gap exists.
    pub res2inf: f64,
    pub e_norm2: f64,
    pub e_norm2inf: f64,
    /// `‖(I - QQᵀ) E‖_{2->inf}`.
    pub e_deflated_norm2inf: f64,
    pub q_norm2inf: f64,
    pub gap_est: f64,
    pub lambda_gap_est: f64,
    pub ritz_values: Vec<f64>,
    /// A leading Ritz value was `<= 0`; the naive rule then uses `|λ̂_j|`.
    pub nonpositive_ritz: bool,
    pub naive_met: bool,
    pub two_inf_met: bool,
}

impl ResidualReport {
    pub fn res2_max(&self) -> f64 {
        self.res2_per_column.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: IterationState,
    pub trace: Vec<ResidualReport>,
    pub t_comp: Option<usize>,
    pub t_naive: Option<usize>,
    pub t_stop: usize,
    /// `max_iters` ran out before the configured rule fired.
    pub exhausted: bool,
    r: usize,
}

impl RunOutcome {
    /// The leading `r` Ritz vectors.
    pub fn ritz_vectors(&self) -> Mat {
        self.state.q.leading_cols(self.r)
    }

    pub fn ritz_values(&self) -> Vec<f64> {
        self.trace.last().map(|rep| rep.ritz_values[..self.r].to_vec()).unwrap_or_default()
    }
}

/// `Q_t R_t = qr(A Q_{t-1})`.
pub fn iterate_step<O: SymOperator + ?Sized>(a: &O, state: &IterationState) -> Result<IterationState> {
    if state.q.nrows() != a.dim() {
        return Err(Error::Dimension("iterate has the wrong number of rows"));
    }
    let (q, r_factor) = thin_qr(&a.apply(&state.q))?;
    Ok(IterationState { t: state.t + 1, q, ritz: None, r_factor })
}

/// Ritz values (descending) of `QᵀAQ` and `Q` rotated onto the Ritz vectors.
pub fn rayleigh_ritz<O: SymOperator + ?Sized>(a: &O, q: &Mat) -> Result<(Spectrum, Mat)> {
    if q.nrows() != a.dim() {
        return Err(Error::Dimension("basis has the wrong number of rows"));
    }
    let aq = a.apply(q);
    let (spec, rotated, _) = ritz_from_product(q, &aq)?;
    Ok((spec, rotated))
}

/// Rayleigh-Ritz given `AQ`; returns the rotated `Q` and `AQ`.
fn ritz_from_product(q: &Mat, aq: &Mat) -> Result<(Spectrum, Mat, Mat)> {
    let h = q.tr_matmul(aq);
    let eig = sym_eigen(&h)?;
    let (values, y) = eig.into_parts();
    let y = y.expect("sym_eigen returns eigenvectors");
    Ok((Spectrum::from_values(values), q.matmul(&y), aq.matmul(&y)))
}

/// `E = AQ - Q diag(s)`.
pub fn residual_block<O: SymOperator + ?Sized>(a: &O, q: &Mat, s: &[f64]) -> Result<Mat> {
    if q.ncols() != s.len() || q.nrows() != a.dim() {
        return Err(Error::Dimension("residual_block: widths disagree"));
    }
    Ok(residual_from_product(q, &a.apply(q), s))
}

fn residual_from_product(q: &Mat, aq: &Mat, s: &[f64]) -> Mat {
    let mut e = aq.clone();
    e.axpy(-1.0, &q.scale_cols(s));
    e
}

/// The `2 -> inf` residual estimate from its ingredients:
/// `8 ‖Q‖_{2->inf} (‖E‖_2 / δ)^2 + 2 ‖(I - QQᵀ)E‖_{2->inf} / gap * (1 + 2 ‖E‖_2 / δ)`
/// with `δ = λ_r - λ_{r+1}`.
pub fn two_inf_residual(q_norm2inf: f64, e_norm2: f64, e_deflated_norm2inf: f64, gap: f64, lambda_gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::Gap(gap));
    }
    if !(lambda_gap > 0.0) {
        return Err(Error::Gap(lambda_gap));
    }
    let ratio = e_norm2 / lambda_gap;
    Ok(8.0 * q_norm2inf * ratio * ratio + 2.0 * e_deflated_norm2inf / gap * (1.0 + 2.0 * ratio))
}

/// [`two_inf_residual`] evaluated for `Q` and the diagonal `S`.
pub fn res_two_inf<O: SymOperator + ?Sized>(a: &O, q: &Mat, s: &[f64], gap: f64, lambda_gap: f64) -> Result<f64> {
    let e = residual_block(a, q, s)?;
    let parts = ResidualParts::new(q, &e)?;
    two_inf_residual(parts.q_norm2inf, parts.e_norm2, parts.e_deflated_norm2inf, gap, lambda_gap)
}

struct ResidualParts {
    per_column: Vec<f64>,
    q_norm2inf: f64,
    e_norm2: f64,
    e_norm2inf: f64,
    e_deflated_norm2inf: f64,
}

impl ResidualParts {
    fn new(q: &Mat, e: &Mat) -> Result<Self> {
        let per_column = (0..e.ncols()).map(|j| norm2(e.col(j))).collect();
        let mut deflated = e.clone();
        deflated.axpy(-1.0, &q.matmul(&q.tr_matmul(e)));
        Ok(ResidualParts {
            per_column,
            q_norm2inf: two_to_inf_norm(q)?,
            e_norm2: spectral_norm(e, 1e-12)?,
            e_norm2inf: row_norms(e).into_iter().fold(0.0, f64::max),
            e_deflated_norm2inf: row_norms(&deflated).into_iter().fold(0.0, f64::max),
        })
    }
}

/// `(gap_est, λ̂_r - λ̂_{r+1})` from descending Ritz values.
pub fn gap_estimate(ritz_values: &[f64], r: usize, sep_fraction: f64) -> Result<(f64, f64)> {
    if r == 0 || ritz_values.len() < r + 1 {
        return Err(Error::Config("gap estimation needs at least r + 1 Ritz values"));
    }
    let lambda_gap = ritz_values[r - 1] - ritz_values[r];
    Ok((sep_fraction * lambda_gap, lambda_gap))
}

/// Returns `v` or `-v`, whichever has a positive largest-magnitude entry.
pub fn sign_fix(v: &[f64]) -> Result<Vec<f64>> {
    let mut best: f64 = 0.0;
    for &x in v {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    if best == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(if best < 0.0 { v.iter().map(|x| -x).collect() } else { v.to_vec() })
}

const START_STREAM: u64 = 1;

/// Start block: normalized all-ones vector followed by Gaussian columns,
/// orthonormalized together.
pub fn default_start(n: usize, width: usize, seed: u64) -> Result<Mat> {
    if width == 0 || width > n {
        return Err(Error::Dimension("start block width must be in 1..=n"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Separate stream: a synthetic instance built from the same seed must
    // not share these draws.
    rng.set_stream(START_STREAM);
    let inv = 1.0 / libm::sqrt(n as f64);
    let g = Mat::from_fn(n, width, |_, j| if j == 0 { inv } else { rng.sample::<f64, _>(StandardNormal) });
    Ok(thin_qr(&g)?.0)
}

pub fn run<O: SymOperator + ?Sized>(a: &O, config: &StoppingConfig, q0: Mat) -> Result<RunOutcome> {
    run_observed(a, config, q0, |_, _| {})
}

/// Like [`run`], calling `observer` after every iteration with the
/// Ritz-rotated state and its report.
pub fn run_observed<O, F>(a: &O, config: &StoppingConfig, q0: Mat, mut observer: F) -> Result<RunOutcome>
where
    O: SymOperator + ?Sized,
    F: FnMut(&IterationState, &ResidualReport),
{
    config.validate()?;
    let n = a.dim();
    let width = config.width();
    if q0.nrows() != n || q0.ncols() != width {
        return Err(Error::Dimension("start block must be n x (r + p)"));
    }
    if width > n {
        return Err(Error::Config("r + p exceeds the dimension"));
    }
    if q0.orthonormality_defect() > ORTHO_TOL {
        return Err(Error::Config("start block is not orthonormal"));
    }

    let r = config.r;
    let mut state = IterationState::start(q0);
    let mut aq = a.apply(&state.q);
    let mut trace = Vec::new();
    let (mut t_comp, mut t_naive) = (None, None);

    for t in 1..=config.max_iters {
        let (q, r_factor) = thin_qr(&aq)?;
        let product = a.apply(&q);
        let (spec, mut q, mut product) = ritz_from_product(&q, &product)?;
        if config.sign_fix {
            for j in 0..width {
                let flip = sign_fix(q.col(j))?[0] != q.col(j)[0];
                if flip {
                    q.col_mut(j).iter_mut().for_each(|x| *x = -*x);
                    product.col_mut(j).iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        state = IterationState { t, q, ritz: Some(spec), r_factor };
        let report = report_for(&state, &product, config)?;
        aq = product;

        if report.two_inf_met && t_comp.is_none() {
            t_comp = Some(t);
        }
        if report.naive_met && t_naive.is_none() {
            t_naive = Some(t);
        }
        observer(&state, &report);
        trace.push(report);

        let done = match config.mode {
            StopMode::NaiveL2 => t_naive.is_some(),
            StopMode::TwoInf => t_comp.is_some(),
            StopMode::Both => t_naive.is_some() && t_comp.is_some(),
        };
        if done {
            return Ok(RunOutcome { state, trace, t_comp, t_naive, t_stop: t, exhausted: false, r });
        }
    }
    let t_stop = state.t;
    Ok(RunOutcome { state, trace, t_comp, t_naive, t_stop, exhausted: true, r })
}

fn report_for(state: &IterationState, aq: &Mat, config: &StoppingConfig) -> Result<ResidualReport> {
    let r = config.r;
    let ritz = state.ritz.as_ref().expect("report needs Ritz values").values().to_vec();
    let q_r = state.q.leading_cols(r);
    let e = residual_from_product(&q_r, &aq.leading_cols(r), &ritz[..r]);
    let parts = ResidualParts::new(&q_r, &e)?;

    let (gap_est, lambda_gap_est) = match config.gap_source {
        GapSource::Ritz => gap_estimate(&ritz, r, config.sep_fraction)?,
        GapSource::Fixed { gap, lambda_gap } => (gap, lambda_gap),
    };
    let usable = gap_est > config.gap_floor && lambda_gap_est > config.gap_floor;
    let res2inf = if usable {
        two_inf_residual(parts.q_norm2inf, parts.e_norm2, parts.e_deflated_norm2inf, gap_est, lambda_gap_est)?
    } else {
        f64::INFINITY
    };
    let nonpositive_ritz = ritz[..r].iter().any(|&l| l <= 0.0);
    let naive_met = parts
        .per_column
        .iter()
        .zip(&ritz[..r])
        .all(|(&res, &l)| res <= config.epsilon * l.abs());
    Ok(ResidualReport {
        t: state.t,
        res2_per_column: parts.per_column,
        res2inf,
        e_norm2: parts.e_norm2,
        e_norm2inf: parts.e_norm2inf,
        e_deflated_norm2inf: parts.e_deflated_norm2inf,
        q_norm2inf: parts.q_norm2inf,
        gap_est,
        lambda_gap_est,
        ritz_values: ritz,
        nonpositive_ritz,
        naive_met,
        two_inf_met: res2inf <= config.epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::DenseSym;
    use alloc::vec;

    fn diag_op(d: &[f64]) -> DenseSym {
        DenseSym::new(Mat::from_diag(d), 0.0).unwrap()
    }

    #[test]
    fn invariant_subspace_is_a_fixed_point() {
        let a = diag_op(&[3.0, 2.0, 1.0]);
        let s0 = IterationState::start(Mat::eye_cols(3, 2));
        let s1 = iterate_step(&a, &s0).unwrap();
        assert_eq!(s1.t, 1);
        assert_eq!(s1.q, Mat::eye_cols(3, 2));
        assert_eq!(s1.r_factor, Mat::from_diag(&[3.0, 2.0]));
    }

    #[test]
    fn identity_operator_keeps_the_block() {
        let a = diag_op(&[1.0; 4]);
        let q0 = default_start(4, 2, 3).unwrap();
        let s1 = iterate_step(&a, &IterationState::start(q0.clone())).unwrap();
        assert!(s1.q.sub(&q0).max_abs() < 1e-15);
    }

    #[test]
    fn ritz_values_of_exact_subspace() {
        let a = diag_op(&[5.0, 4.0, 3.0, 2.0]);
        let (spec, _) = rayleigh_ritz(&a, &Mat::eye_cols(4, 2)).unwrap();
        assert_eq!(spec.values(), &[5.0, 4.0]);
        let dense = Mat::from_fn(3, 3, |i, j| (i + 2 * j) as f64 + if i == j { 1.0 } else { 0.0 });
        let sym = DenseSym::new(dense.add(&dense.transpose()), 0.0).unwrap();
        let (spec, _) = rayleigh_ritz(&sym, &Mat::eye_cols(3, 1)).unwrap();
        assert_eq!(spec.values(), &[sym.matrix()[(0, 0)]]);
    }

    #[test]
    fn residual_of_single_column() {
        let m = Mat::from_row_slice(3, 3, &[2.0, 1.0, 0.5, 1.0, 3.0, 0.0, 0.5, 0.0, 1.0]);
        let a = DenseSym::new(m.clone(), 0.0).unwrap();
        let e = residual_block(&a, &Mat::eye_cols(3, 1), &[2.0]).unwrap();
        assert_eq!(e.col(0), &[0.0, 1.0, 0.5]);
        let exact = residual_block(&diag_op(&[3.0, 2.0, 1.0]), &Mat::eye_cols(3, 2), &[3.0, 2.0]).unwrap();
        assert_eq!(exact.max_abs(), 0.0);
    }

    #[test]
    fn hand_set_formula_value() {
        let v = two_inf_residual(0.1, 1e-3, 1e-4, 0.05, 0.05).unwrap();
        // 8 * 0.1 * 0.02^2 + (2e-4 / 0.05) * 1.04
        let expect = 3.2e-4 + 4.16e-3;
        assert!((v - expect).abs() < 1e-15);
        assert!(matches!(two_inf_residual(0.1, 0.0, 0.0, 0.0, 1.0), Err(Error::Gap(_))));
        assert_eq!(two_inf_residual(0.3, 0.0, 0.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gap_from_ritz_values() {
        assert_eq!(gap_estimate(&[5.0, 4.0, 3.0], 2, 1.0).unwrap(), (1.0, 1.0));
        assert_eq!(gap_estimate(&[5.0, 4.0, 3.0], 2, 0.5).unwrap(), (0.5, 1.0));
        assert!(gap_estimate(&[5.0, 4.0], 2, 1.0).is_err());
        let rho: f64 = 0.95;
        let lam: Vec<f64> = (0..6).map(|i| libm::pow(rho, i as f64)).collect();
        let (_, lg) = gap_estimate(&lam, 3, 1.0).unwrap();
        assert!((lg - rho * rho * (1.0 - rho)).abs() < 1e-15);
    }

    #[test]
    fn sign_fix_cases() {
        assert_eq!(sign_fix(&[-1.0, -2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(sign_fix(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(sign_fix(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn exact_start_stops_immediately() {
        let a = diag_op(&[4.0, 3.0, 2.0, 1.0, 0.5]);
        let mut cfg = StoppingConfig::new(2, 1e-8, StopMode::Both);
        cfg.p = 1;
        let out = run(&a, &cfg, Mat::eye_cols(5, 3)).unwrap();
        assert_eq!(out.t_stop, 1);
        assert_eq!(out.t_comp, Some(1));
        assert_eq!(out.t_naive, Some(1));
        assert!(!out.exhausted);
    }

    #[test]
    fn loose_tolerance_stops_at_first_check() {
        let a = diag_op(&[4.0, 3.0, 2.0, 1.0, 0.5, 0.25]);
        let q0 = default_start(6, 3, 11).unwrap();
        let mut cfg = StoppingConfig::new(1, 1e6, StopMode::Both);
        cfg.p = 2;
        let out = run(&a, &cfg, q0).unwrap();
        assert_eq!(out.t_stop, 1);
    }

    #[test]
    fn exhaustion_is_reported_not_raised() {
        let a = diag_op(&[1.0, 0.999, 0.5, 0.1]);
        let q0 = default_start(4, 2, 1).unwrap();
        let mut cfg = StoppingConfig::new(1, 1e-14, StopMode::NaiveL2);
        cfg.p = 1;
        cfg.max_iters = 3;
        let out = run(&a, &cfg, q0).unwrap();
        assert!(out.exhausted);
        assert_eq!(out.trace.len(), 3);
        assert_eq!(out.t_stop, 3);
    }

    #[test]
    fn config_validation() {
        let mut cfg = StoppingConfig::new(1, 0.0, StopMode::TwoInf);
        assert!(cfg.validate().is_err());
        cfg.epsilon = 1e-3;
        cfg.p = 0;
        assert!(cfg.validate().is_err());
        cfg.gap_source = GapSource::Fixed { gap: 0.1, lambda_gap: 0.1 };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn default_start_leads_with_ones() {
        let q = default_start(9, 3, 5).unwrap();
        assert!(q.orthonormality_defect() < 1e-14);
        assert!(q.col(0).iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    }
}
