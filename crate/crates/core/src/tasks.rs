//! End-to-end graph pipelines: eigenvector centrality with ranking
//! comparison, CPQR spectral clustering and sweep-cut bipartitioning.

use alloc::vec;
use alloc::vec::Vec;

use crate::matcore::{small_svd, thin_qr, Deflated, Mat, Shifted};
use crate::netgraph::{
    connected_components, is_bipartite, ncut, sweep_cut, GraphData, RegularizedOperator, Shift, SweepProfile,
};
use crate::subspace::{default_start, run_observed, IterationState, ResidualReport, RunOutcome, StopMode, StoppingConfig};
use crate::synth::haar_orthogonal;
use crate::{Error, Result, DEFAULT_SEED};

pub use crate::netgraph::ClusterAssignment;

/// Pivot blocks with `σ_min <= PIVOT_TOL σ_max` are rejected.
pub const PIVOT_TOL: f64 = 1e-12;

/// Nodes sorted by descending score, ties by index.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    order: Vec<usize>,
    scores: Vec<f64>,
    truncation: usize,
}

impl Ranking {
    /// Truncation defaults to `⌊√n⌋`.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let truncation = libm::floor(libm::sqrt(scores.len() as f64)) as usize;
        Self { order, scores, truncation }
    }

    pub fn with_truncation(mut self, k: usize) -> Self {
        self.truncation = k.min(self.order.len());
        self
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn top(&self) -> &[usize] {
        &self.order[..self.truncation]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Discordant pairs over all pairs, `(1 − τ) / 2`.
pub fn kendall_tau_dist(a: &Ranking, b: &Ranking) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MismatchedUniverse);
    }
    order_distance(a.order(), b.order())
}

/// Kendall distance between the two full rankings restricted to the union
/// of their top sets. A node outside one ranking's top set therefore sits
/// below every member of that top set.
pub fn kendall_tau_dist_top(a: &Ranking, b: &Ranking) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::MismatchedUniverse);
    }
    let mut keep = vec![false; a.len()];
    for &u in a.top().iter().chain(b.top()) {
        keep[u] = true;
    }
    let ra: Vec<usize> = a.order().iter().copied().filter(|&u| keep[u]).collect();
    let rb: Vec<usize> = b.order().iter().copied().filter(|&u| keep[u]).collect();
    order_distance(&ra, &rb)
}

fn order_distance(a: &[usize], b: &[usize]) -> Result<f64> {
    let n = a.len();
    let universe = a.iter().chain(b).copied().max().map_or(0, |m| m + 1);
    let mut pos_b = vec![usize::MAX; universe];
    for (k, &u) in b.iter().enumerate() {
        pos_b[u] = k;
    }
    let mut seq = Vec::with_capacity(n);
    for &u in a {
        if pos_b[u] == usize::MAX {
            return Err(Error::MismatchedUniverse);
        }
        seq.push(pos_b[u]);
    }
    if n < 2 {
        return Ok(0.0);
    }
    let inversions = count_inversions(&mut seq);
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(inversions as f64 / pairs as f64)
}

/// Number of pairs `i < j` with `seq[i] > seq[j]`; sorts `seq`.
pub fn count_inversions(seq: &mut [usize]) -> u64 {
    let mut buf = vec![0; seq.len()];
    merge_count(seq, &mut buf)
}

fn merge_count(seq: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = merge_count(&mut seq[..mid], &mut buf[..mid]) + merge_count(&mut seq[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if seq[i] <= seq[j] {
            buf[k] = seq[i];
            i += 1;
        } else {
            buf[k] = seq[j];
            count += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&buf[..n]);
    count
}

/// Settings shared by the graph pipelines.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub epsilon: f64,
    pub mode: StopMode,
    pub p: usize,
    pub max_iters: usize,
    pub sep_fraction: f64,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(epsilon: f64, mode: StopMode) -> Self {
        Self { epsilon, mode, p: 3, max_iters: 10_000, sep_fraction: 1.0, seed: DEFAULT_SEED }
    }

    fn stopping(&self, r: usize) -> StoppingConfig {
        StoppingConfig {
            p: self.p,
            max_iters: self.max_iters,
            sep_fraction: self.sep_fraction,
            ..StoppingConfig::new(r, self.epsilon, self.mode)
        }
    }
}

fn require_connected(g: &GraphData) -> Result<()> {
    let (_, components) = connected_components(g);
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CentralityResult {
    pub ranking: Ranking,
    /// Final sign-fixed leading Ritz vector.
    pub vector: Vec<f64>,
    pub outcome: RunOutcome,
    /// The graph was bipartite and the `+I` shifted adjacency was used.
    pub bipartite: bool,
}

pub fn eigenvector_centrality(g: &GraphData, config: &PipelineConfig) -> Result<CentralityResult> {
    eigenvector_centrality_observed(g, config, |_, _| {})
}

/// Leading eigenvector of the adjacency matrix by subspace iteration with
/// `r = 1`, started from the normalized all-ones vector.
pub fn eigenvector_centrality_observed<F>(g: &GraphData, config: &PipelineConfig, observer: F) -> Result<CentralityResult>
where
    F: FnMut(&IterationState, &ResidualReport),
{
    require_connected(g)?;
    let stopping = StoppingConfig { sign_fix: true, ..config.stopping(1) };
    let q0 = default_start(g.n(), stopping.width(), config.seed)?;
    let bipartite = is_bipartite(g);
    let outcome = if bipartite {
        run_observed(&Shifted { inner: g.adjacency(), shift: 1.0 }, &stopping, q0, observer)?
    } else {
        run_observed(g.adjacency(), &stopping, q0, observer)?
    };
    let vector = outcome.ritz_vectors().col(0).to_vec();
    let ranking = Ranking::from_scores(vector.clone());
    Ok(CentralityResult { ranking, vector, outcome, bipartite })
}

/// Column-pivoted Householder QR of the `k x n` matrix `m`, returning the
/// first `steps` pivot columns. Ties in the pivot choice go to the smaller
/// column index.
pub fn pivoted_qr_pivots(m: &Mat, steps: usize) -> Vec<usize> {
    let (k, n) = (m.nrows(), m.ncols());
    let steps = steps.min(k).min(n);
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for s in 0..steps {
        let mut best = s;
        let mut best_norm = -1.0;
        for j in s..n {
            let norm: f64 = a.col(j)[s..].iter().map(|x| x * x).sum();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        if best != s {
            perm.swap(s, best);
            let slice = a.as_mut_slice();
            for i in 0..k {
                slice.swap(i + s * k, i + best * k);
            }
        }
        let x = &a.col(s)[s..];
        let xnorm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
        if xnorm == 0.0 {
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm = libm::sqrt(v.iter().map(|t| t * t).sum::<f64>());
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|t| *t /= vnorm);
        for j in s..n {
            let col = &mut a.col_mut(j)[s..];
            let h: f64 = 2.0 * col.iter().zip(&v).map(|(c, w)| c * w).sum::<f64>();
            col.iter_mut().zip(&v).for_each(|(c, w)| *c -= h * w);
        }
    }
    perm.truncate(steps);
    perm
}

/// Deterministic clustering of the rows of an orthonormal `n x k` block.
///
/// Pivots `C` come from column-pivoted QR of `Vkᵀ`; with `U` the polar
/// factor of `(Vkᵀ)_{:,C}`, node `j` joins `argmax_i |(Uᵀ Vkᵀ)_{ij}|`.
pub fn cpqr_cluster(vk: &Mat, k: usize) -> Result<ClusterAssignment> {
    let n = vk.nrows();
    if k == 0 || vk.ncols() != k || n < k {
        return Err(Error::Dimension("embedding must be n x k with n >= k >= 1"));
    }
    let vt = vk.transpose();
    let pivots = pivoted_qr_pivots(&vt, k);
    let block = vt.select_cols(&pivots);
    let svd = small_svd(&block)?;
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let smin = svd.sigma.last().copied().unwrap_or(0.0);
    if !(smax > 0.0) || !(smin > PIVOT_TOL * smax) {
        return Err(Error::DegenerateEmbedding);
    }
    let polar = svd.u.matmul_tr(&svd.w);
    let coords = polar.tr_matmul(&vt);
    let labels = (0..n)
        .map(|j| {
            let col = coords.col(j);
            let mut best = 0;
            for i in 1..k {
                if col[i].abs() > col[best].abs() {
                    best = i;
                }
            }
            best
        })
        .collect();
    ClusterAssignment::new(labels, k)
}

#[derive(Clone, Debug)]
pub struct ClusterResult {
    pub assignment: ClusterAssignment,
    pub ncut: f64,
    pub outcome: RunOutcome,
}

/// Leading `r`-dimensional eigenspace of the `+I` shifted regularized
/// normalized adjacency, clustered with [`cpqr_cluster`].
pub fn spectral_clustering_pipeline(g: &GraphData, r: usize, rho: f64, config: &PipelineConfig) -> Result<ClusterResult> {
    require_connected(g)?;
    let op = RegularizedOperator::new(g, rho, Shift::PlusIdentity)?;
    let stopping = config.stopping(r);
    let q0 = default_start(g.n(), stopping.width(), config.seed)?;
    let outcome = run_observed(&op, &stopping, q0, |_, _| {})?;
    let assignment = cpqr_cluster(&outcome.ritz_vectors(), r)?;
    let value = ncut(g, &assignment)?;
    Ok(ClusterResult { assignment, ncut: value, outcome })
}

#[derive(Clone, Debug)]
pub struct BipartitionResult {
    pub profile: SweepProfile,
    pub fiedler: Vec<f64>,
    pub t_stop: usize,
    pub outcome: RunOutcome,
}

/// Fiedler vector of the normalized adjacency (`ρ = 0`) by `r = 1`
/// iteration on the `+I` shifted operator with the Perron direction
/// projected out, followed by a sweep cut.
pub fn bipartition_experiment(g: &GraphData, config: &PipelineConfig) -> Result<BipartitionResult> {
    require_connected(g)?;
    let op = RegularizedOperator::new(g, 0.0, Shift::PlusIdentity)?;
    let deflated = Deflated::new(&op, op.perron_vector())?;
    let stopping = config.stopping(1);
    let raw = haar_orthogonal(g.n(), stopping.width(), config.seed)?;
    let q0 = thin_qr(&deflated.project(&raw))?.0;
    let outcome = run_observed(&deflated, &stopping, q0, |_, _| {})?;
    let fiedler = outcome.ritz_vectors().col(0).to_vec();
    let profile = sweep_cut(g, &fiedler)?;
    Ok(BipartitionResult { profile, fiedler, t_stop: outcome.t_stop, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kendall_extremes() {
        let a = Ranking::from_scores(vec![4.0, 3.0, 2.0, 1.0]);
        let b = Ranking::from_scores(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(kendall_tau_dist(&a, &a).unwrap(), 0.0);
        assert_eq!(kendall_tau_dist(&a, &b).unwrap(), 1.0);
        let c = Ranking::from_scores(vec![1.0, 2.0, 3.0]);
        assert!(matches!(kendall_tau_dist(&a, &c), Err(Error::MismatchedUniverse)));
    }

    #[test]
    fn inversion_count() {
        let mut s = [3, 1, 2, 0];
        assert_eq!(count_inversions(&mut s), 5);
        assert_eq!(s, [0, 1, 2, 3]);
    }

    #[test]
    fn ranking_ties_by_index() {
        let r = Ranking::from_scores(vec![1.0; 5]);
        assert_eq!(r.order(), &[0, 1, 2, 3, 4]);
        assert_eq!(r.truncation(), 2);
    }

    #[test]
    fn top_restriction() {
        let a = Ranking::from_scores(vec![9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        let mut swapped = a.scores().to_vec();
        swapped.swap(7, 8);
        let b = Ranking::from_scores(swapped);
        assert_eq!(kendall_tau_dist_top(&a, &b).unwrap(), 0.0);
        assert!(kendall_tau_dist(&a, &b).unwrap() > 0.0);
    }

    #[test]
    fn identity_embedding_is_singletons() {
        let a = cpqr_cluster(&Mat::identity(4), 4).unwrap();
        let mut labels = a.labels().to_vec();
        labels.sort_unstable();
        assert_eq!(labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn degenerate_embedding() {
        let vk = Mat::from_fn(4, 2, |i, j| if j == 0 { 0.5 } else if i == 0 { 1e-20 } else { 0.0 });
        assert!(matches!(cpqr_cluster(&vk, 2), Err(Error::DegenerateEmbedding)));
    }

    #[test]
    fn star_centrality() {
        let g = GraphData::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let res = eigenvector_centrality(&g, &PipelineConfig { p: 1, ..PipelineConfig::new(1e-12, StopMode::NaiveL2) }).unwrap();
        assert!(res.bipartite);
        assert!((res.vector[0] / res.vector[1] - 2.0).abs() < 1e-8);
        assert_eq!(res.ranking.order()[0], 0);
    }

    #[test]
    fn cycle_centrality_is_uniform() {
        let g = GraphData::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let res = eigenvector_centrality(&g, &PipelineConfig { p: 1, ..PipelineConfig::new(1e-10, StopMode::NaiveL2) }).unwrap();
        for x in &res.vector {
            assert!((x - 1.0 / libm::sqrt(5.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn disconnected_input_rejected() {
        let g = GraphData::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let cfg = PipelineConfig::new(1e-6, StopMode::NaiveL2);
        assert!(matches!(eigenvector_centrality(&g, &cfg), Err(Error::Disconnected { components: 2 })));
    }
}
