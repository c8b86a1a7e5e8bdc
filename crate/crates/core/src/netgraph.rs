//! Undirected simple graphs, regularized normalized adjacency operators,
//! conductance, normalized cut and sweep cuts.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::matcore::{Mat, SparseSymMatrix, SymOperator};
use crate::{Error, Result};

/// Counts of what graph construction discarded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Undirected simple graph on nodes `0..n` with the original node labels
/// kept in increasing order.
#[derive(Clone, Debug)]
pub struct GraphData {
    adjacency: SparseSymMatrix,
    degrees: Vec<usize>,
    node_labels: Vec<u64>,
    lcc: bool,
}

impl GraphData {
    /// Builds a graph from labelled edge pairs. Labels are compacted to
    /// `0..n` in increasing label order; self-loops and repeated edges
    /// (in either orientation) are dropped and counted.
    pub fn from_labeled_edges(pairs: &[(u64, u64)]) -> Result<(Self, BuildStats)> {
        let mut labels: Vec<u64> = Vec::with_capacity(2 * pairs.len());
        for &(u, v) in pairs {
            labels.push(u);
            labels.push(v);
        }
        labels.sort_unstable();
        labels.dedup();
        let index = |x: u64| labels.binary_search(&x).expect("label collected above");
        let mut stats = BuildStats::default();
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            let (a, b) = (index(u), index(v));
            edges.push((a.min(b), a.max(b)));
        }
        let before = edges.len();
        edges.sort_unstable();
        edges.dedup();
        stats.duplicates = before - edges.len();
        let n = labels.len();
        Ok((Self::from_sorted_edges(n, &edges, labels)?, stats))
    }

    /// Graph on `0..n` with labels equal to indices. Edges may repeat and
    /// appear in either orientation; self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut clean: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Dimension("edge endpoint out of range"));
            }
            if u != v {
                clean.push((u.min(v), u.max(v)));
            }
        }
        clean.sort_unstable();
        clean.dedup();
        Self::from_sorted_edges(n, &clean, (0..n as u64).collect())
    }

    fn from_sorted_edges(n: usize, edges: &[(usize, usize)], node_labels: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut degrees = vec![0usize; n];
        for &(u, v) in edges {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + degrees[i];
        }
        let mut fill = row_ptr.clone();
        let mut col_idx = vec![0usize; row_ptr[n]];
        // Sorted (u, v) with u < v: each row receives its lower neighbours
        // first (from earlier u) then its upper ones, already increasing.
        for &(u, v) in edges {
            col_idx[fill[v]] = u;
            fill[v] += 1;
        }
        for &(u, v) in edges {
            col_idx[fill[u]] = v;
            fill[u] += 1;
        }
        let values = vec![1.0; col_idx.len()];
        let adjacency = SparseSymMatrix::from_csr(n, row_ptr, col_idx, values)?;
        Ok(Self { adjacency, degrees, node_labels, lcc: false })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn node_labels(&self) -> &[u64] {
        &self.node_labels
    }

    pub fn adjacency(&self) -> &SparseSymMatrix {
        &self.adjacency
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        self.adjacency.row(u).0
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Whether this graph came out of [`largest_connected_component`].
    pub fn is_lcc(&self) -> bool {
        self.lcc
    }

    pub fn total_volume(&self) -> usize {
        self.adjacency.nnz()
    }
}

/// Component index per node, numbered in order of each component's
/// smallest node.
pub fn connected_components(g: &GraphData) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

pub fn is_connected(g: &GraphData) -> bool {
    connected_components(g).1 == 1
}

/// Induced subgraph on the largest component. Ties go to the component
/// holding the smallest original label.
pub fn largest_connected_component(g: &GraphData) -> GraphData {
    let (comp, count) = connected_components(g);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // Components are numbered by smallest node, and labels increase with
    // node index, so the first maximum wins the tie-break.
    let mut best = 0;
    for c in 1..count {
        if sizes[c] > sizes[best] {
            best = c;
        }
    }
    let keep: Vec<usize> = (0..g.n()).filter(|&u| comp[u] == best).collect();
    let mut sub = induced_subgraph(g, &keep);
    sub.lcc = true;
    sub
}

/// Induced subgraph on `keep` (strictly increasing node indices).
pub fn induced_subgraph(g: &GraphData, keep: &[usize]) -> GraphData {
    let mut map = vec![usize::MAX; g.n()];
    for (new, &old) in keep.iter().enumerate() {
        map[old] = new;
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| map[u] != usize::MAX && map[v] != usize::MAX)
        .map(|(u, v)| (map[u], map[v]))
        .collect();
    let labels = keep.iter().map(|&u| g.node_labels[u]).collect();
    GraphData::from_sorted_edges(keep.len(), &edges, labels).expect("induced subgraph of a valid graph")
}

/// Two-colouring test by breadth-first search.
pub fn is_bipartite(g: &GraphData) -> bool {
    let n = g.n();
    let mut colour = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if colour[s] != u8::MAX {
            continue;
        }
        colour[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if colour[v] == u8::MAX {
                    colour[v] = 1 - colour[u];
                    queue.push_back(v);
                } else if colour[v] == colour[u] {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    None,
    PlusIdentity,
}

/// `D_ρ^{-1/2} (A + (ρ/n) 11ᵀ) D_ρ^{-1/2} + shift·I` applied without forming
/// the rank-one term.
#[derive(Clone, Debug)]
pub struct RegularizedOperator<'g> {
    graph: &'g GraphData,
    rho: f64,
    shift: Shift,
    dinv_sqrt: Vec<f64>,
}

impl<'g> RegularizedOperator<'g> {
    pub fn new(graph: &'g GraphData, rho: f64, shift: Shift) -> Result<Self> {
        if !(rho >= 0.0) {
            return Err(Error::Config("rho must be nonnegative"));
        }
        let mut dinv_sqrt = Vec::with_capacity(graph.n());
        for (i, &d) in graph.degrees().iter().enumerate() {
            let total = d as f64 + rho;
            if !(total > 0.0) {
                return Err(Error::ZeroDegree(i));
            }
            dinv_sqrt.push(1.0 / libm::sqrt(total));
        }
        Ok(Self { graph, rho, shift, dinv_sqrt })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    pub fn graph(&self) -> &'g GraphData {
        self.graph
    }

    /// Unit vector along `D_ρ^{1/2} 1`, the eigenvector for the top
    /// eigenvalue `1` (`2` when shifted).
    pub fn perron_vector(&self) -> Mat {
        let mut p: Vec<f64> = self.dinv_sqrt.iter().map(|d| 1.0 / d).collect();
        let nrm = libm::sqrt(p.iter().map(|x| x * x).sum::<f64>());
        p.iter_mut().for_each(|x| *x /= nrm);
        Mat::from_column(&p)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.graph.n();
        let scaled: Vec<f64> = x.iter().zip(&self.dinv_sqrt).map(|(a, b)| a * b).collect();
        self.graph.adjacency.matvec(&scaled, y);
        let coupling = self.rho / n as f64 * scaled.iter().sum::<f64>();
        let s = if self.shift == Shift::PlusIdentity { 1.0 } else { 0.0 };
        for i in 0..n {
            y[i] = self.dinv_sqrt[i] * (y[i] + coupling) + s * x[i];
        }
    }
}

impl SymOperator for RegularizedOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &Mat) -> Mat {
        let n = self.graph.n();
        assert_eq!(x.nrows(), n, "operand has the wrong number of rows");
        let scaled = Mat::from_fn(n, x.ncols(), |i, j| x[(i, j)] * self.dinv_sqrt[i]);
        let mut y = self.graph.adjacency.apply(&scaled);
        let s = if self.shift == Shift::PlusIdentity { 1.0 } else { 0.0 };
        for j in 0..x.ncols() {
            let coupling = self.rho / n as f64 * scaled.col(j).iter().sum::<f64>();
            let xj = x.col(j);
            for (i, yi) in y.col_mut(j).iter_mut().enumerate() {
                *yi = self.dinv_sqrt[i] * (*yi + coupling) + s * xj[i];
            }
        }
        y
    }
}

/// `round(2m / n)`, the average degree.
pub fn default_rho(g: &GraphData) -> f64 {
    libm::round(g.total_volume() as f64 / g.n() as f64)
}

fn membership(g: &GraphData, set: &[usize]) -> Result<(Vec<bool>, usize)> {
    let mut inside = vec![false; g.n()];
    let mut size = 0;
    for &u in set {
        if u >= g.n() {
            return Err(Error::Dimension("node index out of range"));
        }
        if !inside[u] {
            inside[u] = true;
            size += 1;
        }
    }
    if size == 0 || size == g.n() {
        return Err(Error::UndefinedCut);
    }
    Ok((inside, size))
}

fn cut_and_volume(g: &GraphData, inside: &[bool]) -> (usize, usize) {
    let (mut cut, mut vol) = (0, 0);
    for u in 0..g.n() {
        if inside[u] {
            vol += g.degrees[u];
            cut += g.neighbors(u).iter().filter(|&&v| !inside[v]).count();
        }
    }
    (cut, vol)
}

/// `cut(S) / min(A(S), A(Sᶜ))`.
pub fn conductance(g: &GraphData, set: &[usize]) -> Result<f64> {
    let (inside, _) = membership(g, set)?;
    let (cut, vol) = cut_and_volume(g, &inside);
    let denom = vol.min(g.total_volume() - vol);
    if denom == 0 {
        return Err(Error::UndefinedCut);
    }
    Ok(cut as f64 / denom as f64)
}

/// `cut(S) / A(S)`, the per-cluster term of the normalized cut.
pub fn volume_conductance(g: &GraphData, set: &[usize]) -> Result<f64> {
    let (inside, _) = membership(g, set)?;
    let (cut, vol) = cut_and_volume(g, &inside);
    if vol == 0 {
        return Err(Error::UndefinedCut);
    }
    Ok(cut as f64 / vol as f64)
}

/// Cluster index per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.iter().any(|&c| c >= k) {
            return Err(Error::Dimension("cluster label out of range"));
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
    }
}

/// `½ Σ_k cut(S_k) / A(S_k)`.
pub fn ncut(g: &GraphData, partition: &ClusterAssignment) -> Result<f64> {
    if partition.labels.len() != g.n() {
        return Err(Error::Dimension("partition does not cover the graph"));
    }
    if partition.k < 2 {
        return Err(Error::Config("ncut needs at least two clusters"));
    }
    let labels = &partition.labels;
    let mut cut = vec![0usize; partition.k];
    let mut vol = vec![0usize; partition.k];
    for (u, &cu) in labels.iter().enumerate() {
        vol[cu] += g.degrees[u];
        cut[cu] += g.neighbors(u).iter().filter(|&&v| labels[v] != cu).count();
    }
    let sizes = partition.sizes();
    let mut total = 0.0;
    for c in 0..partition.k {
        if sizes[c] == 0 {
            return Err(Error::EmptyCluster(c));
        }
        if vol[c] == 0 {
            return Err(Error::UndefinedCut);
        }
        total += cut[c] as f64 / vol[c] as f64;
    }
    Ok(0.5 * total)
}

/// Conductance of every prefix of a node ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepProfile {
    order: Vec<usize>,
    conductance: Vec<f64>,
    argmin: usize,
}

impl SweepProfile {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `conductance()[k]` belongs to the prefix of size `k + 1`.
    pub fn conductance(&self) -> &[f64] {
        &self.conductance
    }

    pub fn argmin(&self) -> usize {
        self.argmin
    }

    pub fn min_conductance(&self) -> f64 {
        self.conductance[self.argmin]
    }

    pub fn best_set(&self) -> &[usize] {
        &self.order[..self.argmin + 1]
    }
}

/// Sorts nodes by `D^{-1/2} v` descending (ties by index) and sweeps the
/// prefixes, updating cut and volume incrementally.
pub fn sweep_cut(g: &GraphData, fiedler: &[f64]) -> Result<SweepProfile> {
    let n = g.n();
    if fiedler.len() != n {
        return Err(Error::Dimension("vector length differs from node count"));
    }
    if n < 2 {
        return Err(Error::UndefinedCut);
    }
    let mut score = Vec::with_capacity(n);
    for (u, &x) in fiedler.iter().enumerate() {
        if g.degrees[u] == 0 {
            return Err(Error::ZeroDegree(u));
        }
        score.push(x / libm::sqrt(g.degrees[u] as f64));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));

    let total = g.total_volume();
    let mut inside = vec![false; n];
    let (mut cut, mut vol) = (0isize, 0usize);
    let mut conductance = Vec::with_capacity(n - 1);
    for &u in &order[..n - 1] {
        let internal = g.neighbors(u).iter().filter(|&&v| inside[v]).count() as isize;
        cut += g.degrees[u] as isize - 2 * internal;
        vol += g.degrees[u];
        inside[u] = true;
        let denom = vol.min(total - vol);
        if denom == 0 {
            return Err(Error::UndefinedCut);
        }
        conductance.push(cut as f64 / denom as f64);
    }
    let mut argmin = 0;
    for (k, &c) in conductance.iter().enumerate() {
        if c < conductance[argmin] {
            argmin = k;
        }
    }
    Ok(SweepProfile { order, conductance, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles_bridged() -> GraphData {
        GraphData::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn path_from_labels() {
        let (g, stats) = GraphData::from_labeled_edges(&[(10, 11), (11, 12), (12, 11), (11, 11)]).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degrees(), &[1, 2, 1]);
        assert_eq!(g.node_labels(), &[10, 11, 12]);
        assert_eq!(stats, BuildStats { self_loops: 1, duplicates: 1 });
        assert!(GraphData::from_labeled_edges(&[]).is_err());
    }

    #[test]
    fn complete_graph_conductance() {
        let k4 = GraphData::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(conductance(&k4, &[0]).unwrap(), 1.0);
        assert!((ncut(&k4, &ClusterAssignment::new(vec![0, 0, 1, 1], 2).unwrap()).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(conductance(&k4, &[]), Err(Error::UndefinedCut)));
        assert!(matches!(conductance(&k4, &[0, 1, 2, 3]), Err(Error::UndefinedCut)));
    }

    #[test]
    fn bridged_triangles() {
        let g = two_triangles_bridged();
        assert!((conductance(&g, &[0, 1, 2]).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(conductance(&g, &[0, 1, 2]).unwrap(), conductance(&g, &[3, 4, 5]).unwrap());
        assert!(!is_bipartite(&g));
    }

    #[test]
    fn lcc_tie_break() {
        let g = GraphData::from_edges(7, &[(4, 5), (5, 6), (4, 6), (1, 2), (2, 3), (1, 3)]).unwrap();
        let lcc = largest_connected_component(&g);
        assert_eq!(lcc.node_labels(), &[1, 2, 3]);
        assert!(lcc.is_lcc());
        assert_eq!(connected_components(&g).1, 3);
    }

    #[test]
    fn ncut_of_components_is_zero() {
        let g = GraphData::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let part = ClusterAssignment::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        assert_eq!(ncut(&g, &part).unwrap(), 0.0);
        let empty = ClusterAssignment::new(vec![0, 0, 0, 0, 0, 0], 2).unwrap();
        assert!(matches!(ncut(&g, &empty), Err(Error::EmptyCluster(1))));
    }

    #[test]
    fn stationary_vector() {
        let g = two_triangles_bridged();
        let op = RegularizedOperator::new(&g, 0.0, Shift::None).unwrap();
        let p = op.perron_vector();
        let y = op.apply(&p);
        assert!(y.sub(&p).max_abs() < 1e-15);
        let isolated = GraphData::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(RegularizedOperator::new(&isolated, 0.0, Shift::None), Err(Error::ZeroDegree(2))));
    }

    #[test]
    fn constant_vector_sweep() {
        let g = two_triangles_bridged();
        let ones = vec![1.0; 6];
        let deg: Vec<f64> = g.degrees().iter().map(|&d| libm::sqrt(d as f64)).collect();
        let prof = sweep_cut(&g, &deg).unwrap();
        assert_eq!(prof.order(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(prof.conductance().len(), 5);
        assert!((prof.min_conductance() - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(sweep_cut(&g, &ones).unwrap().conductance().len(), 5);
    }
}
