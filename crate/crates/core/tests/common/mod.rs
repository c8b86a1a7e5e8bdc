#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spectral_stop_core::matcore::thin_qr;
use spectral_stop_core::netgraph::GraphData;
use spectral_stop_core::Mat;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn orthonormal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Mat {
    thin_qr(&gaussian(rng, n, k)).unwrap().0
}

pub fn symmetric(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let g = gaussian(rng, n, n);
    Mat::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
}

pub fn to_na(m: &Mat) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.nrows(), m.ncols(), m.as_slice())
}

pub fn na_spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Random connected graph: a random spanning tree plus extra edges with
/// probability `p`.
pub fn connected_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> GraphData {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    GraphData::from_edges(n, &edges).unwrap()
}

pub fn dense_adjacency(g: &GraphData) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Two cliques of size `k` joined by `bridges` edges between node `i` and `k + i`.
pub fn two_cliques(k: usize, bridges: usize) -> GraphData {
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                edges.push((base + u, base + v));
            }
        }
    }
    for i in 0..bridges {
        edges.push((i, k + i));
    }
    GraphData::from_edges(2 * k, &edges).unwrap()
}
