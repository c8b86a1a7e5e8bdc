//! Dataset access for the acceptance run.
//!
//! Real SNAP edge lists are read from the directory named by
//! `SPECTRAL_STOP_DATA`. When a file is missing, a deterministic synthetic
//! graph of the same size stands in and is labeled as a substitute in every
//! report line.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_stop::edgelist::load_edge_list;
use spectral_stop_core::netgraph::{largest_connected_component, GraphData};

pub const DATA_ENV: &str = "SPECTRAL_STOP_DATA";

/// Degree-corrected planted partition: Pareto node weights, power-law
/// community sizes and a fixed fraction of edges leaving their community.
#[derive(Clone, Copy, Debug)]
pub struct Substitute {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub degree_exponent: f64,
    pub weight_cap: f64,
    pub community_exponent: f64,
    pub min_community: usize,
    pub max_community: usize,
    pub mixing: f64,
}

impl Substitute {
    pub fn sized(n: usize, m: usize, seed: u64) -> Self {
        Substitute {
            n,
            m,
            seed,
            degree_exponent: 2.5,
            weight_cap: 50.0,
            community_exponent: 1.5,
            min_community: 20,
            max_community: n / 10,
            mixing: 0.2,
        }
    }

    fn describe(&self) -> String {
        format!(
            "substitute planted-partition graph n={} m={} seed={} degree-exp={} mixing={}",
            self.n, self.m, self.seed, self.degree_exponent, self.mixing
        )
    }

    pub fn generate(&self) -> GraphData {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.n;
        let weights: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                (1.0 - u).powf(-1.0 / (self.degree_exponent - 1.0)).min(self.weight_cap)
            })
            .collect();

        let mut sizes = Vec::new();
        let mut total = 0;
        while total < n {
            let u: f64 = rng.random();
            let (lo, hi) = (self.min_community as f64, self.max_community as f64);
            let a = 1.0 - self.community_exponent;
            let s = (lo.powf(a) + u * (hi.powf(a) - lo.powf(a))).powf(1.0 / a).round() as usize;
            let s = s.min(n - total);
            sizes.push(s);
            total += s;
        }
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(&mut rng);
        let mut members = Vec::with_capacity(sizes.len());
        let mut community = vec![0; n];
        let mut start = 0;
        for (c, &s) in sizes.iter().enumerate() {
            let block = nodes[start..start + s].to_vec();
            for &u in &block {
                community[u] = c;
            }
            members.push(block);
            start += s;
        }
        let global = WeightedIndex::new(&weights).unwrap();
        let local: Vec<WeightedIndex<f64>> = members
            .iter()
            .map(|block| WeightedIndex::new(block.iter().map(|&u| weights[u])).unwrap())
            .collect();

        let mut edges = HashSet::with_capacity(self.m);
        let mut draws = 0usize;
        while edges.len() < self.m && draws < 50 * self.m {
            draws += 1;
            let u = global.sample(&mut rng);
            let v = if rng.random::<f64>() < self.mixing {
                global.sample(&mut rng)
            } else {
                let c = community[u];
                members[c][local[c].sample(&mut rng)]
            };
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        edges.sort_unstable();
        largest_connected_component(&GraphData::from_edges(n, &edges).unwrap())
    }
}

pub struct Dataset {
    pub name: &'static str,
    /// Where the graph came from, printed with every verdict.
    pub source: String,
    pub graph: GraphData,
}

/// First of `files` found under `SPECTRAL_STOP_DATA`, else `fallback`.
pub fn dataset(name: &'static str, files: &[&str], fallback: Substitute) -> Dataset {
    if let Some(dir) = std::env::var_os(DATA_ENV) {
        for file in files {
            let path = PathBuf::from(&dir).join(file);
            if path.exists() {
                let loaded = load_edge_list(&path).unwrap_or_else(|e| panic!("{e}"));
                return Dataset {
                    name,
                    source: format!("{}", path.display()),
                    graph: largest_connected_component(&loaded.graph),
                };
            }
        }
    }
    Dataset {
        name,
        source: format!("{}; {} not available", fallback.describe(), name),
        graph: fallback.generate(),
    }
}

pub fn ca_hepph() -> Dataset {
    dataset("ca-HepPh", &["ca-HepPh.txt"], Substitute::sized(11_204, 117_649, 0x4E9))
}

pub fn sweep_graph() -> Dataset {
    let fallback = Substitute::sized(17_903, 197_031, 0xA57);
    if let Some(dir) = std::env::var_os(DATA_ENV) {
        let dblp = PathBuf::from(dir).join("com-dblp.ungraph.txt");
        if dblp.exists() {
            return dataset("com-DBLP", &["com-dblp.ungraph.txt"], fallback);
        }
    }
    dataset("ca-AstroPh", &["ca-AstroPh.txt"], fallback)
}
