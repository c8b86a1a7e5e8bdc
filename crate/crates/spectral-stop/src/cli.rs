//! Command-line experiment drivers.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spectral_stop_core::bounds::{verify_assumption1, RateTrace, DEFAULT_T_MAX};
use spectral_stop_core::matcore::{dist_2, dist_2inf_proxy, Shifted};
use spectral_stop_core::netgraph::{
    default_rho, is_bipartite, largest_connected_component, GraphData, RegularizedOperator, Shift,
};
use spectral_stop_core::subspace::{default_start, run_observed, GapSource, RunOutcome, StopMode, StoppingConfig};
use spectral_stop_core::synth::{make_instance, SyntheticInstance, SyntheticSpec, TailStyle};
use spectral_stop_core::tasks::{
    bipartition_experiment, cpqr_cluster, eigenvector_centrality_observed, kendall_tau_dist_top,
    spectral_clustering_pipeline, PipelineConfig, Ranking,
};
use spectral_stop_core::{netgraph, DEFAULT_SEED};

use crate::blocks::{read_instance, write_instance};
use crate::edgelist::{dataset_name, load_edge_list};
use crate::error::{AppError, AppResult};
use crate::oracle::{cached_oracle, compute_oracle, OracleBasis, ORACLE_P};
use crate::presets::find_preset;
use crate::records::{eps_tag, to_json, write_csv, write_json, Field, Sig17};

#[derive(Debug, Parser)]
#[command(name = "spectral-stop", version, about = "Subspace iteration experiments with a 2->inf stopping rule")]
pub struct Cli {
    /// Seed for start blocks and synthetic instances.
    #[arg(long, global = true, env = "SPECTRAL_STOP_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Runs over the tolerance grid executed concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Directory receiving CSV traces and JSON summaries.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    TwoInf,
    Both,
}

impl ModeArg {
    fn mode(self) -> StopMode {
        match self {
            ModeArg::Naive => StopMode::NaiveL2,
            ModeArg::TwoInf => StopMode::TwoInf,
            ModeArg::Both => StopMode::Both,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Naive => "naive",
            ModeArg::TwoInf => "two-inf",
            ModeArg::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TailArg {
    IdentityResidual,
    FullHaar,
}

#[derive(Debug, Clone, Args)]
pub struct IterArgs {
    /// Tolerances; comma separated or repeated.
    #[arg(long = "eps", value_delimiter = ',', required = true, num_args = 1..)]
    pub eps: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    /// Extra columns carried along the target subspace.
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Gap used by the 2->inf residual as a fraction of the eigengap.
    #[arg(long, default_value_t = 1.0)]
    pub sep_fraction: f64,
}

impl IterArgs {
    fn validate(&self) -> AppResult<()> {
        if self.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(AppError::Usage("tolerances must be positive".into()));
        }
        if self.sep_fraction.is_nan() || self.sep_fraction <= 0.0 {
            return Err(AppError::Usage("--sep-fraction must be positive".into()));
        }
        Ok(())
    }

    fn pipeline(&self, eps: f64, seed: u64) -> PipelineConfig {
        PipelineConfig {
            p: self.p,
            max_iters: self.max_iters,
            sep_fraction: self.sep_fraction,
            seed,
            ..PipelineConfig::new(eps, self.mode.mode())
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthetic matrix with planted spectrum: per-iteration distances, residuals and rates.
    Synth(SynthArgs),
    /// Eigenvector centrality of the largest connected component.
    Centrality(CentralityArgs),
    /// CPQR spectral clustering with the normalized cut of the result.
    Cluster(ClusterArgs),
    /// Fiedler vector sweep cut.
    Sweep(SweepArgs),
    /// Measures the tail-power constant C.
    VerifyAssumption(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub rho: f64,
    #[arg(long, value_enum, default_value = "identity-residual")]
    pub tail_style: TailArg,
    /// Horizon for the tail-power constant.
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    pub tmax: usize,
    /// Load the instance from a block file instead of generating it.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Store the generated instance as a block file.
    #[arg(long)]
    pub save_instance: Option<PathBuf>,
    #[command(flatten)]
    pub iter: IterArgs,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Compute (or load) a reference vector and report ranking distances.
    #[arg(long)]
    pub oracle: bool,
    /// Where reference vectors are cached.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[command(flatten)]
    pub iter: IterArgs,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of clusters; defaults to the dataset preset.
    #[arg(long)]
    pub r: Option<usize>,
    /// Regularization; defaults to the preset, else the rounded average degree.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[command(flatten)]
    pub iter: IterArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Also run the l2 rule at tolerance eps * sqrt(n).
    #[arg(long)]
    pub relaxed: bool,
    #[command(flatten)]
    pub iter: IterArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Edge list; the adjacency of its largest component is checked.
    #[arg(long, conflicts_with = "n")]
    pub graph: Option<PathBuf>,
    /// Synthetic instance size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Leading subspace dimension (default 1 for graphs).
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub rho: f64,
    #[arg(long, default_value_t = 200)]
    pub tmax: usize,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

/// Runs a parsed command line and returns one JSON summary per run.
pub fn execute(cli: &Cli) -> AppResult<Vec<String>> {
    if cli.jobs == 0 {
        return Err(AppError::Usage("--jobs must be at least 1".into()));
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| AppError::io(&cli.out, e))?;
    match &cli.command {
        Command::Synth(a) => cmd_synth(cli, a),
        Command::Centrality(a) => cmd_centrality(cli, a),
        Command::Cluster(a) => cmd_cluster(cli, a),
        Command::Sweep(a) => cmd_sweep(cli, a),
        Command::VerifyAssumption(a) => cmd_verify_assumption(cli, a),
    }
}

/// Applies `f` to every tolerance using up to `jobs` threads; results keep
/// the grid order.
fn over_grid<T, F>(eps: &[f64], jobs: usize, f: F) -> AppResult<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> AppResult<T> + Sync,
{
    if jobs <= 1 || eps.len() <= 1 {
        return eps.iter().map(|&e| f(e)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<AppResult<T>>>> = Mutex::new((0..eps.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(eps.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= eps.len() {
                    break;
                }
                let result = f(eps[i]);
                slots.lock().expect("no poisoned workers")[i] = Some(result);
            });
        }
    });
    slots.into_inner().expect("no poisoned workers").into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn ratio(outcome: &RunOutcome) -> Option<f64> {
    match (outcome.t_comp, outcome.t_naive) {
        (Some(c), Some(n)) => Some(c as f64 / n as f64),
        _ => None,
    }
}

fn sig(x: Option<f64>) -> Option<Sig17> {
    x.map(Sig17)
}

struct LoadedLcc {
    name: String,
    graph: GraphData,
    raw_nodes: usize,
    raw_edges: usize,
}

fn load_lcc(path: &Path) -> AppResult<LoadedLcc> {
    let loaded = load_edge_list(path)?;
    let raw_nodes = loaded.graph.n();
    let raw_edges = loaded.graph.num_edges();
    let graph = largest_connected_component(&loaded.graph);
    Ok(LoadedLcc { name: dataset_name(path), graph, raw_nodes, raw_edges })
}

#[derive(Serialize)]
struct RunSummary<'a> {
    command: &'a str,
    dataset: &'a str,
    mode: &'a str,
    epsilon: Sig17,
    t_stop: usize,
    t_comp: Option<usize>,
    t_naive: Option<usize>,
    ratio: Option<Sig17>,
    exhausted: bool,
}

impl<'a> RunSummary<'a> {
    fn new(command: &'a str, dataset: &'a str, mode: &'a str, eps: f64, outcome: &RunOutcome) -> Self {
        RunSummary {
            command,
            dataset,
            mode,
            epsilon: Sig17(eps),
            t_stop: outcome.t_stop,
            t_comp: outcome.t_comp,
            t_naive: outcome.t_naive,
            ratio: sig(ratio(outcome)),
            exhausted: outcome.exhausted,
        }
    }
}

fn residual_columns(outcome: &RunOutcome) -> Vec<Vec<Field>> {
    outcome
        .trace
        .iter()
        .map(|rep| {
            vec![
                Field::from(rep.t),
                Field::from(rep.res2_max()),
                Field::from(rep.res2inf),
                Field::from(rep.gap_est),
                Field::from(rep.ritz_values[0]),
            ]
        })
        .collect()
}

const RESIDUAL_HEADER: [&str; 5] = ["t", "res2_max", "res2inf", "gap_est", "ritz1"];

// ---------------------------------------------------------------- synth

#[derive(Serialize)]
struct SynthSummary<'a> {
    #[serde(flatten)]
    run: RunSummary<'a>,
    n: usize,
    r: usize,
    rho: Sig17,
    seed: u64,
    p: usize,
    mu: Sig17,
    d0: Sig17,
    dist2inf0: Sig17,
    c_assumption: Sig17,
    csv: String,
}

fn synth_instance(cli: &Cli, a: &SynthArgs) -> AppResult<SyntheticInstance> {
    if let Some(path) = &a.instance {
        return read_instance(path);
    }
    let (Some(n), Some(r)) = (a.n, a.r) else {
        return Err(AppError::Usage("synth needs --n and --r, or --instance".into()));
    };
    let tail_style = match a.tail_style {
        TailArg::IdentityResidual => TailStyle::IdentityResidual,
        TailArg::FullHaar => TailStyle::FullHaar,
    };
    let spec = SyntheticSpec { n, r, rho: a.rho, seed: cli.seed, tail_style };
    spec.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let inst = make_instance(spec)?;
    if let Some(path) = &a.save_instance {
        write_instance(path, &inst)?;
    }
    Ok(inst)
}

fn cmd_synth(cli: &Cli, a: &SynthArgs) -> AppResult<Vec<String>> {
    a.iter.validate()?;
    let inst = synth_instance(cli, a)?;
    let (n, r) = (inst.spec.n, inst.spec.r);
    let width = r + a.iter.p;
    if width > n {
        return Err(AppError::Usage("r + p exceeds n".into()));
    }
    let c = inst.assumption_constant(a.tmax)?.c;
    let q0 = default_start(n, width, cli.seed)?;
    let gt = inst.ground_truth(&q0.leading_cols(r))?.with_assumption_constant(c);
    let ev = inst.eigenvalues();
    let gap_source = if a.iter.p == 0 {
        let lambda_gap = ev[r - 1] - ev[r];
        GapSource::Fixed { gap: a.iter.sep_fraction * lambda_gap, lambda_gap }
    } else {
        GapSource::Ritz
    };
    let mode = a.iter.mode;
    let summaries = over_grid(&a.iter.eps, cli.jobs, |eps| {
        let config = StoppingConfig {
            p: a.iter.p,
            max_iters: a.iter.max_iters,
            sep_fraction: a.iter.sep_fraction,
            gap_source,
            ..StoppingConfig::new(r, eps, mode.mode())
        };
        let mut rates = RateTrace::default();
        let mut failure = None;
        let outcome = run_observed(inst.operator(), &config, q0.clone(), |state, _| {
            if failure.is_none() {
                if let Err(e) = rates.push(&gt, state.t, &state.q.leading_cols(r)) {
                    failure = Some(e);
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e.into());
        }
        let name = format!("synth_n{n}_r{r}_seed{}_eps{}_{}", inst.spec.seed, eps_tag(eps), mode.name());
        let csv = cli.out.join(format!("{name}.csv"));
        let rows = outcome.trace.iter().enumerate().map(|(k, rep)| {
            vec![
                Field::from(rep.t),
                Field::from(rates.measured_dist2[k]),
                Field::from(rates.measured_dist2inf[k]),
                Field::from(rep.res2_max()),
                Field::from(rep.res2inf),
                Field::from(rates.rate1[k]),
                Field::from(rates.rate2[k]),
                Field::from(rates.rate3[k]),
                Field::from(rates.rate_naive[k]),
                Field::from(rates.rate_noassumption[k]),
                Field::from(c),
            ]
        });
        write_csv(
            &csv,
            &[
                "t",
                "dist2",
                "dist2inf_proxy",
                "res2_max",
                "res2inf",
                "rate1",
                "rate2",
                "rate3",
                "rate_naive",
                "rate_noassumption",
                "C_assumption",
            ],
            rows,
        )?;
        let summary = SynthSummary {
            run: RunSummary::new("synth", "synthetic", mode.name(), eps, &outcome),
            n,
            r,
            rho: Sig17(inst.spec.rho),
            seed: inst.spec.seed,
            p: a.iter.p,
            mu: Sig17(gt.mu),
            d0: Sig17(gt.d0),
            dist2inf0: Sig17(gt.dist2inf0),
            c_assumption: Sig17(c),
            csv: csv.display().to_string(),
        };
        write_json(&cli.out.join(format!("{name}.json")), &summary)?;
        Ok(to_json(&summary))
    })?;
    Ok(summaries)
}

// ----------------------------------------------------------- centrality

#[derive(Serialize)]
struct CentralitySummary<'a> {
    #[serde(flatten)]
    run: RunSummary<'a>,
    nodes_raw: usize,
    edges_raw: usize,
    n: usize,
    m: usize,
    lambda1: Option<Sig17>,
    bipartite: bool,
    dist_tau: Option<Sig17>,
    oracle_converged: Option<bool>,
    csv: String,
}

fn centrality_oracle(g: &GraphData, seed: u64) -> spectral_stop_core::Result<OracleBasis> {
    let q0 = default_start(g.n(), 1 + ORACLE_P.min(g.n() - 1), seed)?;
    if is_bipartite(g) {
        compute_oracle(&Shifted { inner: g.adjacency(), shift: 1.0 }, 1, q0)
    } else {
        compute_oracle(g.adjacency(), 1, q0)
    }
}

fn cmd_centrality(cli: &Cli, a: &CentralityArgs) -> AppResult<Vec<String>> {
    a.iter.validate()?;
    let data = load_lcc(&a.graph)?;
    let g = &data.graph;
    let oracle = if a.oracle {
        let key = format!("{}-centrality-seed{}", data.name, cli.seed);
        Some(cached_oracle(a.cache_dir.as_deref(), &key, || centrality_oracle(g, cli.seed))?)
    } else {
        None
    };
    let oracle_ranking = oracle.as_ref().map(|o| Ranking::from_scores(o.vectors.col(0).to_vec()));
    let mode = a.iter.mode;
    over_grid(&a.iter.eps, cli.jobs, |eps| {
        let config = a.iter.pipeline(eps, cli.seed);
        let mut extra: Vec<[Option<f64>; 3]> = Vec::new();
        let result = eigenvector_centrality_observed(g, &config, |state, _| {
            let row = match (&oracle, &oracle_ranking) {
                (Some(o), Some(reference)) => {
                    let q = state.q.leading_cols(1);
                    let ranking = Ranking::from_scores(q.col(0).to_vec());
                    [
                        dist_2(&q, &o.vectors).ok(),
                        dist_2inf_proxy(&q, &o.vectors).ok(),
                        kendall_tau_dist_top(&ranking, reference).ok(),
                    ]
                }
                _ => [None; 3],
            };
            extra.push(row);
        })?;
        let outcome = &result.outcome;
        let name = format!("{}_centrality_eps{}_{}", data.name, eps_tag(eps), mode.name());
        let csv = cli.out.join(format!("{name}.csv"));
        let rows = residual_columns(outcome).into_iter().zip(&extra).map(|(mut row, x)| {
            row.extend(x.iter().map(|v| Field::from(*v)));
            row
        });
        let mut header = RESIDUAL_HEADER.to_vec();
        header.extend(["dist2", "dist2inf_proxy", "dist_tau"]);
        write_csv(&csv, &header, rows)?;
        let dist_tau = oracle_ranking.as_ref().map(|o| kendall_tau_dist_top(&result.ranking, o)).transpose()?;
        let summary = CentralitySummary {
            run: RunSummary::new("centrality", &data.name, mode.name(), eps, outcome),
            nodes_raw: data.raw_nodes,
            edges_raw: data.raw_edges,
            n: g.n(),
            m: g.num_edges(),
            lambda1: sig(outcome.ritz_values().first().copied()),
            bipartite: result.bipartite,
            dist_tau: sig(dist_tau),
            oracle_converged: oracle.as_ref().map(|o| o.converged),
            csv: csv.display().to_string(),
        };
        write_json(&cli.out.join(format!("{name}.json")), &summary)?;
        Ok(to_json(&summary))
    })
}

// -------------------------------------------------------------- cluster

#[derive(Serialize)]
struct ClusterSummary<'a> {
    #[serde(flatten)]
    run: RunSummary<'a>,
    n: usize,
    m: usize,
    r: usize,
    rho: Sig17,
    ncut: Sig17,
    ncut_oracle: Option<Sig17>,
    ncut_rel_diff: Option<Sig17>,
    cluster_sizes: Vec<usize>,
    csv: String,
}

fn cmd_cluster(cli: &Cli, a: &ClusterArgs) -> AppResult<Vec<String>> {
    a.iter.validate()?;
    let data = load_lcc(&a.graph)?;
    let g = &data.graph;
    let preset = find_preset(&data.name);
    let r = a
        .r
        .or(preset.as_ref().map(|p| p.r))
        .ok_or_else(|| AppError::Usage(format!("no preset for {}; pass --r", data.name)))?;
    let rho = a.rho.or(preset.as_ref().map(|p| p.rho)).unwrap_or_else(|| default_rho(g));
    if r < 2 || r + a.iter.p > g.n() {
        return Err(AppError::Usage("need 2 <= r and r + p <= n".into()));
    }
    let ncut_oracle = if a.oracle {
        let key = format!("{}-cluster-r{r}-rho{}-seed{}", data.name, eps_tag(rho), cli.seed);
        let basis = cached_oracle(a.cache_dir.as_deref(), &key, || {
            let op = RegularizedOperator::new(g, rho, Shift::PlusIdentity)?;
            compute_oracle(&op, r, default_start(g.n(), (r + ORACLE_P).min(g.n()), cli.seed)?)
        })?;
        let assignment = cpqr_cluster(&basis.vectors, r)?;
        Some(netgraph::ncut(g, &assignment)?)
    } else {
        None
    };
    let mode = a.iter.mode;
    over_grid(&a.iter.eps, cli.jobs, |eps| {
        let result = spectral_clustering_pipeline(g, r, rho, &a.iter.pipeline(eps, cli.seed))?;
        let name = format!("{}_cluster_r{r}_eps{}_{}", data.name, eps_tag(eps), mode.name());
        let csv = cli.out.join(format!("{name}.csv"));
        write_csv(&csv, &RESIDUAL_HEADER, residual_columns(&result.outcome))?;
        let summary = ClusterSummary {
            run: RunSummary::new("cluster", &data.name, mode.name(), eps, &result.outcome),
            n: g.n(),
            m: g.num_edges(),
            r,
            rho: Sig17(rho),
            ncut: Sig17(result.ncut),
            ncut_oracle: sig(ncut_oracle),
            ncut_rel_diff: sig(ncut_oracle.map(|o| (result.ncut - o).abs() / o)),
            cluster_sizes: result.assignment.sizes(),
            csv: csv.display().to_string(),
        };
        write_json(&cli.out.join(format!("{name}.json")), &summary)?;
        Ok(to_json(&summary))
    })
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepSummary<'a> {
    #[serde(flatten)]
    run: RunSummary<'a>,
    variant: &'a str,
    n: usize,
    m: usize,
    min_conductance: Sig17,
    best_size: usize,
    csv: String,
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> AppResult<Vec<String>> {
    a.iter.validate()?;
    let data = load_lcc(&a.graph)?;
    let g = &data.graph;
    let mut jobs: Vec<(f64, f64, ModeArg, &str)> = a.iter.eps.iter().map(|&e| (e, e, a.iter.mode, "configured")).collect();
    if a.relaxed {
        let scale = (g.n() as f64).sqrt();
        jobs.extend(a.iter.eps.iter().map(|&e| (e, e * scale, ModeArg::Naive, "relaxed_l2")));
    }
    let keys: Vec<f64> = (0..jobs.len()).map(|i| i as f64).collect();
    over_grid(&keys, cli.jobs, |k| {
        let (eps, tol, mode, variant) = jobs[k as usize];
        let mut config = a.iter.pipeline(tol, cli.seed);
        config.mode = mode.mode();
        let result = bipartition_experiment(g, &config)?;
        let name = format!("{}_sweep_eps{}_{}_{variant}", data.name, eps_tag(eps), mode.name());
        let csv = cli.out.join(format!("{name}.csv"));
        let profile = &result.profile;
        let rows = profile.conductance().iter().enumerate().map(|(k, &c)| vec![Field::from(k + 1), Field::from(c)]);
        write_csv(&csv, &["prefix_size", "conductance"], rows)?;
        let summary = SweepSummary {
            run: RunSummary::new("sweep", &data.name, mode.name(), tol, &result.outcome),
            variant,
            n: g.n(),
            m: g.num_edges(),
            min_conductance: Sig17(profile.min_conductance()),
            best_size: profile.argmin() + 1,
            csv: csv.display().to_string(),
        };
        write_json(&cli.out.join(format!("{name}.json")), &summary)?;
        Ok(to_json(&summary))
    })
}

// ---------------------------------------------------- verify-assumption

#[derive(Serialize)]
struct AssumptionSummary<'a> {
    command: &'a str,
    dataset: &'a str,
    r: usize,
    t_max: usize,
    c: Sig17,
    argmax_t: usize,
    denominator: Sig17,
    lambda_next: Sig17,
    oracle_converged: Option<bool>,
    csv: String,
}

fn cmd_verify_assumption(cli: &Cli, a: &VerifyArgs) -> AppResult<Vec<String>> {
    if a.tmax == 0 {
        return Err(AppError::Usage("--tmax must be positive".into()));
    }
    let (dataset, r, report, lambda_next, converged) = match (&a.graph, a.n) {
        (Some(path), None) => {
            let data = load_lcc(path)?;
            let g = &data.graph;
            let r = a.r.unwrap_or(1);
            if r + 1 + ORACLE_P > g.n() {
                return Err(AppError::Usage("graph too small for the requested r".into()));
            }
            let key = format!("{}-adjacency-top{}-seed{}", data.name, r + 1, cli.seed);
            let basis = cached_oracle(a.cache_dir.as_deref(), &key, || {
                compute_oracle(g.adjacency(), r + 1, default_start(g.n(), r + 1 + ORACLE_P, cli.seed)?)
            })?;
            let v = basis.vectors.leading_cols(r);
            let report = verify_assumption1(g.adjacency(), &v, &basis.values[..r], basis.values[r], a.tmax)?;
            (data.name, r, report, basis.values[r], Some(basis.converged))
        }
        (None, Some(n)) => {
            let r = a.r.ok_or_else(|| AppError::Usage("synthetic check needs --r".into()))?;
            let spec = SyntheticSpec::new(n, r, a.rho, cli.seed);
            spec.validate().map_err(|e| AppError::Usage(e.to_string()))?;
            let inst = make_instance(spec)?;
            (format!("synthetic-n{n}-r{r}"), r, inst.assumption_constant(a.tmax)?, inst.eigenvalues()[r], None)
        }
        _ => return Err(AppError::Usage("verify-assumption needs --graph or --n".into())),
    };
    let name = format!("{dataset}_assumption_r{r}_tmax{}", a.tmax);
    let csv = cli.out.join(format!("{name}.csv"));
    write_csv(
        &csv,
        &["t", "ratio"],
        report.ratios.iter().enumerate().map(|(k, &x)| vec![Field::from(k + 1), Field::from(x)]),
    )?;
    let argmax_t = report.ratios.iter().position(|&x| x == report.c).map_or(0, |k| k + 1);
    let summary = AssumptionSummary {
        command: "verify-assumption",
        dataset: &dataset,
        r,
        t_max: a.tmax,
        c: Sig17(report.c),
        argmax_t,
        denominator: Sig17(report.denominator),
        lambda_next: Sig17(lambda_next),
        oracle_converged: converged,
        csv: csv.display().to_string(),
    };
    write_json(&cli.out.join(format!("{name}.json")), &summary)?;
    Ok(vec![to_json(&summary)])
}
