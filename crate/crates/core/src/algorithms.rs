//! Top-level hierarchical clustering algorithms and their parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bucketing::{auto_gamma, bucket_from_max_volume, bucket_from_min_degree, Beta, Bucketing};
use crate::error::{Error, Result};
use crate::graph::{contract, ContractedGraph, Graph, Partition, VertexSet};
use crate::spectral::{spectral_clustering_with, EigenOptions};
use crate::tree::{average_linkage, balanced_tree, caterpillar_merge, dasgupta_cost, replace_leaves, HcTree};
use crate::wrsc::{wrsc_tree_with_stats, WrscStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SpecWrsc,
    SpecCaterpillar,
    AverageLinkage,
    BalancedRandom,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::SpecWrsc, Algorithm::SpecCaterpillar, Algorithm::AverageLinkage, Algorithm::BalancedRandom];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::SpecWrsc => "spec_wrsc",
            Algorithm::SpecCaterpillar => "spec_caterpillar",
            Algorithm::AverageLinkage => "average_linkage",
            Algorithm::BalancedRandom => "balanced_random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Accepts the tags and the short CLI names.
    fn from_str(s: &str) -> Result<Algorithm> {
        match s {
            "spec_wrsc" | "specwrsc" => Ok(Algorithm::SpecWrsc),
            "spec_caterpillar" | "caterpillar" => Ok(Algorithm::SpecCaterpillar),
            "average_linkage" | "avglink" => Ok(Algorithm::AverageLinkage),
            "balanced_random" | "balanced" => Ok(Algorithm::BalancedRandom),
            other => Err(Error::BadConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgoConfig {
    pub k: usize,
    /// `None`: derived from the weight range, see [`auto_gamma`].
    pub gamma: Option<f64>,
    /// Bucket ratio for the caterpillar variant; `None` sweeps it.
    pub eta: Option<f64>,
    pub seed: u64,
    pub algorithm: Algorithm,
}

impl AlgoConfig {
    pub fn new(algorithm: Algorithm, k: usize, seed: u64) -> AlgoConfig {
        AlgoConfig { k, gamma: None, eta: None, seed, algorithm }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::BadConfig("k must be at least 1".into()));
        }
        if let Some(g) = self.gamma {
            if !(g >= 1.0) {
                return Err(Error::BadConfig(format!("gamma must be at least 1, got {g}")));
            }
        }
        if let Some(e) = self.eta {
            if !(e > 1.0) {
                return Err(Error::BadConfig(format!("eta must exceed 1, got {e}")));
            }
        }
        Ok(())
    }

    fn eigen(&self) -> EigenOptions {
        EigenOptions { seed: self.seed, ..EigenOptions::default() }
    }
}

fn check_input(g: &Graph, k: usize) -> Result<()> {
    if k < 2 || k > g.n() {
        return Err(Error::BadClusterCount(k));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Everything the bucketed algorithms compute on the way to their tree.
#[derive(Debug, Clone)]
pub struct SpecWrscTrace {
    pub partition: Partition,
    pub gamma: f64,
    pub beta: Beta,
    pub bucketings: Vec<Bucketing>,
    /// Vertex `b` of `contracted` is part `b` here.
    pub buckets: Partition,
    pub contracted: ContractedGraph,
    pub contracted_tree: HcTree,
    pub wrsc: WrscStats,
    pub tree: HcTree,
    pub cost: f64,
}

/// Flattens bucketings into a partition of `V` in (cluster, bucket) order,
/// plus the leaf orders used for the per-bucket balanced trees.
fn bucket_partition(n: usize, bucketings: &[Bucketing]) -> Result<(Partition, Vec<Vec<usize>>)> {
    let orders: Vec<Vec<usize>> =
        bucketings.iter().flat_map(|b| b.buckets.iter().map(|x| x.members.clone())).collect();
    let parts = orders.iter().map(|o| VertexSet::new(o.iter().copied())).collect();
    Ok((Partition::new(n, parts)?, orders))
}

/// Spectral clustering, degree buckets anchored at each cluster's
/// minimum-degree vertex with `β = 2^{k(γ+1)}`, recursive sparsest cut on the
/// bucket-contracted graph, then each bucket leaf expanded into a balanced
/// tree over its vertices in degree order.
pub fn spec_wrsc(g: &Graph, cfg: &AlgoConfig) -> Result<(HcTree, f64)> {
    spec_wrsc_trace(g, cfg).map(|t| (t.tree, t.cost))
}

pub fn spec_wrsc_trace(g: &Graph, cfg: &AlgoConfig) -> Result<SpecWrscTrace> {
    cfg.validate()?;
    check_input(g, cfg.k)?;
    let partition = spectral_clustering_with(g, cfg.k, &cfg.eigen())?;
    let gamma = cfg.gamma.unwrap_or_else(|| auto_gamma(g));
    let beta = Beta::pow2(cfg.k as f64 * (gamma + 1.0))?;
    let bucketings = partition
        .parts()
        .iter()
        .enumerate()
        .map(|(i, p)| bucket_from_min_degree(g, p, beta).map(|b| Bucketing { cluster: i, ..b }))
        .collect::<Result<Vec<_>>>()?;
    let (buckets, orders) = bucket_partition(g.n(), &bucketings)?;
    let contracted = contract(g, &buckets)?;
    let (contracted_tree, wrsc) = wrsc_tree_with_stats(&contracted)?;
    let subtrees = orders.iter().map(|o| balanced_tree(o)).collect::<Result<Vec<_>>>()?;
    let replacements: Vec<_> = subtrees
        .iter()
        .enumerate()
        .map(|(b, t)| (contracted_tree.leaf_node(b).expect("every bucket is a leaf"), t))
        .collect();
    let tree = replace_leaves(&contracted_tree, &replacements)?;
    let cost = dasgupta_cost(g, &tree)?;
    Ok(SpecWrscTrace { partition, gamma, beta, bucketings, buckets, contracted, contracted_tree, wrsc, tree, cost })
}

#[derive(Debug, Clone)]
pub struct CaterpillarTrace {
    pub partition: Partition,
    pub beta: Beta,
    pub bucketings: Vec<Bucketing>,
    pub buckets: Partition,
    pub tree: HcTree,
    pub cost: f64,
}

/// Spectral clustering, buckets of ratio `η` anchored at each cluster's
/// max-volume bucket, one balanced tree per bucket, and a caterpillar over
/// those trees from smallest to largest. Without `cfg.eta` this runs
/// [`eta_sweep`].
pub fn spec_caterpillar(g: &Graph, cfg: &AlgoConfig) -> Result<(HcTree, f64)> {
    match cfg.eta {
        Some(eta) => {
            let t = spec_caterpillar_trace(g, cfg, Beta::new(eta)?)?;
            Ok((t.tree, t.cost))
        }
        None => eta_sweep(g, cfg).map(|s| (s.tree, s.cost)),
    }
}

pub fn spec_caterpillar_trace(g: &Graph, cfg: &AlgoConfig, beta: Beta) -> Result<CaterpillarTrace> {
    cfg.validate()?;
    check_input(g, cfg.k)?;
    let partition = spectral_clustering_with(g, cfg.k, &cfg.eigen())?;
    caterpillar_from_partition(g, partition, beta)
}

fn caterpillar_from_partition(g: &Graph, partition: Partition, beta: Beta) -> Result<CaterpillarTrace> {
    let bucketings = partition
        .parts()
        .iter()
        .enumerate()
        .map(|(i, p)| bucket_from_max_volume(g, p, beta).map(|b| Bucketing { cluster: i, ..b }))
        .collect::<Result<Vec<_>>>()?;
    let (buckets, orders) = bucket_partition(g.n(), &bucketings)?;
    let subtrees = orders.iter().map(|o| balanced_tree(o)).collect::<Result<Vec<_>>>()?;
    let tree = caterpillar_merge(&subtrees)?;
    let cost = dasgupta_cost(g, &tree)?;
    Ok(CaterpillarTrace { partition, beta, bucketings, buckets, tree, cost })
}

/// Balanced tree over all vertices sorted by `(degree, id)`.
pub fn degree_balanced_tree(g: &Graph) -> Result<HcTree> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| g.degree(a).total_cmp(&g.degree(b)).then(a.cmp(&b)));
    balanced_tree(&order)
}

/// Balanced tree over a seeded random vertex order.
pub fn balanced_random(g: &Graph, seed: u64) -> Result<HcTree> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    balanced_tree(&order)
}

/// Per-run figures reported by benches and the CLI.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub buckets: usize,
    pub contracted_n: usize,
    pub wrsc_depth: usize,
    pub chosen_k: Option<usize>,
    pub chosen_eta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tree: HcTree,
    pub cost: f64,
    pub stats: RunStats,
}

/// Runs `cfg.algorithm` once.
pub fn run(g: &Graph, cfg: &AlgoConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.algorithm {
        Algorithm::SpecWrsc => {
            let t = spec_wrsc_trace(g, cfg)?;
            let stats = RunStats {
                buckets: t.buckets.k(),
                contracted_n: t.contracted.k(),
                wrsc_depth: t.wrsc.depth,
                chosen_k: Some(cfg.k),
                chosen_eta: None,
            };
            Ok(RunOutput { tree: t.tree, cost: t.cost, stats })
        }
        Algorithm::SpecCaterpillar => match cfg.eta {
            Some(eta) => {
                let t = spec_caterpillar_trace(g, cfg, Beta::new(eta)?)?;
                let stats = RunStats {
                    buckets: t.buckets.k(),
                    chosen_k: Some(cfg.k),
                    chosen_eta: Some(eta),
                    ..RunStats::default()
                };
                Ok(RunOutput { tree: t.tree, cost: t.cost, stats })
            }
            None => {
                let s = eta_sweep(g, cfg)?;
                let stats = RunStats {
                    buckets: s.buckets,
                    chosen_k: Some(cfg.k),
                    chosen_eta: Some(s.eta),
                    ..RunStats::default()
                };
                Ok(RunOutput { tree: s.tree, cost: s.cost, stats })
            }
        },
        Algorithm::AverageLinkage => {
            let tree = average_linkage(g);
            let cost = dasgupta_cost(g, &tree)?;
            Ok(RunOutput { tree, cost, stats: RunStats::default() })
        }
        Algorithm::BalancedRandom => {
            let tree = balanced_random(g, cfg.seed)?;
            let cost = dasgupta_cost(g, &tree)?;
            Ok(RunOutput { tree, cost, stats: RunStats::default() })
        }
    }
}

/// Runs `jobs` on scoped threads and returns the results in input order.
fn parallel_map<T: Sync, R: Send>(jobs: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|j| s.spawn(|| f(j))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

#[derive(Debug, Clone)]
pub struct KSweep {
    pub tree: HcTree,
    pub cost: f64,
    pub k: usize,
    pub output: RunOutput,
}

/// Runs `cfg.algorithm` for every `k' = 1..=k_max` (capped at `n`) and keeps
/// the cheapest tree, smaller `k'` on ties. `k' = 1` is
/// [`degree_balanced_tree`] without any spectral step.
pub fn k_sweep(g: &Graph, k_max: usize, cfg: &AlgoConfig) -> Result<KSweep> {
    if k_max < 1 {
        return Err(Error::BadConfig("k_max must be at least 1".into()));
    }
    let ks: Vec<usize> = (1..=k_max.min(g.n())).collect();
    let results = parallel_map(&ks, |&k| -> Result<RunOutput> {
        if k == 1 {
            let tree = degree_balanced_tree(g)?;
            let cost = dasgupta_cost(g, &tree)?;
            let stats = RunStats { buckets: 1, chosen_k: Some(1), ..RunStats::default() };
            return Ok(RunOutput { tree, cost, stats });
        }
        run(g, &AlgoConfig { k, ..*cfg })
    });
    let mut best: Option<(usize, RunOutput)> = None;
    for (k, r) in ks.into_iter().zip(results) {
        let r = r?;
        if best.as_ref().is_none_or(|(_, b)| r.cost < b.cost) {
            best = Some((k, r));
        }
    }
    let (k, output) = best.expect("k' = 1 always runs");
    Ok(KSweep { tree: output.tree.clone(), cost: output.cost, k, output })
}

#[derive(Debug, Clone)]
pub struct EtaSweep {
    pub tree: HcTree,
    pub cost: f64,
    /// `inf` when the unbounded ratio won.
    pub eta: f64,
    pub buckets: usize,
    /// Number of configurations executed.
    pub runs: usize,
}

/// The ratios tried by [`eta_sweep`]: `2^i` for
/// `i ∈ [⌈log₂ δ⌉, ⌈log₂ Δ⌉]` restricted to `i ≥ 1`, then `∞`.
pub fn eta_candidates(g: &Graph) -> Vec<f64> {
    let lo = g.min_degree().log2().ceil().max(1.0) as i32;
    let hi = g.max_degree().log2().ceil().max(1.0) as i32;
    (lo..=hi).map(|i| 2f64.powi(i)).chain([f64::INFINITY]).collect()
}

/// Caterpillar variant over every ratio of [`eta_candidates`]; the spectral
/// partition is computed once and shared. Cheapest tree wins, earlier
/// candidate on ties.
pub fn eta_sweep(g: &Graph, cfg: &AlgoConfig) -> Result<EtaSweep> {
    AlgoConfig { eta: None, ..*cfg }.validate()?;
    check_input(g, cfg.k)?;
    let partition = spectral_clustering_with(g, cfg.k, &cfg.eigen())?;
    let etas = eta_candidates(g);
    let results = parallel_map(&etas, |&eta| {
        let beta = if eta.is_finite() { Beta::new(eta)? } else { Beta::infinite() };
        caterpillar_from_partition(g, partition.clone(), beta)
    });
    let mut best: Option<(f64, CaterpillarTrace)> = None;
    for (eta, r) in etas.iter().zip(results) {
        let r = r?;
        if best.as_ref().is_none_or(|(_, b)| r.cost < b.cost) {
            best = Some((*eta, r));
        }
    }
    let (eta, t) = best.expect("at least the unbounded ratio runs");
    Ok(EtaSweep { cost: t.cost, buckets: t.buckets.k(), tree: t.tree, eta, runs: etas.len() })
}
