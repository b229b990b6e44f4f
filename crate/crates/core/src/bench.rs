//! Experiment harness: graphs × algorithms × seeds, with cost and timing.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithms::{run, AlgoConfig, Algorithm};
use crate::error::{Error, Result};
use crate::generators::{gen_hsbm, gen_sbm};
use crate::graph::{DuplicatePolicy, Graph};
use crate::io::read_edge_list;

pub const CSV_HEADER: &str = "graph,n,m,algo,k,seed,cost,wall_time_s,depth,buckets,contracted_n";

pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Regenerated per run seed unless `seed` is fixed.
    Sbm { name: Option<String>, k: usize, n_k: usize, p: f64, q: f64, seed: Option<u64> },
    Hsbm { name: Option<String>, n_k: usize, p: f64, q_min: f64, seed: Option<u64> },
    File { name: Option<String>, path: PathBuf, k: usize, #[serde(default)] merge_duplicates: bool },
}

impl GraphSpec {
    pub fn name(&self) -> String {
        match self {
            GraphSpec::Sbm { name: Some(n), .. } | GraphSpec::Hsbm { name: Some(n), .. } | GraphSpec::File { name: Some(n), .. } => {
                n.clone()
            }
            GraphSpec::Sbm { k, n_k, p, q, .. } => format!("sbm-k{k}-n{n_k}-p{p}-q{q}"),
            GraphSpec::Hsbm { n_k, p, q_min, .. } => format!("hsbm-n{n_k}-p{p}-q{q_min}"),
            GraphSpec::File { path, .. } => path.display().to_string(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            GraphSpec::Sbm { k, .. } | GraphSpec::File { k, .. } => *k,
            GraphSpec::Hsbm { .. } => 5,
        }
    }

    pub fn load(&self, run_seed: u64) -> Result<Graph> {
        match self {
            GraphSpec::Sbm { k, n_k, p, q, seed, .. } => Ok(gen_sbm(*k, *n_k, *p, *q, seed.unwrap_or(run_seed))?.0),
            GraphSpec::Hsbm { n_k, p, q_min, seed, .. } => Ok(gen_hsbm(*n_k, *p, *q_min, seed.unwrap_or(run_seed))?.0),
            GraphSpec::File { path, merge_duplicates, .. } => {
                let policy = if *merge_duplicates { DuplicatePolicy::Merge } else { DuplicatePolicy::Reject };
                read_edge_list(path, policy).map_err(|e| match e {
                    e @ Error::GraphLoad { .. } => e,
                    other => Error::GraphLoad { path: path.display().to_string(), msg: other.to_string() },
                })
            }
        }
    }

    fn fixed(&self) -> bool {
        matches!(self, GraphSpec::File { .. } | GraphSpec::Sbm { seed: Some(_), .. } | GraphSpec::Hsbm { seed: Some(_), .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub graphs: Vec<GraphSpec>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    /// Worker count; defaults to the available parallelism.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_seeds() -> Vec<u64> {
    DEFAULT_SEEDS.to_vec()
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<BenchConfig> {
        let cfg: BenchConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        if cfg.graphs.is_empty() || cfg.algorithms.is_empty() || cfg.seeds.is_empty() {
            return Err(Error::ConfigParse("graphs, algorithms and seeds must be nonempty".into()));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub algo: Algorithm,
    pub k: usize,
    pub seed: u64,
    pub cost: f64,
    pub wall_time_s: f64,
    pub depth: usize,
    pub buckets: usize,
    pub contracted_n: usize,
    pub wrsc_depth: usize,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    /// Cost over the `spec_wrsc` cost on the same graph and seed.
    pub normalized_cost: Option<f64>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.graph),
            self.n,
            self.m,
            self.algo,
            self.k,
            self.seed,
            self.cost,
            self.wall_time_s,
            self.depth,
            self.buckets,
            self.contracted_n
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub graph: String,
    pub algo: Algorithm,
    pub runs: usize,
    pub errors: usize,
    pub mean_n: f64,
    pub mean_m: f64,
    pub mean_cost: f64,
    pub std_cost: f64,
    pub mean_wall_time_s: f64,
    pub std_wall_time_s: f64,
    /// `mean_cost / mean_cost(spec_wrsc)` on the same graph.
    pub normalized_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub algo: Algorithm,
    /// Least-squares slope of `log(wall time)` against `log(m)`.
    pub slope: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchOutput {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub scaling: Vec<ScalingFit>,
}

impl BenchOutput {
    pub fn any_errors(&self) -> bool {
        self.records.iter().any(|r| r.error.is_some())
    }

    /// Successful records under [`CSV_HEADER`].
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in self.records.iter().filter(|r| r.error.is_none()) {
            writeln!(out, "{}", r.csv_row())?;
        }
        Ok(())
    }

    /// Every record, errors included, one JSON object per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for r in &self.records {
            writeln!(out, "{}", serde_json::to_string(r).expect("records serialise"))?;
        }
        Ok(())
    }

    pub fn write_summary_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "graph,algo,runs,errors,mean_n,mean_m,mean_cost,std_cost,mean_wall_time_s,std_wall_time_s,normalized_cost")?;
        for s in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&s.graph),
                s.algo,
                s.runs,
                s.errors,
                s.mean_n,
                s.mean_m,
                s.mean_cost,
                s.std_cost,
                s.mean_wall_time_s,
                s.std_wall_time_s,
                s.normalized_cost.map_or(String::new(), |x| x.to_string())
            )?;
        }
        Ok(())
    }
}

/// Sample mean and standard deviation (`n - 1` denominator, 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Least-squares slope of `ln y` on `ln x`. `None` without two distinct `x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (pts.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

struct Cell {
    graph: usize,
    seed: u64,
    algo: Algorithm,
}

/// Runs every (graph, seed, algorithm) cell. Graph construction happens
/// before timing starts; the timed span covers the whole algorithm,
/// eigensolve included.
pub fn bench_matrix(cfg: &BenchConfig) -> Result<BenchOutput> {
    // graphs[g][s]: loaded once per distinct seed (once overall when fixed)
    let mut graphs: Vec<Vec<std::result::Result<Graph, Error>>> = Vec::new();
    for spec in &cfg.graphs {
        if let GraphSpec::File { .. } = spec {
            // a missing file is a configuration error, not a cell error
            let g = spec.load(0)?;
            graphs.push(cfg.seeds.iter().map(|_| Ok(g.clone())).collect());
        } else if spec.fixed() {
            let g = spec.load(0);
            graphs.push(cfg.seeds.iter().map(|_| g.clone()).collect());
        } else {
            graphs.push(cfg.seeds.iter().map(|&s| spec.load(s)).collect());
        }
    }
    let mut cells = Vec::new();
    for gi in 0..cfg.graphs.len() {
        for &seed in &cfg.seeds {
            for &algo in &cfg.algorithms {
                cells.push(Cell { graph: gi, seed, algo });
            }
        }
    }
    let threads = cfg.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    let mut ordered: BTreeMap<usize, RunRecord> = BTreeMap::new();
    std::thread::scope(|s| {
        for _ in 0..threads.min(cells.len()) {
            let tx = tx.clone();
            let (cells, graphs, next) = (&cells, &graphs, &next);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let seed_pos = cfg.seeds.iter().position(|&x| x == cell.seed).expect("seed listed");
                let record = run_cell(cfg, cell, &graphs[cell.graph][seed_pos]);
                if tx.send((i, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, r) in rx {
            ordered.insert(i, r);
        }
    });
    let mut records: Vec<RunRecord> = ordered.into_values().collect();
    normalise(&mut records);
    let summary = summarise(cfg, &records);
    let scaling = fit_scaling(cfg, &records);
    Ok(BenchOutput { records, summary, scaling })
}

fn run_cell(cfg: &BenchConfig, cell: &Cell, graph: &std::result::Result<Graph, Error>) -> RunRecord {
    let spec = &cfg.graphs[cell.graph];
    let k = spec.k();
    let mut rec = RunRecord {
        graph: spec.name(),
        n: 0,
        m: 0,
        algo: cell.algo,
        k,
        seed: cell.seed,
        cost: f64::NAN,
        wall_time_s: f64::NAN,
        depth: 0,
        buckets: 0,
        contracted_n: 0,
        wrsc_depth: 0,
        gamma: cfg.gamma,
        eta: cfg.eta,
        normalized_cost: None,
        error: None,
    };
    let g = match graph {
        Ok(g) => g,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.n = g.n();
    rec.m = g.m();
    let algo_cfg = AlgoConfig { k, gamma: cfg.gamma, eta: cfg.eta, seed: cell.seed, algorithm: cell.algo };
    let start = Instant::now();
    let out = run(g, &algo_cfg);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    match out {
        Ok(out) => {
            rec.cost = out.cost;
            rec.depth = out.tree.height();
            rec.buckets = out.stats.buckets;
            rec.contracted_n = out.stats.contracted_n;
            rec.wrsc_depth = out.stats.wrsc_depth;
            rec.eta = out.stats.chosen_eta.or(cfg.eta);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn normalise(records: &mut [RunRecord]) {
    let base: BTreeMap<(String, u64), f64> = records
        .iter()
        .filter(|r| r.algo == Algorithm::SpecWrsc && r.error.is_none())
        .map(|r| ((r.graph.clone(), r.seed), r.cost))
        .collect();
    for r in records.iter_mut().filter(|r| r.error.is_none()) {
        r.normalized_cost = base.get(&(r.graph.clone(), r.seed)).map(|b| r.cost / b);
    }
}

fn summarise(cfg: &BenchConfig, records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for spec in &cfg.graphs {
        let name = spec.name();
        let mut base = None;
        let mut graph_rows = Vec::new();
        for &algo in &cfg.algorithms {
            let all: Vec<&RunRecord> = records.iter().filter(|r| r.graph == name && r.algo == algo).collect();
            let ok: Vec<&RunRecord> = all.iter().copied().filter(|r| r.error.is_none()).collect();
            let costs: Vec<f64> = ok.iter().map(|r| r.cost).collect();
            let times: Vec<f64> = ok.iter().map(|r| r.wall_time_s).collect();
            let (mean_cost, std_cost) = mean_std(&costs);
            let (mean_wall_time_s, std_wall_time_s) = mean_std(&times);
            let mean_n = mean_std(&ok.iter().map(|r| r.n as f64).collect::<Vec<_>>()).0;
            let mean_m = mean_std(&ok.iter().map(|r| r.m as f64).collect::<Vec<_>>()).0;
            if algo == Algorithm::SpecWrsc && !ok.is_empty() {
                base = Some(mean_cost);
            }
            graph_rows.push(SummaryRow {
                graph: name.clone(),
                algo,
                runs: all.len(),
                errors: all.len() - ok.len(),
                mean_n,
                mean_m,
                mean_cost,
                std_cost,
                mean_wall_time_s,
                std_wall_time_s,
                normalized_cost: None,
            });
        }
        for r in &mut graph_rows {
            r.normalized_cost = base.filter(|_| r.runs > r.errors).map(|b| r.mean_cost / b);
        }
        rows.extend(graph_rows);
    }
    rows
}

fn fit_scaling(cfg: &BenchConfig, records: &[RunRecord]) -> Vec<ScalingFit> {
    cfg.algorithms
        .iter()
        .filter_map(|&algo| {
            let ok: Vec<&RunRecord> = records.iter().filter(|r| r.algo == algo && r.error.is_none()).collect();
            let xs: Vec<f64> = ok.iter().map(|r| r.m as f64).collect();
            let ys: Vec<f64> = ok.iter().map(|r| r.wall_time_s).collect();
            loglog_slope(&xs, &ys).map(|slope| ScalingFit { algo, slope, points: ok.len() })
        })
        .collect()
}
