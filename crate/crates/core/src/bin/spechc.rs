use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spechc::algorithms::{k_sweep, run, spec_caterpillar_trace, spec_wrsc_trace, AlgoConfig, Algorithm, RunOutput};
use spechc::bench::{bench_matrix, BenchConfig};
use spechc::bucketing::{Beta, Bucketing};
use spechc::generators::{gaussian_kernel_graph, gen_hsbm, gen_sbm, DEFAULT_KERNEL_THRESHOLD};
use spechc::graph::{DuplicatePolicy, Graph, Partition};
use spechc::io::{parse_labeled_points_csv, read_edge_list, read_points_csv, write_edge_list, write_labels};
use spechc::spectral::{bottom_eigs, EigenOptions};
use spechc::verify::verify_suite;
use spechc::{Error, Result};

#[derive(Parser)]
#[command(name = "spechc", version, about = "Hierarchical clustering of well-clustered graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a hierarchical clustering tree for an edge-list graph.
    Cluster(ClusterArgs),
    /// Print the bottom of the normalized Laplacian spectrum as JSON.
    Spectrum(SpectrumArgs),
    /// Sample a stochastic block model.
    GenSbm(GenSbmArgs),
    /// Sample the five-block hierarchical block model.
    GenHsbm(GenHsbmArgs),
    /// Gaussian-kernel similarity graph over CSV points.
    KernelGraph(KernelArgs),
    /// Run an experiment matrix from a JSON config.
    Bench(BenchArgs),
    /// Run the built-in oracle and invariant checks.
    Verify {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Specwrsc,
    Caterpillar,
    Avglink,
    Balanced,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Specwrsc => Algorithm::SpecWrsc,
            AlgoArg::Caterpillar => Algorithm::SpecCaterpillar,
            AlgoArg::Avglink => Algorithm::AverageLinkage,
            AlgoArg::Balanced => Algorithm::BalancedRandom,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Edge list, one `u v w` line per edge.
    #[arg(long)]
    input: PathBuf,
    /// Sum the weights of repeated edges instead of rejecting them.
    #[arg(long)]
    merge_duplicates: bool,
}

impl InputArgs {
    fn load(&self) -> Result<Graph> {
        let policy = if self.merge_duplicates { DuplicatePolicy::Merge } else { DuplicatePolicy::Reject };
        read_edge_list(&self.input, policy)
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "specwrsc")]
    algo: AlgoArg,
    /// Number of clusters for the spectral step.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Bucket exponent; derived from the weight range when omitted.
    #[arg(long)]
    gamma: Option<f64>,
    /// Fixed bucket ratio for the caterpillar variant.
    #[arg(long, conflicts_with = "eta_sweep")]
    eta: Option<f64>,
    /// Try every k' in 1..=MAX and keep the cheapest tree.
    #[arg(long, value_name = "MAX", conflicts_with = "k")]
    k_sweep: Option<usize>,
    /// Sweep the caterpillar bucket ratio (the default without --eta).
    #[arg(long)]
    eta_sweep: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the tree as JSON; leaf `i` is the `i`-th vertex in input order.
    #[arg(long, value_name = "FILE.json")]
    output_tree: Option<PathBuf>,
    /// Include the Dasgupta cost in the report.
    #[arg(long)]
    emit_cost: bool,
    /// Write the degree buckets as JSON.
    #[arg(long, value_name = "FILE.json")]
    dump_buckets: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Report the gap after the k-th eigenvalue.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Eigenvalues to compute; defaults to k + 1.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenOutput {
    /// Edge list destination.
    #[arg(long)]
    output: PathBuf,
    /// Label sidecar; defaults to `<output>.labels`.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenSbmArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n_k: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    out: GenOutput,
}

#[derive(Args)]
struct GenHsbmArgs {
    #[arg(long)]
    n_k: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q_min: f64,
    #[command(flatten)]
    out: GenOutput,
}

#[derive(Args)]
struct KernelArgs {
    /// CSV of coordinates, one point per row.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_KERNEL_THRESHOLD)]
    threshold: f64,
    /// Zero-based column holding a class label; written to the sidecar.
    #[arg(long)]
    label_column: Option<usize>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for records.csv, records.jsonl, summary.csv and summary.json.
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    /// Overrides the worker count in the config.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Cluster(a) => cluster(&a),
        Cmd::Spectrum(a) => spectrum(&a),
        Cmd::GenSbm(a) => gen_sbm(a.k, a.n_k, a.p, a.q, a.out.seed).and_then(|(g, p)| emit_graph(&g, Some(&p), &a.out)),
        Cmd::GenHsbm(a) => gen_hsbm(a.n_k, a.p, a.q_min, a.out.seed).and_then(|(g, p)| emit_graph(&g, Some(&p), &a.out)),
        Cmd::KernelGraph(a) => kernel_graph(&a),
        Cmd::Bench(a) => bench(&a),
        Cmd::Verify { quick } => {
            let report = verify_suite(quick);
            println!("{}", report.to_string().trim_end());
            Ok(report.passed())
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cluster(a: &ClusterArgs) -> Result<bool> {
    let g = a.input.load()?;
    let algo = Algorithm::from(a.algo);
    let cfg = AlgoConfig { k: a.k, gamma: a.gamma, eta: a.eta, seed: a.seed, algorithm: algo };
    cfg.validate()?;
    let (out, k): (RunOutput, usize) = match a.k_sweep {
        Some(_) if matches!(algo, Algorithm::AverageLinkage | Algorithm::BalancedRandom) => {
            return Err(Error::BadConfig(format!("--k-sweep needs a spectral algorithm, not {algo}")));
        }
        Some(max) => {
            let s = k_sweep(&g, max, &cfg)?;
            (s.output, s.k)
        }
        None => (run(&g, &cfg)?, a.k),
    };
    if let Some(path) = &a.output_tree {
        let mut f = create(path)?;
        writeln!(f, "{}", out.tree.to_json())?;
        f.flush()?;
    }
    if let Some(path) = &a.dump_buckets {
        let bucketings = match algo {
            Algorithm::SpecWrsc if k >= 2 => spec_wrsc_trace(&g, &AlgoConfig { k, ..cfg })?.bucketings,
            Algorithm::SpecCaterpillar if k >= 2 => {
                let eta = out.stats.chosen_eta.or(a.eta).expect("caterpillar reports its ratio");
                let beta = if eta.is_finite() { Beta::new(eta)? } else { Beta::infinite() };
                spec_caterpillar_trace(&g, &AlgoConfig { k, ..cfg }, beta)?.bucketings
            }
            _ => Vec::new(),
        };
        let mut f = create(path)?;
        writeln!(f, "{}", buckets_json(&g, &bucketings))?;
        f.flush()?;
    }
    let mut report = json!({
        "algo": algo.tag(),
        "n": g.n(),
        "m": g.m(),
        "k": k,
        "seed": a.seed,
        "depth": out.tree.height(),
        "stats": out.stats,
    });
    if a.emit_cost {
        report["cost"] = json!(out.cost);
    }
    println!("{report}");
    Ok(true)
}

/// Buckets with members given by their input vertex ids.
fn buckets_json(g: &Graph, bucketings: &[Bucketing]) -> serde_json::Value {
    let clusters: Vec<_> = bucketings
        .iter()
        .enumerate()
        .map(|(c, b)| {
            let buckets: Vec<_> = b
                .buckets
                .iter()
                .map(|x| json!({ "j": x.j, "members": x.members.iter().map(|&u| g.label(u)).collect::<Vec<_>>() }))
                .collect();
            json!({
                "cluster": c,
                "anchor": g.label(b.anchor),
                "beta": b.beta.value(),
                "buckets": buckets,
            })
        })
        .collect();
    json!({ "clusters": clusters })
}

fn spectrum(a: &SpectrumArgs) -> Result<bool> {
    let g = a.input.load()?;
    let count = a.count.unwrap_or(a.k + 1);
    if count < a.k + 1 {
        return Err(Error::BadConfig(format!("count {count} leaves no eigenvalue after k = {}", a.k)));
    }
    let opts = EigenOptions { seed: a.seed, ..EigenOptions::default() };
    let report = bottom_eigs(&g, count, &opts)?;
    let out = json!({
        "n": g.n(),
        "m": g.m(),
        "k": a.k,
        "eigenvalues": report.eigenvalues,
        "gap": report.gap_at(a.k),
        "residual_norms": report.residual_norms,
    });
    println!("{out}");
    Ok(true)
}

fn sidecar(output: &Path, labels: &Option<PathBuf>) -> PathBuf {
    labels.clone().unwrap_or_else(|| {
        let mut s = output.as_os_str().to_owned();
        s.push(".labels");
        PathBuf::from(s)
    })
}

fn emit_graph(g: &Graph, part: Option<&Partition>, out: &GenOutput) -> Result<bool> {
    let mut f = create(&out.output)?;
    write_edge_list(g, &mut f)?;
    f.flush()?;
    if let Some(part) = part {
        let mut f = create(&sidecar(&out.output, &out.labels))?;
        write_labels(g, part, &mut f)?;
        f.flush()?;
    }
    eprintln!("wrote {} vertices, {} edges to {}", g.n(), g.m(), out.output.display());
    Ok(true)
}

fn kernel_graph(a: &KernelArgs) -> Result<bool> {
    let (points, labels) = match a.label_column {
        Some(col) => {
            let f = File::open(&a.input)
                .map_err(|e| Error::GraphLoad { path: a.input.display().to_string(), msg: e.to_string() })?;
            let (p, l) = parse_labeled_points_csv(f, col)?;
            (p, Some(l))
        }
        None => (read_points_csv(&a.input)?, None),
    };
    let g = gaussian_kernel_graph(&points, a.sigma, a.threshold)?;
    let mut f = create(&a.output)?;
    write_edge_list(&g, &mut f)?;
    f.flush()?;
    if let Some(labels) = labels {
        // rows dropped by the threshold have no vertex, so go through labels
        let mut f = create(&sidecar(&a.output, &a.labels))?;
        for u in 0..g.n() {
            writeln!(f, "{} {}", g.label(u), labels[g.label(u) as usize])?;
        }
        f.flush()?;
    }
    eprintln!("wrote {} vertices, {} edges to {}", g.n(), g.m(), a.output.display());
    Ok(true)
}

fn bench(a: &BenchArgs) -> Result<bool> {
    let text = fs::read_to_string(&a.config).map_err(|e| Error::ConfigParse(format!("{}: {e}", a.config.display())))?;
    let mut cfg = BenchConfig::from_json(&text)?;
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    let out = bench_matrix(&cfg)?;
    fs::create_dir_all(&a.out_dir)?;
    let mut f = create(&a.out_dir.join("records.csv"))?;
    out.write_csv(&mut f)?;
    f.flush()?;
    let mut f = create(&a.out_dir.join("records.jsonl"))?;
    out.write_jsonl(&mut f)?;
    f.flush()?;
    let mut f = create(&a.out_dir.join("summary.csv"))?;
    out.write_summary_csv(&mut f)?;
    f.flush()?;
    let summary = json!({ "summary": out.summary, "scaling": out.scaling });
    fs::write(a.out_dir.join("summary.json"), serde_json::to_string_pretty(&summary).expect("summary serialises"))?;
    let stdout = io::stdout();
    out.write_summary_csv(stdout.lock())?;
    for fit in &out.scaling {
        println!("# {} log-log slope of wall time vs m: {:.3} ({} runs)", fit.algo, fit.slope, fit.points);
    }
    for r in out.records.iter().filter(|r| r.error.is_some()) {
        eprintln!("cell {} / {} / seed {} failed: {}", r.graph, r.algo, r.seed, r.error.as_deref().unwrap_or(""));
    }
    Ok(!out.any_errors())
}
