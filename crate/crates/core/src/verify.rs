//! Self-check suite: every oracle comparison and invariant, with
//! counterexamples on failure.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{k_sweep, spec_wrsc_trace, AlgoConfig, Algorithm, SpecWrscTrace};
use crate::bucketing::{auto_gamma, bucket_count_bound_check, bucket_from_max_volume, Beta};
use crate::graph::{graph_conductance_exact, induced_subgraph, ContractedGraph, Edge, Graph, VertexSet};
use crate::oracle::{naive_dasgupta_cost, naive_max_bucket_volume, naive_min_sparsity};
use crate::spectral::{bottom_eigs, sweep_cut, EigenOptions};
use crate::tree::{
    balanced_tree, brute_force_opt, dasgupta_cost, edge_costs, lca, subtree_weights, weighted_dasgupta_cost,
};
use crate::wrsc::min_sparsity_cut;
use crate::{generators, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failure: Option<String>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {} ({} cases)", self.name, self.cases),
            Some(why) => write!(f, "FAIL {} after {} cases: {}", self.name, self.cases, why),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| c.failure.is_some()).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// A crossing edge whose cost in the final tree disagrees with its
/// contribution to the weighted cost of the contracted tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingWitness {
    pub edge: Edge,
    /// `w_e · size(lca)` read from the final tree.
    pub tree_cost: f64,
    /// `w_e ·` (vertex weight under the lca of the two buckets).
    pub contracted_cost: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for CrossingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "edge ({}, {}, w={}) costs {} in the tree but {} in the contracted tree; sums {} vs {}",
            self.edge.u, self.edge.v, self.edge.w, self.tree_cost, self.contracted_cost, self.lhs, self.rhs
        )
    }
}

/// Sum of tree costs over edges between different buckets, and the weighted
/// cost of the contracted tree.
pub fn crossing_identity_sides(g: &Graph, trace: &SpecWrscTrace) -> Result<(f64, f64)> {
    let costs = edge_costs(g, &trace.tree)?;
    let lhs = g
        .edges()
        .iter()
        .zip(&costs)
        .filter(|(e, _)| trace.buckets.label(e.u) != trace.buckets.label(e.v))
        .map(|(_, c)| c)
        .sum();
    let rhs = weighted_dasgupta_cost(&trace.contracted, &trace.contracted_tree)?;
    Ok((lhs, rhs))
}

/// Checks the crossing-cost identity within `1e-9 · vol(G)`; on failure
/// returns the first crossing edge whose two costs differ.
pub fn check_crossing_identity(g: &Graph, trace: &SpecWrscTrace) -> std::result::Result<(), CrossingWitness> {
    let (lhs, rhs) = crossing_identity_sides(g, trace).expect("trace trees cover their graphs");
    if (lhs - rhs).abs() <= 1e-9 * g.total_volume() {
        return Ok(());
    }
    let costs = edge_costs(g, &trace.tree).expect("tree covers graph");
    let th = &trace.contracted_tree;
    let acc = subtree_weights(th, trace.contracted.vertex_weights());
    let mut worst: Option<CrossingWitness> = None;
    for (e, &c) in g.edges().iter().zip(&costs) {
        let (a, b) = (trace.buckets.label(e.u), trace.buckets.label(e.v));
        if a == b {
            continue;
        }
        let expected = e.w * acc[lca(th, a, b).expect("bucket leaves")] as f64;
        let w = CrossingWitness { edge: *e, tree_cost: c, contracted_cost: expected, lhs, rhs };
        if c != expected {
            return Err(w);
        }
        worst.get_or_insert(w);
    }
    Err(worst.expect("sums differ, so some crossing edge exists"))
}

/// `COST = Σ_B COST_{G[B]}(T_B) + Σ_{crossing e} cost(e)`, with every term
/// recomputed from scratch. Returns both sides.
pub fn decomposition_sides(g: &Graph, trace: &SpecWrscTrace) -> Result<(f64, f64)> {
    let mut inside = 0.0;
    for b in trace.bucketings.iter().flat_map(|x| &x.buckets) {
        let sub = induced_subgraph(g, &b.set())?;
        let local: Vec<usize> = b.members.iter().map(|u| sub.original.binary_search(u).expect("member")).collect();
        inside += dasgupta_cost(&sub.graph, &balanced_tree(&local)?)?;
    }
    let (crossing, _) = crossing_identity_sides(g, trace)?;
    Ok((trace.cost, inside + crossing))
}

struct Check {
    name: &'static str,
    cases: usize,
    failure: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Check {
        Check { name, cases: 0, failure: None }
    }

    /// Records one case; keeps only the first failure.
    fn case(&mut self, ok: bool, why: impl FnOnce() -> String) {
        if self.failure.is_some() {
            return;
        }
        self.cases += 1;
        if !ok {
            self.failure = Some(why());
        }
    }

    fn error(&mut self, context: impl fmt::Display, e: crate::Error) {
        self.case(false, || format!("{context}: {e}"));
    }

    fn done(self) -> CheckResult {
        CheckResult { name: self.name, cases: self.cases, failure: self.failure }
    }
}

fn edges_of(g: &Graph) -> String {
    let list: Vec<String> = g.edges().iter().map(|e| format!("({},{},{})", e.u, e.v, e.w)).collect();
    format!("n={} edges=[{}]", g.n(), list.join(","))
}

/// Connected graphs the end-to-end checks run on, with a descriptor.
fn suite_graphs(quick: bool) -> Vec<(String, Graph, usize)> {
    let mut out = Vec::new();
    let seeds = if quick { 2 } else { 5 };
    let first_connected = |make: &dyn Fn(u64) -> Graph, seed: u64| -> (Graph, u64) {
        (seed..seed + 100).map(|s| (make(s), s)).find(|(g, _)| g.is_connected()).expect("a connected draw")
    };
    for s in 0..seeds {
        let (g, used) = first_connected(&|x| generators::gen_sbm(3, 40, 0.3, 0.01, x).unwrap().0, s * 100);
        out.push((format!("sbm(3,40,0.3,0.01,seed={used})"), g, 3));
        let (g, used) = first_connected(&|x| generators::gen_sbm(5, 60, 0.2, 0.004, x).unwrap().0, s * 100);
        out.push((format!("sbm(5,60,0.2,0.004,seed={used})"), g, 5));
        let (g, used) = first_connected(&|x| generators::gen_hsbm(40, 0.3, 0.005, x).unwrap().0, s * 100);
        out.push((format!("hsbm(40,0.3,0.005,seed={used})"), g, 5));
        let g = generators::gen_random_connected(40, 0.1, 0.1, 10.0, s).unwrap();
        out.push((format!("random(40,0.1,seed={s})"), g, 2 + s as usize % 3));
    }
    if !quick {
        let (g, used) = first_connected(&|x| generators::gen_sbm(5, 200, 0.1, 0.002, x).unwrap().0, 0);
        out.push((format!("sbm(5,200,0.1,0.002,seed={used})"), g, 5));
    }
    out
}

/// Runs every check. `quick` trims case counts to finish well under a minute.
pub fn verify_suite(quick: bool) -> VerifyReport {
    let scale = |full: usize, small: usize| if quick { small } else { full };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = Vec::new();

    // small graphs against the exhaustive optimum
    let mut opt_gap = Check::new("spec_wrsc within 3x of exhaustive OPT (n <= 8, k-sweep to 4)");
    let mut degree_bound = Check::new("OPT >= (2 Phi / 9) max(vol^2 / Delta, delta n^2) (n <= 8)");
    let mut cost_ceiling = Check::new("every cost <= n vol / 2");
    for i in 0..scale(200, 30) {
        let n = rng.random_range(3..=8);
        let g = generators::gen_random_connected(n, 0.4, 0.1, 10.0, rng.random()).unwrap();
        let (_, opt) = match brute_force_opt(&g) {
            Ok(x) => x,
            Err(e) => {
                opt_gap.error(edges_of(&g), e);
                continue;
            }
        };
        match k_sweep(&g, 4, &AlgoConfig::new(Algorithm::SpecWrsc, 2, i as u64)) {
            Ok(s) => {
                opt_gap.case(s.cost >= opt * (1.0 - 1e-12) && s.cost <= 3.0 * opt * (1.0 + 1e-12), || {
                    format!("{}: cost {} vs OPT {}", edges_of(&g), s.cost, opt)
                });
                let bound = n as f64 * g.total_volume() / 2.0;
                cost_ceiling.case(s.cost <= bound, || format!("{}: cost {} > {}", edges_of(&g), s.cost, bound));
            }
            Err(e) => opt_gap.error(edges_of(&g), e),
        }
        let (phi, _) = graph_conductance_exact(&g).expect("connected small graph");
        let vol = g.total_volume();
        let bound = 2.0 * phi / 9.0 * f64::max(vol * vol / g.max_degree(), g.min_degree() * (n * n) as f64);
        degree_bound.case(opt >= bound * (1.0 - 1e-9), || format!("{}: OPT {} < bound {}", edges_of(&g), opt, bound));
    }

    let mut engine = Check::new("O(m D) cost engine equals ancestor-set oracle");
    for _ in 0..scale(500, 60) {
        let n = rng.random_range(2..=64);
        let g = generators::gen_random_connected(n, rng.random_range(0.0..0.3), 0.1, 10.0, rng.random()).unwrap();
        let t = generators::gen_random_tree(n, rng.random()).unwrap();
        let fast = dasgupta_cost(&g, &t).unwrap();
        let slow = naive_dasgupta_cost(&g, &t).unwrap();
        engine.case(fast == slow, || format!("{}: {} vs {}", edges_of(&g), fast, slow));
    }

    let mut exact_cut = Check::new("min_sparsity_cut equals double-loop enumeration (|V| <= 12)");
    for _ in 0..scale(200, 40) {
        let k = rng.random_range(2..=12);
        let h = random_contracted(&mut rng, k);
        let fast = min_sparsity_cut(&h).map(|x| x.1);
        let slow = naive_min_sparsity(&h);
        exact_cut.case(fast.as_ref().is_ok_and(|&f| f == slow), || format!("k={k} pairs={:?}: {:?} vs {}", h.pairs(), fast, slow));
    }

    let mut cheeger = Check::new("lambda_2 / 2 <= Phi <= sqrt(2 lambda_2), spectrum in [0, 2]");
    let mut sweep = Check::new("sweep cut conductance <= sqrt(2 lambda_2)");
    for _ in 0..scale(50, 15) {
        let n = rng.random_range(2..=16);
        let g = generators::gen_random_connected(n, rng.random_range(0.0..0.5), 0.1, 10.0, rng.random()).unwrap();
        let rep = match bottom_eigs(&g, n, &EigenOptions::default()) {
            Ok(r) => r,
            Err(e) => {
                cheeger.error(edges_of(&g), e);
                continue;
            }
        };
        let l2 = rep.eigenvalues[1];
        let (phi, _) = graph_conductance_exact(&g).unwrap();
        let in_range = rep.eigenvalues.iter().all(|&l| (-1e-8..=2.0 + 1e-8).contains(&l));
        cheeger.case(in_range && l2 / 2.0 <= phi + 1e-9 && phi <= (2.0 * l2).sqrt() + 1e-9, || {
            format!("{}: lambda {:?}, Phi {}", edges_of(&g), rep.eigenvalues, phi)
        });
        let (_, sp) = sweep_cut(&g, &rep).unwrap();
        sweep.case(sp <= (2.0 * l2).sqrt() + 1e-6, || format!("{}: sweep {} lambda_2 {}", edges_of(&g), sp, l2));
    }

    let mut anchor = Check::new("max-volume anchor equals quadratic scan");
    for _ in 0..scale(100, 30) {
        let n = rng.random_range(1..=40);
        let g = generators::gen_random_connected(n, 0.2, 0.1, 10.0, rng.random()).unwrap();
        let cluster = VertexSet::new((0..n).filter(|_| rng.random::<f64>() < 0.7).chain([0]));
        let beta = Beta::new(rng.random_range(1.1..8.0)).unwrap();
        let b = bucket_from_max_volume(&g, &cluster, beta).unwrap();
        let got = b.buckets.iter().find(|x| x.j == 0).map_or(0.0, |x| x.members.iter().map(|&v| g.degree(v)).sum());
        let want = naive_max_bucket_volume(&g, &cluster, beta);
        anchor.case((got - want).abs() <= 1e-9 * want.max(1.0), || format!("{}: {} vs {}", edges_of(&g), got, want));
    }

    let mut identity = Check::new("crossing-cost identity on spec_wrsc runs");
    let mut decomposition = Check::new("cost = bucket costs + crossing costs");
    let mut bound = Check::new("bucket count <= k + ceil(log2 n) with auto gamma");
    let mut depth = Check::new("spec_wrsc depth <= 4 log2 n");
    for (name, g, k) in suite_graphs(quick) {
        let trace = match spec_wrsc_trace(&g, &AlgoConfig::new(Algorithm::SpecWrsc, k, 1)) {
            Ok(t) => t,
            Err(e) => {
                identity.error(&name, e);
                continue;
            }
        };
        let witness = check_crossing_identity(&g, &trace).err();
        identity.case(witness.is_none(), || format!("{name}: {}", witness.unwrap()));
        let (total, parts) = decomposition_sides(&g, &trace).unwrap();
        decomposition.case((total - parts).abs() <= 1e-9 * total.max(1.0), || format!("{name}: {total} vs {parts}"));
        bound.case(bucket_count_bound_check(&trace.bucketings, k, g.n()), || {
            format!("{name}: {} buckets, gamma {}", trace.buckets.k(), auto_gamma(&g))
        });
        let limit = 4.0 * (g.n() as f64).log2();
        depth.case(trace.tree.height() as f64 <= limit, || format!("{name}: depth {}", trace.tree.height()));
    }

    for c in [opt_gap, degree_bound, cost_ceiling, engine, exact_cut, cheeger, sweep, anchor, identity, decomposition, bound, depth] {
        checks.push(c.done());
    }
    VerifyReport { checks }
}

fn random_contracted(rng: &mut ChaCha8Rng, k: usize) -> ContractedGraph {
    let vw = (0..k).map(|_| rng.random_range(1..30)).collect();
    let density = rng.random_range(0.1..1.0);
    let mut e = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random::<f64>() < density {
                e.push((i, j, rng.random_range(0.01..10.0)));
            }
        }
    }
    ContractedGraph::new(vw, &e).expect("positive vertex weights")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let report = verify_suite(true);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn size_mutation_yields_witness() {
        let (g, _) = generators::gen_sbm(3, 30, 0.4, 0.01, 1).unwrap();
        let mut trace = spec_wrsc_trace(&g, &AlgoConfig::new(Algorithm::SpecWrsc, 3, 0)).unwrap();
        assert!(check_crossing_identity(&g, &trace).is_ok());
        let root = trace.tree.root();
        let size = trace.tree.size(root);
        trace.tree.set_size_unchecked(root, size + 1);
        let w = check_crossing_identity(&g, &trace).unwrap_err();
        assert_ne!(trace.buckets.label(w.edge.u), trace.buckets.label(w.edge.v));
        assert_eq!(w.tree_cost, w.edge.w * (size + 1) as f64);
        assert_eq!(w.contracted_cost, w.edge.w * size as f64);
    }
}
