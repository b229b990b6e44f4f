//! Property tests over random graphs, trees and partitions.
//!
//! Edge weights are dyadic (`j / 8`) so that sums are exact in any order and
//! identities can be checked with `==`.

use proptest::prelude::*;

use spechc::algorithms::{run, AlgoConfig, Algorithm};
use spechc::bucketing::{bucket_from_max_volume, bucket_from_min_degree, Beta};
use spechc::generators::{gaussian_kernel_graph, gen_random_connected, gen_random_tree, gen_sbm};
use spechc::graph::{conductance, contract, cut_weight, ContractedGraph, Graph, Partition, VertexSet};
use spechc::oracle::{naive_conductance, naive_dasgupta_cost, naive_max_bucket_volume, naive_min_sparsity};
use spechc::spectral::spectral_clustering;
use spechc::tree::{dasgupta_cost, HcTree};
use spechc::wrsc::{min_sparsity_cut, wrsc_tree};

fn dyadic_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::btree_map((0..n, 0..n), 1u32..=32, 1..=n * (n - 1) / 2).prop_map(move |m| {
            let edges: Vec<(usize, usize, f64)> = m
                .into_iter()
                .filter(|&((u, v), _)| u < v)
                .map(|((u, v), w)| (u, v, w as f64 / 8.0))
                .collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn graph_and_labels(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    dyadic_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(0..3usize, n))
    })
}

fn graph_and_tree(max_n: usize) -> impl Strategy<Value = (Graph, HcTree)> {
    (dyadic_graph(max_n), any::<u64>()).prop_map(|(g, seed)| {
        let t = gen_random_tree(g.n(), seed).unwrap();
        (g, t)
    })
}

fn compact(labels: &[usize]) -> Vec<usize> {
    let mut seen = Vec::new();
    labels
        .iter()
        .map(|l| {
            seen.iter().position(|x| x == l).unwrap_or_else(|| {
                seen.push(*l);
                seen.len() - 1
            })
        })
        .collect()
}

fn contracted(max_k: usize) -> impl Strategy<Value = ContractedGraph> {
    (2..=max_k).prop_flat_map(|k| {
        (prop::collection::vec(1usize..=6, k), prop::collection::vec(0u32..=16, k * (k - 1) / 2)).prop_map(
            move |(vw, ws)| {
                let mut edges = Vec::new();
                let mut it = ws.into_iter();
                for i in 0..k {
                    for j in i + 1..k {
                        let w = it.next().unwrap();
                        if w > 0 {
                            edges.push((i, j, w as f64 / 4.0));
                        }
                    }
                }
                ContractedGraph::new(vw, &edges).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partition_volumes_sum_to_total((g, labels) in graph_and_labels(12)) {
        let part = Partition::from_labels(&compact(&labels)).unwrap();
        let sum: f64 = part.parts().iter().map(|p| g.volume(p)).sum();
        prop_assert_eq!(sum, g.total_volume());
    }

    #[test]
    fn cut_symmetry_and_conductance((g, labels) in graph_and_labels(12)) {
        let s = VertexSet::new((0..g.n()).filter(|&u| labels[u] == 0));
        let rest = s.complement(g.n());
        let st = cut_weight(&g, &s, &rest).unwrap();
        prop_assert_eq!(st, cut_weight(&g, &rest, &s).unwrap());
        let phi = conductance(&g, &s).unwrap();
        prop_assert_eq!(phi, naive_conductance(&g, &s));
        if !s.is_empty() && s.len() < g.n() && g.volume(&s) > 0.0 {
            prop_assert!((phi * g.volume(&s) - st).abs() <= 1e-12 * st.max(1.0));
        }
    }

    #[test]
    fn contraction_conserves_weight((g, labels) in graph_and_labels(12)) {
        let part = Partition::from_labels(&compact(&labels)).unwrap();
        let h = contract(&g, &part).unwrap();
        let crossing: f64 = h.pairs().iter().map(|p| p.2).sum();
        let inside: f64 = (0..h.k()).map(|i| h.internal_weight(i)).sum();
        prop_assert_eq!(crossing, g.total_weight() - inside);
        prop_assert_eq!(h.total_vertex_weight(), g.n());
    }

    #[test]
    fn cost_matches_naive_oracle((g, t) in graph_and_tree(24)) {
        prop_assert_eq!(Some(dasgupta_cost(&g, &t).unwrap()), naive_dasgupta_cost(&g, &t));
    }

    #[test]
    fn child_swap_keeps_cost((g, t) in graph_and_tree(16), pick in any::<prop::sample::Index>()) {
        let internal: Vec<usize> = (0..t.node_count()).filter(|&x| !t.is_leaf(x)).collect();
        let node = internal[pick.index(internal.len())];
        let swapped = t.swap_children(node);
        prop_assert_ne!(swapped.leaf_order(), t.leaf_order());
        prop_assert_eq!(dasgupta_cost(&g, &swapped).unwrap(), dasgupta_cost(&g, &t).unwrap());
    }

    #[test]
    fn cost_is_linear_in_weights((g, t) in graph_and_tree(16), exp in -4i32..=6) {
        let c = 2f64.powi(exp);
        let edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w * c)).collect();
        let scaled = Graph::from_edges(g.n(), &edges).unwrap();
        prop_assert_eq!(dasgupta_cost(&scaled, &t).unwrap(), c * dasgupta_cost(&g, &t).unwrap());
    }

    #[test]
    fn trivial_upper_bound((g, t) in graph_and_tree(24)) {
        prop_assert!(dasgupta_cost(&g, &t).unwrap() <= g.n() as f64 * g.total_volume() / 2.0);
    }

    #[test]
    fn bucketing_partitions_cluster((g, labels) in graph_and_labels(14), exp in 1u32..=4) {
        // ratios are relative to the anchor degree, so keep to positive degrees
        let cluster = VertexSet::new((0..g.n()).filter(|&u| labels[u] != 1 && g.degree(u) > 0.0));
        prop_assume!(!cluster.is_empty());
        let beta = Beta::new(2f64.powi(exp as i32)).unwrap();
        for b in [bucket_from_min_degree(&g, &cluster, beta).unwrap(), bucket_from_max_volume(&g, &cluster, beta).unwrap()] {
            let mut all: Vec<usize> = b.buckets.iter().flat_map(|x| x.members.iter().copied()).collect();
            let total = all.len();
            all.sort_unstable();
            all.dedup();
            prop_assert_eq!(total, all.len());
            prop_assert_eq!(&all[..], cluster.members());
            for bucket in &b.buckets {
                let degs: Vec<f64> = bucket.members.iter().map(|&u| g.degree(u)).collect();
                let (lo, hi) = degs.iter().fold((f64::INFINITY, 0f64), |(a, b), &d| (a.min(d), b.max(d)));
                prop_assert!(hi < beta.value() * lo);
            }
        }
        let again = bucket_from_max_volume(&g, &cluster, beta).unwrap();
        prop_assert_eq!(&again, &bucket_from_max_volume(&g, &cluster, beta).unwrap());
        let anchor_vol: f64 = again.buckets.iter().find(|x| x.j == 0).unwrap().members.iter().map(|&u| g.degree(u)).sum();
        prop_assert_eq!(anchor_vol, naive_max_bucket_volume(&g, &cluster, beta));
    }

    #[test]
    fn exact_cut_matches_double_loop(h in contracted(10)) {
        let (s, phi) = min_sparsity_cut(&h).unwrap();
        prop_assert!(!s.is_empty() && s.len() < h.k());
        prop_assert_eq!(phi.to_bits(), naive_min_sparsity(&h).to_bits());
    }

    #[test]
    fn wrsc_leaves_are_contracted_vertices(h in contracted(9)) {
        let t = wrsc_tree(&h).unwrap();
        let mut order = t.leaf_order();
        order.sort_unstable();
        prop_assert_eq!(order, (0..h.k()).collect::<Vec<_>>());
    }

    #[test]
    fn kernel_weights_in_unit_interval(pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 2..20)) {
        let g = gaussian_kernel_graph(&pts, 1.0, 0.0).unwrap();
        for e in g.edges() {
            prop_assert!(e.w > 0.0 && e.w <= 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn algorithms_emit_bijective_bounded_deterministic_trees(n in 6usize..30, seed in any::<u64>()) {
        let g = gen_random_connected(n, 0.3, 0.5, 4.0, seed).unwrap();
        for algo in Algorithm::ALL {
            let cfg = AlgoConfig::new(algo, 2, seed);
            let a = run(&g, &cfg).unwrap();
            prop_assert_eq!(a.tree.n_leaves(), n);
            prop_assert!(a.tree.is_bijective());
            prop_assert!(a.cost <= n as f64 * g.total_volume() / 2.0);
            prop_assert_eq!(a.cost, dasgupta_cost(&g, &a.tree).unwrap());
            let b = run(&g, &cfg).unwrap();
            prop_assert_eq!(a.tree.to_json(), b.tree.to_json());
        }
    }

    #[test]
    fn spectral_clustering_is_permutation_equivariant(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let (g, _) = gen_sbm(3, 15, 0.9, 0.01, seed).unwrap();
        prop_assume!(g.is_connected());
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (perm[e.u], perm[e.v], e.w)).collect();
        let h = Graph::from_edges(n, &edges).unwrap();
        let a = spectral_clustering(&g, 3, 0).unwrap();
        let b = spectral_clustering(&h, 3, 0).unwrap();
        // same partition up to renaming of parts
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(a.label(u) == a.label(v), b.label(perm[u]) == b.label(perm[v]));
            }
        }
    }

    #[test]
    fn generators_are_reproducible(seed in any::<u64>()) {
        let (a, pa) = gen_sbm(3, 20, 0.3, 0.05, seed).unwrap();
        let (b, pb) = gen_sbm(3, 20, 0.3, 0.05, seed).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
        prop_assert_eq!(pa.labels(), pb.labels());
    }
}
