//! Recursive weighted sparsest cut on contracted graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{sparsity_of, ContractedGraph, Graph, VertexSet};
use crate::spectral::{bottom_eigs, EigenOptions};
use crate::tree::{Arena, HcTree};

/// Largest contracted graph cut by exhaustive enumeration (`2^21` subsets).
pub const EXACT_CUT_CAP: usize = 22;

/// Exact minimum-sparsity cut. The returned side always contains vertex 0;
/// among equally sparse cuts it is the lexicographically smallest member list.
pub fn min_sparsity_cut(h: &ContractedGraph) -> Result<(VertexSet, f64)> {
    let k = h.k();
    if k < 2 {
        return Err(Error::Degenerate);
    }
    if k > EXACT_CUT_CAP {
        return Err(Error::TooLargeForExact { size: k, cap: EXACT_CUT_CAP });
    }
    let full = (1u32 << k) - 1;
    let mut best = (f64::INFINITY, 0u32);
    // odd masks are exactly the sets containing vertex 0
    for s in (1..full).step_by(2) {
        let sp = sparsity_of(h, |i| s >> i & 1 == 1);
        if sp < best.0 || (sp == best.0 && lex_less(s, best.1)) {
            best = (sp, s);
        }
    }
    let set = VertexSet::new((0..k).filter(|&i| best.1 >> i & 1 == 1));
    Ok((set, best.0))
}

/// Lexicographic order on the sorted member lists of two bitmask sets.
fn lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let i = diff.trailing_zeros();
    let (has, lacks) = if a >> i & 1 == 1 { (a, b) } else { (b, a) };
    // the set holding `i` is smaller unless the other one ends before `i`
    let has_smaller = lacks >> i != 0;
    if has == a { has_smaller } else { !has_smaller }
}

/// Spectral sweep on the edge weights of `h`, scored by weighted sparsity.
/// No optimality guarantee. Disconnected inputs return the component of
/// vertex 0 (sparsity 0).
pub fn min_sparsity_cut_heuristic(h: &ContractedGraph) -> Result<(VertexSet, f64)> {
    let k = h.k();
    if k < 2 {
        return Err(Error::Degenerate);
    }
    let g = Graph::from_edges(k, h.pairs()).expect("contracted pairs are valid edges");
    let (count, labels) = g.components();
    let side: Vec<usize> = if count > 1 {
        (0..k).filter(|&i| labels[i] == labels[0]).collect()
    } else {
        sweep_order_cut(h, &g)
    };
    let mut set = VertexSet::new(side);
    if !set.contains(0) {
        set = set.complement(k);
    }
    let mask = set.mask(k);
    let sp = sparsity_of(h, |i| mask[i]);
    Ok((set, sp))
}

fn sweep_order_cut(h: &ContractedGraph, g: &Graph) -> Vec<usize> {
    let k = g.n();
    let report = bottom_eigs(g, 2, &EigenOptions::default())
        .or_else(|_| bottom_eigs(g, 2, &EigenOptions { dense_threshold: usize::MAX, ..Default::default() }))
        .expect("dense eigensolve of a connected graph");
    let f2 = &report.eigenvectors[1];
    let score: Vec<f64> = (0..k).map(|u| f2[u] / g.degree(u).sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));

    let total_w = h.total_vertex_weight();
    let mut inside = vec![false; k];
    let (mut cut, mut ws) = (0.0, 0usize);
    let mut best = (f64::INFINITY, 1);
    for (i, &u) in order[..k - 1].iter().enumerate() {
        let to_inside: f64 = g.neighbors(u).filter(|&(v, _)| inside[v]).map(|(_, w)| w).sum();
        cut += g.degree(u) - 2.0 * to_inside;
        ws += h.vertex_weight(u);
        inside[u] = true;
        let sp = cut.max(0.0) / (ws as f64 * (total_w - ws) as f64);
        if sp < best.0 {
            best = (sp, i + 1);
        }
    }
    order[..best.1].to_vec()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WrscStats {
    /// Longest root-to-leaf chain of cuts.
    pub depth: usize,
    pub exact_cuts: usize,
    pub heuristic_cuts: usize,
}

/// Recursively splits along minimum-sparsity cuts (exact up to
/// [`EXACT_CUT_CAP`] vertices, spectral sweep beyond). Leaves are the
/// vertices of `h`.
pub fn wrsc_tree(h: &ContractedGraph) -> Result<HcTree> {
    wrsc_tree_with_stats(h).map(|(t, _)| t)
}

pub fn wrsc_tree_with_stats(h: &ContractedGraph) -> Result<(HcTree, WrscStats)> {
    if h.k() == 0 {
        return Err(Error::EmptyLeafSet);
    }
    let mut arena = Arena::default();
    let mut stats = WrscStats::default();
    let root = split(h, (0..h.k()).collect(), 0, &mut arena, &mut stats)?;
    Ok((arena.finish(root)?, stats))
}

fn split(h: &ContractedGraph, members: Vec<usize>, depth: usize, arena: &mut Arena, stats: &mut WrscStats) -> Result<usize> {
    stats.depth = stats.depth.max(depth);
    if members.len() == 1 {
        return Ok(arena.leaf(members[0]));
    }
    let sub = h.induced(&members);
    let (side, _) = if sub.k() <= EXACT_CUT_CAP {
        stats.exact_cuts += 1;
        min_sparsity_cut(&sub)?
    } else {
        stats.heuristic_cuts += 1;
        min_sparsity_cut_heuristic(&sub)?
    };
    let mask = side.mask(sub.k());
    let (left, right): (Vec<usize>, Vec<usize>) = (0..sub.k()).partition(|&i| mask[i]);
    let left = left.into_iter().map(|i| members[i]).collect();
    let right = right.into_iter().map(|i| members[i]).collect();
    let l = split(h, left, depth + 1, arena, stats)?;
    let r = split(h, right, depth + 1, arena, stats)?;
    Ok(arena.internal(l, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::weighted_sparsity;
    use crate::tree::{brute_force_wopt, lca, weighted_dasgupta_cost};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Double loop over all cuts containing 0 and all vertex pairs.
    fn oracle(h: &ContractedGraph) -> f64 {
        let k = h.k();
        let mut best = f64::INFINITY;
        for s in 1u32..(1 << k) - 1 {
            if s & 1 == 0 {
                continue;
            }
            let mut cut = 0.0;
            for i in 0..k {
                for j in i + 1..k {
                    if (s >> i & 1) != (s >> j & 1) {
                        cut += h.weight(i, j);
                    }
                }
            }
            let ws: usize = (0..k).filter(|&i| s >> i & 1 == 1).map(|i| h.vertex_weight(i)).sum();
            let wc = h.total_vertex_weight() - ws;
            best = best.min(cut / (ws as f64 * wc as f64));
        }
        best
    }

    fn random_contracted(rng: &mut ChaCha8Rng, k: usize, density: f64) -> ContractedGraph {
        let vw = (0..k).map(|_| rng.random_range(1..20)).collect();
        let mut e = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                if rng.random::<f64>() < density {
                    e.push((i, j, rng.random_range(0.01..10.0)));
                }
            }
        }
        ContractedGraph::new(vw, &e).unwrap()
    }

    #[test]
    fn two_vertices() {
        let h = ContractedGraph::new(vec![2, 1], &[(0, 1, 2.0)]).unwrap();
        let (s, sp) = min_sparsity_cut(&h).unwrap();
        assert_eq!(s.members(), &[0]);
        assert_eq!(sp, 1.0);
    }

    #[test]
    fn path_of_three() {
        let h = ContractedGraph::new(vec![1, 1, 1], &[(0, 1, 1.0), (1, 2, 0.1)]).unwrap();
        let (s, sp) = min_sparsity_cut(&h).unwrap();
        // normalised to hold vertex 0, i.e. the complement of {2}
        assert_eq!(s.members(), &[0, 1]);
        assert_eq!(sp, 0.1 / 2.0);
    }

    #[test]
    fn disconnected_has_zero_cut() {
        let h = ContractedGraph::new(vec![1, 1, 1, 1], &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let (s, sp) = min_sparsity_cut(&h).unwrap();
        assert_eq!(sp, 0.0);
        assert_eq!(s.members(), &[0, 1]);
    }

    #[test]
    fn degenerate_and_too_large() {
        assert_eq!(min_sparsity_cut(&ContractedGraph::new(vec![3], &[]).unwrap()).unwrap_err(), Error::Degenerate);
        let big = ContractedGraph::new(vec![1; 23], &[]).unwrap();
        assert_eq!(min_sparsity_cut(&big).unwrap_err(), Error::TooLargeForExact { size: 23, cap: 22 });
    }

    #[test]
    fn ties_go_to_lexicographically_smallest() {
        // uniform complete graph: every cut has sparsity 1
        let e: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, 1.0))).collect();
        let h = ContractedGraph::new(vec![1; 4], &e).unwrap();
        let (s, sp) = min_sparsity_cut(&h).unwrap();
        assert_eq!(s.members(), &[0]);
        assert_eq!(sp, 1.0);
        assert!(lex_less(0b0011, 0b0101));
        assert!(lex_less(0b0011, 0b0111));
        assert!(!lex_less(0b0111, 0b0011));
        assert!(lex_less(0b0101, 0b1001));
    }

    #[test]
    fn matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let k = rng.random_range(2..=10);
            let h = random_contracted(&mut rng, k, 0.5);
            let (s, sp) = min_sparsity_cut(&h).unwrap();
            assert_eq!(sp, oracle(&h));
            assert_eq!(weighted_sparsity(&h, &s).unwrap(), sp);
        }
    }

    #[test]
    fn heuristic_never_beats_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let k = rng.random_range(2..=15);
            let h = random_contracted(&mut rng, k, 0.6);
            let (s, hs) = min_sparsity_cut_heuristic(&h).unwrap();
            assert!(s.contains(0) && s.len() < k);
            assert!(hs >= min_sparsity_cut(&h).unwrap().1);
        }
    }

    #[test]
    fn heuristic_finds_component_split() {
        let mut e = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    e.push((base + i, base + j, 10.0));
                }
            }
        }
        e.push((4, 5, 0.1));
        let h = ContractedGraph::new(vec![1; 10], &e).unwrap();
        let (s, _) = min_sparsity_cut_heuristic(&h).unwrap();
        assert_eq!(s.members(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn heuristic_on_uniform_complete_graph() {
        let e: Vec<_> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j, 1.0))).collect();
        let h = ContractedGraph::new(vec![1; 6], &e).unwrap();
        let (_, sp) = min_sparsity_cut_heuristic(&h).unwrap();
        assert!((sp - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tree_examples() {
        let one = ContractedGraph::new(vec![4], &[]).unwrap();
        assert_eq!(wrsc_tree(&one).unwrap().node_count(), 1);

        let h = ContractedGraph::new(vec![1, 1, 1], &[(0, 1, 5.0), (1, 2, 0.2), (0, 2, 0.1)]).unwrap();
        let (t, stats) = wrsc_tree_with_stats(&h).unwrap();
        assert_eq!(t.size(lca(&t, 0, 1).unwrap()), 2);
        assert_eq!(lca(&t, 0, 2).unwrap(), t.root());
        assert_eq!(stats, WrscStats { depth: 2, exact_cuts: 2, heuristic_cuts: 0 });
    }

    #[test]
    fn within_six_times_wopt() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let k = rng.random_range(1..=6);
            let h = random_contracted(&mut rng, k, 0.7);
            let t = wrsc_tree(&h).unwrap();
            assert!(t.is_bijective());
            let (_, wopt) = brute_force_wopt(&h).unwrap();
            let cost = weighted_dasgupta_cost(&h, &t).unwrap();
            assert!(cost <= 6.0 * wopt + 1e-9, "{cost} vs {wopt}");
        }
    }
}
