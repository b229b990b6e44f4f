use super::{Arena, HcTree};
use crate::error::{Error, Result};
use crate::graph::{ContractedGraph, Graph};

/// Largest vertex count accepted by the exhaustive optimisers (`3^n` work).
pub const BRUTE_FORCE_MAX_N: usize = 12;

/// Exact `OPT_G` and an optimal tree.
///
/// Subset dynamic programme over `2^n` vertex sets:
/// `OPT(S) = min over splits (S1, S2) of w(S1, S2)·|S| + OPT(S1) + OPT(S2)`.
/// Every binary tree is a recursive bipartition, so this is the minimum over
/// all trees.
pub fn brute_force_opt(g: &Graph) -> Result<(HcTree, f64)> {
    let n = g.n();
    let mut w = vec![0.0; n * n];
    for e in g.edges() {
        w[e.u * n + e.v] = e.w;
        w[e.v * n + e.u] = e.w;
    }
    subset_dp(&vec![1; n], &w)
}

/// Exact `WOPT_H` on a contracted graph, the same programme with vertex
/// weight sums in place of leaf counts.
pub fn brute_force_wopt(h: &ContractedGraph) -> Result<(HcTree, f64)> {
    let k = h.k();
    let mut w = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            w[i * k + j] = h.weight(i, j);
        }
    }
    subset_dp(h.vertex_weights(), &w)
}

fn subset_dp(vertex_weight: &[usize], w: &[f64]) -> Result<(HcTree, f64)> {
    let n = vertex_weight.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge { what: "exhaustive tree search", size: n, limit: BRUTE_FORCE_MAX_N });
    }
    if n == 0 {
        return Err(Error::EmptyLeafSet);
    }
    let full = (1usize << n) - 1;
    // internal edge weight and vertex weight of every subset
    let mut inner = vec![0.0f64; full + 1];
    let mut weight = vec![0usize; full + 1];
    for mask in 1..=full {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut add = 0.0;
        let mut r = rest;
        while r != 0 {
            let u = r.trailing_zeros() as usize;
            add += w[v * n + u];
            r &= r - 1;
        }
        inner[mask] = inner[rest] + add;
        weight[mask] = weight[rest] + vertex_weight[v];
    }
    let mut opt = vec![0.0f64; full + 1];
    let mut split = vec![0usize; full + 1];
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut best = f64::INFINITY;
        let mut best_split = 0;
        // s1 always holds the lowest vertex; walk the submasks of the rest
        let mut sub = rest;
        loop {
            let s1 = sub | low;
            if s1 != mask {
                let s2 = mask ^ s1;
                let cut = inner[mask] - inner[s1] - inner[s2];
                let c = cut * weight[mask] as f64 + opt[s1] + opt[s2];
                if c < best {
                    best = c;
                    best_split = s1;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        opt[mask] = best;
        split[mask] = best_split;
    }

    fn build(arena: &mut Arena, split: &[usize], mask: usize) -> usize {
        if mask.count_ones() == 1 {
            return arena.leaf(mask.trailing_zeros() as usize);
        }
        let s1 = split[mask];
        let l = build(arena, split, s1);
        let r = build(arena, split, mask ^ s1);
        arena.internal(l, r)
    }
    let mut arena = Arena::default();
    let root = build(&mut arena, &split, full);
    Ok((arena.finish(root)?, opt[full]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::tree::{dasgupta_cost, weighted_dasgupta_cost};

    #[test]
    fn single_edge() {
        let g = build_graph(&[(0, 1, 2.5)]).unwrap();
        let (t, opt) = brute_force_opt(&g).unwrap();
        assert_eq!(opt, 5.0);
        assert_eq!(dasgupta_cost(&g, &t).unwrap(), 5.0);
    }

    #[test]
    fn unit_triangle() {
        let g = build_graph(&[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(brute_force_opt(&g).unwrap().1, 8.0);
    }

    #[test]
    fn two_disjoint_edges() {
        let g = build_graph(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let (t, opt) = brute_force_opt(&g).unwrap();
        assert_eq!(opt, 4.0);
        let [l, r] = t.children(t.root()).unwrap();
        assert_eq!((t.size(l), t.size(r)), (2, 2));
    }

    #[test]
    fn tree_matches_reported_value() {
        let g = build_graph(&[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 0, 4.0), (0, 2, 1.5), (4, 1, 3.0)]).unwrap();
        let (t, opt) = brute_force_opt(&g).unwrap();
        assert!((dasgupta_cost(&g, &t).unwrap() - opt).abs() < 1e-12);
    }

    #[test]
    fn wopt_with_unit_weights_equals_opt() {
        let g = build_graph(&[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 0, 4.0)]).unwrap();
        let h = crate::graph::contract(&g, &crate::graph::Partition::singletons(4)).unwrap();
        let (t, wopt) = brute_force_wopt(&h).unwrap();
        assert_eq!(wopt, brute_force_opt(&g).unwrap().1);
        assert_eq!(weighted_dasgupta_cost(&h, &t).unwrap(), wopt);
    }

    #[test]
    fn too_large() {
        let edges: Vec<_> = (0..13).map(|i| (i, i + 1, 1.0)).collect();
        let g = build_graph(&edges).unwrap();
        assert!(matches!(brute_force_opt(&g), Err(Error::TooLarge { .. })));
    }
}
