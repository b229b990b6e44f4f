//! Slow reference implementations used to cross-check the fast paths.
//!
//! None of these read the cached `size`/`depth` node attributes or the
//! adjacency lists; they work from parent/child links and the raw edge list.

use crate::bucketing::Beta;
use crate::graph::{ContractedGraph, Graph, Vertex, VertexSet};
use crate::tree::{HcTree, NodeId};

/// Leaf count under `node`, by explicit traversal.
pub fn count_leaves(t: &HcTree, node: NodeId) -> usize {
    let mut stack = vec![node];
    let mut count = 0;
    while let Some(x) = stack.pop() {
        match t.children(x) {
            Some([l, r]) => stack.extend([l, r]),
            None => count += 1,
        }
    }
    count
}

fn ancestors(t: &HcTree, leaf: NodeId) -> Vec<NodeId> {
    let mut out = vec![leaf];
    let mut x = leaf;
    while let Some(p) = t.parent(x) {
        out.push(p);
        x = p;
    }
    out
}

/// Lowest common ancestor as the first ancestor of `v` that is also an
/// ancestor of `u`.
pub fn naive_lca(t: &HcTree, u: Vertex, v: Vertex) -> Option<NodeId> {
    let au = ancestors(t, t.leaf_node(u)?);
    ancestors(t, t.leaf_node(v)?).into_iter().find(|x| au.contains(x))
}

/// Per-edge Dasgupta cost `w_e · |leaves(lca)|`, in edge order.
pub fn naive_edge_costs(g: &Graph, t: &HcTree) -> Option<Vec<f64>> {
    g.edges().iter().map(|e| naive_lca(t, e.u, e.v).map(|x| e.w * count_leaves(t, x) as f64)).collect()
}

pub fn naive_dasgupta_cost(g: &Graph, t: &HcTree) -> Option<f64> {
    naive_edge_costs(g, t).map(|c| c.iter().sum())
}

/// `w(S, V \ S) / vol(S)` from the edge list.
pub fn naive_conductance(g: &Graph, s: &VertexSet) -> f64 {
    let inside = s.mask(g.n());
    let (mut cut, mut vol) = (0.0, 0.0);
    for e in g.edges() {
        if inside[e.u] != inside[e.v] {
            cut += e.w;
        }
        if inside[e.u] {
            vol += e.w;
        }
        if inside[e.v] {
            vol += e.w;
        }
    }
    if s.is_empty() {
        1.0
    } else if s.len() == g.n() || vol == 0.0 {
        0.0
    } else {
        cut / vol
    }
}

/// Minimum weighted sparsity over all cuts, by a double loop over vertex
/// pairs for every subset holding vertex 0.
pub fn naive_min_sparsity(h: &ContractedGraph) -> f64 {
    let k = h.k();
    let mut best = f64::INFINITY;
    for s in (1u64..(1 << k) - 1).step_by(2) {
        let inside = |i: usize| s >> i & 1 == 1;
        let mut cut = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                if inside(i) != inside(j) {
                    cut += h.weight(i, j);
                }
            }
        }
        let ws: usize = (0..k).filter(|&i| inside(i)).map(|i| h.vertex_weight(i)).sum();
        let wc = h.total_vertex_weight() - ws;
        best = best.min(cut / (ws as f64 * wc as f64));
    }
    best
}

/// `vol(B(u))` for every `u` in the cluster by direct scan; returns the
/// maximal volume.
pub fn naive_max_bucket_volume(g: &Graph, cluster: &VertexSet, beta: Beta) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for u in cluster.iter() {
        let du = g.degree(u);
        let vol: f64 = cluster
            .iter()
            .filter(|&v| {
                let dv = g.degree(v);
                dv >= du && (!beta.value().is_finite() || dv < beta.value() * du)
            })
            .map(|v| g.degree(v))
            .sum();
        best = best.max(vol);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::tree::{balanced_tree, dasgupta_cost, lca};

    #[test]
    fn agrees_on_small_tree() {
        let g = build_graph(&[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 0.5)]).unwrap();
        let t = balanced_tree(&[2, 0, 3, 1]).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                if u != v {
                    assert_eq!(naive_lca(&t, u, v), Some(lca(&t, u, v).unwrap()));
                }
            }
        }
        assert_eq!(naive_dasgupta_cost(&g, &t), Some(dasgupta_cost(&g, &t).unwrap()));
    }
}
