//! Weighted undirected graphs, vertex sets, partitions and contraction.
//!
//! A [`Graph`] is immutable once built. Adjacency is stored in compressed
//! form with neighbours sorted by id, and every degree is summed in that
//! order so that degrees and volumes are bit-reproducible.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// An undirected edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub w: f64,
}

/// What to do with repeated undirected pairs in an input edge list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DuplicatePolicy {
    #[default]
    Reject,
    /// Sum the weights of repeated pairs into one edge.
    Merge,
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    neighbors: Vec<Vertex>,
    neighbor_weights: Vec<f64>,
    degree: Vec<f64>,
    total_volume: f64,
    w_min: f64,
    w_max: f64,
    labels: Vec<u64>,
}

/// Builds a graph from an edge list over arbitrary non-negative ids.
///
/// Ids are compacted to `0..n` in order of first appearance; the original id
/// of compact vertex `u` is available as [`Graph::label`].
pub fn build_graph(edge_list: &[(u64, u64, f64)]) -> Result<Graph> {
    build_graph_with(edge_list, DuplicatePolicy::Reject)
}

pub fn build_graph_with(edge_list: &[(u64, u64, f64)], policy: DuplicatePolicy) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut compact = Vec::with_capacity(edge_list.len());
    for &(u, v, w) in edge_list {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::NonPositiveWeight { u, v, w });
        }
        let mut intern = |x: u64| {
            *ids.entry(x).or_insert_with(|| {
                labels.push(x);
                labels.len() - 1
            })
        };
        let cu = intern(u);
        let cv = intern(v);
        compact.push((cu, cv, w));
    }
    let n = labels.len();
    let edges = dedup_edges(&compact, policy, |a, b| (labels[a], labels[b]))?;
    Ok(Graph::assemble(n, edges, labels))
}

fn dedup_edges(
    edges: &[(usize, usize, f64)],
    policy: DuplicatePolicy,
    label: impl Fn(usize, usize) -> (u64, u64),
) -> Result<Vec<Edge>> {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.len());
    let mut out: Vec<Edge> = Vec::with_capacity(edges.len());
    for &(a, b, w) in edges {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        match seen.get(&(u, v)) {
            Some(&idx) => match policy {
                DuplicatePolicy::Reject => {
                    let (lu, lv) = label(a, b);
                    return Err(Error::DuplicateEdge(lu, lv));
                }
                DuplicatePolicy::Merge => out[idx].w += w,
            },
            None => {
                seen.insert((u, v), out.len());
                out.push(Edge { u, v, w });
            }
        }
    }
    Ok(out)
}

impl Graph {
    /// Builds a graph on exactly `n` vertices `0..n`; vertices without
    /// edges are kept as isolated vertices.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex, f64)]) -> Result<Graph> {
        Self::from_edges_with(n, edges, DuplicatePolicy::Reject)
    }

    pub fn from_edges_with(
        n: usize,
        edges: &[(Vertex, Vertex, f64)],
        policy: DuplicatePolicy,
    ) -> Result<Graph> {
        for &(u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u as u64));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonPositiveWeight { u: u as u64, v: v as u64, w });
            }
        }
        let edges = dedup_edges(edges, policy, |a, b| (a as u64, b as u64))?;
        Ok(Graph::assemble(n, edges, (0..n as u64).collect()))
    }

    fn assemble(n: usize, edges: Vec<Edge>, labels: Vec<u64>) -> Graph {
        let mut counts = vec![0usize; n + 1];
        for e in &edges {
            counts[e.u + 1] += 1;
            counts[e.v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut adj: Vec<(Vertex, f64)> = vec![(0, 0.0); 2 * edges.len()];
        for e in &edges {
            adj[fill[e.u]] = (e.v, e.w);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, e.w);
            fill[e.v] += 1;
        }
        for u in 0..n {
            adj[offsets[u]..offsets[u + 1]].sort_unstable_by_key(|&(v, _)| v);
        }
        let neighbors: Vec<Vertex> = adj.iter().map(|&(v, _)| v).collect();
        let neighbor_weights: Vec<f64> = adj.iter().map(|&(_, w)| w).collect();
        let degree: Vec<f64> = (0..n)
            .map(|u| neighbor_weights[offsets[u]..offsets[u + 1]].iter().sum())
            .collect();
        let total_volume = degree.iter().sum();
        let (w_min, w_max) = if edges.is_empty() {
            (0.0, 0.0)
        } else {
            edges.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(e.w), hi.max(e.w)))
        };
        Graph { n, edges, offsets, neighbors, neighbor_weights, degree, total_volume, w_min, w_max, labels }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `u` with edge weights, in increasing neighbour id.
    pub fn neighbors(&self, u: Vertex) -> impl Iterator<Item = (Vertex, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.neighbors[range.clone()].iter().copied().zip(self.neighbor_weights[range].iter().copied())
    }

    pub fn degree(&self, u: Vertex) -> f64 {
        self.degree[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// Sum of all degrees, i.e. twice the total edge weight.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn w_min(&self) -> f64 {
        self.w_min
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn min_degree(&self) -> f64 {
        self.degree.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_degree(&self) -> f64 {
        self.degree.iter().copied().fold(0.0, f64::max)
    }

    /// Original id of compact vertex `u`.
    pub fn label(&self, u: Vertex) -> u64 {
        self.labels[u]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn volume(&self, set: &VertexSet) -> f64 {
        set.iter().map(|u| self.degree[u]).sum()
    }

    /// Connected-component id per vertex, numbered in order of smallest member.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 <= 1
    }

    pub(crate) fn check_vertex(&self, u: Vertex) -> Result<()> {
        if u < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: u, n: self.n })
        }
    }
}

/// Sorted set of distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    /// Collects `members`, sorting and dropping repeats.
    pub fn new(members: impl IntoIterator<Item = Vertex>) -> VertexSet {
        let mut v: Vec<Vertex> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    /// Like [`VertexSet::new`] but rejects repeats and ids `>= n`.
    pub fn validated(n: usize, members: &[Vertex]) -> Result<VertexSet> {
        let set = VertexSet::new(members.iter().copied());
        if set.len() != members.len() {
            return Err(Error::OverlappingSets);
        }
        if let Some(&x) = set.0.last() {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, n });
            }
        }
        Ok(set)
    }

    pub fn empty() -> VertexSet {
        VertexSet(Vec::new())
    }

    pub fn full(n: usize) -> VertexSet {
        VertexSet((0..n).collect())
    }

    pub fn members(&self) -> &[Vertex] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, u: Vertex) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    pub fn complement(&self, n: usize) -> VertexSet {
        let mask = self.mask(n);
        VertexSet((0..n).filter(|&u| !mask[u]).collect())
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &u in &self.0 {
            m[u] = true;
        }
        m
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// A k-way partition of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<VertexSet>,
    label: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, parts: Vec<VertexSet>) -> Result<Partition> {
        let mut label = vec![usize::MAX; n];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::IncompletePartition(format!("part {i} is empty")));
            }
            for u in part.iter() {
                if u >= n {
                    return Err(Error::VertexOutOfRange { vertex: u, n });
                }
                if label[u] != usize::MAX {
                    return Err(Error::IncompletePartition(format!("vertex {u} lies in two parts")));
                }
                label[u] = i;
            }
        }
        if let Some(u) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::IncompletePartition(format!("vertex {u} is not covered")));
        }
        Ok(Partition { parts, label })
    }

    /// Builds the partition whose part `i` is `{u : labels[u] == i}`. Every
    /// label in `0..max` must be used.
    pub fn from_labels(labels: &[usize]) -> Result<Partition> {
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        let mut parts = vec![Vec::new(); k];
        for (u, &l) in labels.iter().enumerate() {
            parts[l].push(u);
        }
        Partition::new(labels.len(), parts.into_iter().map(VertexSet).collect())
    }

    /// One part per vertex.
    pub fn singletons(n: usize) -> Partition {
        Partition { parts: (0..n).map(|u| VertexSet(vec![u])).collect(), label: (0..n).collect() }
    }

    /// Renumbers parts in increasing order of their smallest vertex.
    pub fn canonical(&self) -> Partition {
        let mut parts = self.parts.clone();
        parts.sort_by_key(|p| p.members()[0]);
        Partition::new(self.label.len(), parts).expect("relabelling a valid partition")
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn n(&self) -> usize {
        self.label.len()
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &VertexSet {
        &self.parts[i]
    }

    pub fn label(&self, u: Vertex) -> usize {
        self.label[u]
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }
}

/// Total weight of edges with one end in `s` and the other in `t`.
pub fn cut_weight(g: &Graph, s: &VertexSet, t: &VertexSet) -> Result<f64> {
    for u in s.iter().chain(t.iter()) {
        g.check_vertex(u)?;
    }
    let in_t = t.mask(g.n());
    if s.iter().any(|u| in_t[u]) {
        return Err(Error::OverlappingSets);
    }
    let mut cut = 0.0;
    for u in s.iter() {
        for (v, w) in g.neighbors(u) {
            if in_t[v] {
                cut += w;
            }
        }
    }
    Ok(cut)
}

/// `w(S, V \ S) / vol(S)`, with `Φ(∅) = 1` and `Φ(V) = 0`. A non-empty set
/// of zero volume has no leaving edges and gets 0.
pub fn conductance(g: &Graph, s: &VertexSet) -> Result<f64> {
    if s.is_empty() {
        return Ok(1.0);
    }
    if s.len() == g.n() {
        return Ok(0.0);
    }
    let rest = s.complement(g.n());
    let cut = cut_weight(g, s, &rest)?;
    let vol = g.volume(s);
    Ok(if vol > 0.0 { cut / vol } else { 0.0 })
}

pub const CONDUCTANCE_EXACT_MAX_N: usize = 24;

/// Exhaustive graph conductance `min { Φ(S) : vol(S) <= vol(V)/2 }`.
///
/// Walks all subsets in Gray-code order with incremental cut and volume
/// updates, then recomputes the winner directly.
pub fn graph_conductance_exact(g: &Graph) -> Result<(f64, VertexSet)> {
    let n = g.n();
    if n > CONDUCTANCE_EXACT_MAX_N {
        return Err(Error::TooLarge { what: "exact conductance", size: n, limit: CONDUCTANCE_EXACT_MAX_N });
    }
    if n < 2 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let half = g.total_volume() / 2.0;
    let mut inside = vec![false; n];
    let (mut cut, mut vol) = (0.0f64, 0.0f64);
    let mut best: Option<(f64, u64)> = None;
    let mut mask: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        let to_s: f64 = g.neighbors(flip).filter(|&(v, _)| inside[v]).map(|(_, w)| w).sum();
        if inside[flip] {
            inside[flip] = false;
            vol -= g.degree(flip);
            cut -= g.degree(flip) - 2.0 * to_s;
        } else {
            inside[flip] = true;
            vol += g.degree(flip);
            cut += g.degree(flip) - 2.0 * to_s;
        }
        mask ^= 1 << flip;
        let full = mask.count_ones() as usize == n;
        if full || vol > half * (1.0 + 1e-12) || vol <= 0.0 {
            continue;
        }
        let phi = cut / vol;
        if best.is_none_or(|(b, _)| phi < b) {
            best = Some((phi, mask));
        }
    }
    let (_, mask) = best.ok_or(Error::Disconnected)?;
    let set = VertexSet((0..n).filter(|&u| mask >> u & 1 == 1).collect());
    Ok((conductance(g, &set)?, set))
}

/// An induced subgraph together with the map back to parent vertex ids.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    /// `original[i]` is the parent-graph vertex of subgraph vertex `i`.
    pub original: Vec<Vertex>,
}

pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<Subgraph> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut local = vec![usize::MAX; g.n()];
    for (i, u) in s.iter().enumerate() {
        g.check_vertex(u)?;
        local[u] = i;
    }
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
        .map(|e| {
            let (a, b) = (local[e.u], local[e.v]);
            Edge { u: a.min(b), v: a.max(b), w: e.w }
        })
        .collect();
    let labels = s.iter().map(|u| g.label(u)).collect();
    Ok(Subgraph { graph: Graph::assemble(s.len(), edges, labels), original: s.members().to_vec() })
}

/// Vertex- and edge-weighted graph obtained by contracting the parts of a
/// partition. Edge weights are held in a dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractedGraph {
    vertex_weight: Vec<usize>,
    edge_weight: Vec<f64>,
    internal_weight: Vec<f64>,
    pairs: Vec<(usize, usize, f64)>,
}

impl ContractedGraph {
    /// Builds a contracted graph directly. Repeated pairs are summed.
    pub fn new(vertex_weight: Vec<usize>, edges: &[(usize, usize, f64)]) -> Result<ContractedGraph> {
        let k = vertex_weight.len();
        if let Some(i) = vertex_weight.iter().position(|&w| w == 0) {
            return Err(Error::BadConfig(format!("contracted vertex {i} has zero weight")));
        }
        let mut m = vec![0.0; k * k];
        for &(i, j, w) in edges {
            for x in [i, j] {
                if x >= k {
                    return Err(Error::VertexOutOfRange { vertex: x, n: k });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i as u64));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::NonPositiveWeight { u: i as u64, v: j as u64, w });
            }
            m[i * k + j] += w;
            m[j * k + i] += w;
        }
        Ok(Self::from_matrix(vertex_weight, m, vec![0.0; k]))
    }

    fn from_matrix(vertex_weight: Vec<usize>, edge_weight: Vec<f64>, internal_weight: Vec<f64>) -> Self {
        let k = vertex_weight.len();
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let w = edge_weight[i * k + j];
                if w != 0.0 {
                    pairs.push((i, j, w));
                }
            }
        }
        ContractedGraph { vertex_weight, edge_weight, internal_weight, pairs }
    }

    pub fn k(&self) -> usize {
        self.vertex_weight.len()
    }

    pub fn vertex_weight(&self, i: usize) -> usize {
        self.vertex_weight[i]
    }

    pub fn vertex_weights(&self) -> &[usize] {
        &self.vertex_weight
    }

    pub fn total_vertex_weight(&self) -> usize {
        self.vertex_weight.iter().sum()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.edge_weight[i * self.k() + j]
    }

    /// Weight of source-graph edges that fell inside part `i`.
    pub fn internal_weight(&self, i: usize) -> f64 {
        self.internal_weight[i]
    }

    /// Nonzero pairs `(i, j, W(i, j))` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize, f64)] {
        &self.pairs
    }

    /// Contracted graph induced on `members` (in the given order).
    pub fn induced(&self, members: &[usize]) -> ContractedGraph {
        let k = self.k();
        let s = members.len();
        let mut m = vec![0.0; s * s];
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                m[a * s + b] = self.edge_weight[i * k + j];
            }
        }
        let vw = members.iter().map(|&i| self.vertex_weight[i]).collect();
        let iw = members.iter().map(|&i| self.internal_weight[i]).collect();
        Self::from_matrix(vw, m, iw)
    }

    /// `W(S, V \ S)` summed over crossing pairs in lexicographic order, so the
    /// value is the same bit pattern for `S` and its complement.
    pub fn crossing_weight(&self, inside: impl Fn(usize) -> bool) -> f64 {
        let mut cut = 0.0;
        for &(i, j, w) in &self.pairs {
            if inside(i) != inside(j) {
                cut += w;
            }
        }
        cut
    }
}

/// Contracts every part of `parts` to a single weighted vertex in one pass
/// over the edges.
pub fn contract(g: &Graph, parts: &Partition) -> Result<ContractedGraph> {
    if parts.n() != g.n() {
        return Err(Error::IncompletePartition(format!(
            "partition covers {} vertices, graph has {}",
            parts.n(),
            g.n()
        )));
    }
    let k = parts.k();
    let mut m = vec![0.0; k * k];
    let mut internal = vec![0.0; k];
    for e in g.edges() {
        let (a, b) = (parts.label(e.u), parts.label(e.v));
        if a == b {
            internal[a] += e.w;
        } else {
            m[a * k + b] += e.w;
            m[b * k + a] += e.w;
        }
    }
    let vw = parts.parts().iter().map(|p| p.len()).collect();
    Ok(ContractedGraph::from_matrix(vw, m, internal))
}

/// `W(S, V \ S) / (w(S) · w(V \ S))` on a contracted graph.
pub fn weighted_sparsity(h: &ContractedGraph, s: &VertexSet) -> Result<f64> {
    let k = h.k();
    if let Some(&x) = s.members().last() {
        if x >= k {
            return Err(Error::VertexOutOfRange { vertex: x, n: k });
        }
    }
    if s.is_empty() || s.len() == k {
        return Err(Error::TrivialCut);
    }
    let mask = s.mask(k);
    Ok(sparsity_of(h, |i| mask[i]))
}

pub(crate) fn sparsity_of(h: &ContractedGraph, inside: impl Fn(usize) -> bool + Copy) -> f64 {
    let cut = h.crossing_weight(inside);
    let (mut ws, mut wc) = (0usize, 0usize);
    for (i, &w) in h.vertex_weight.iter().enumerate() {
        if inside(i) {
            ws += w;
        } else {
            wc += w;
        }
    }
    cut / (ws as f64 * wc as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        build_graph(&[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn path3() -> Graph {
        build_graph(&[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn set(v: &[usize]) -> VertexSet {
        VertexSet::new(v.iter().copied())
    }

    #[test]
    fn build_single_edge() {
        let g = build_graph(&[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.degrees(), &[1.0, 1.0]);
        assert_eq!(g.total_volume(), 2.0);
    }

    #[test]
    fn build_triangle_and_weighted_path() {
        let g = triangle();
        assert_eq!(g.degrees(), &[2.0, 2.0, 2.0]);
        assert_eq!(g.total_volume(), 6.0);

        let g = build_graph(&[(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        assert_eq!(g.degrees(), &[2.0, 5.0, 3.0]);
        assert_eq!(g.w_min(), 2.0);
        assert_eq!(g.w_max(), 3.0);
    }

    #[test]
    fn build_compacts_ids_in_first_appearance_order() {
        let g = build_graph(&[(10, 7, 1.0), (7, 42, 2.0)]).unwrap();
        assert_eq!(g.labels(), &[10, 7, 42]);
        assert_eq!(g.degrees(), &[1.0, 3.0, 2.0]);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(build_graph(&[(3, 3, 1.0)]).unwrap_err(), Error::SelfLoop(3));
        assert!(matches!(build_graph(&[(0, 1, 0.0)]), Err(Error::NonPositiveWeight { .. })));
        assert!(matches!(build_graph(&[(0, 1, -2.0)]), Err(Error::NonPositiveWeight { .. })));
        assert!(matches!(build_graph(&[(0, 1, f64::NAN)]), Err(Error::NonPositiveWeight { .. })));
        assert_eq!(build_graph(&[(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err(), Error::DuplicateEdge(1, 0));
    }

    #[test]
    fn merge_policy_sums_duplicates() {
        let g = build_graph_with(&[(0, 1, 1.0), (1, 0, 2.0)], DuplicatePolicy::Merge).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edges()[0].w, 3.0);
    }

    #[test]
    fn cut_weight_examples() {
        let g = triangle();
        assert_eq!(cut_weight(&g, &set(&[0]), &set(&[1, 2])).unwrap(), 2.0);
        assert_eq!(cut_weight(&g, &set(&[0]), &VertexSet::empty()).unwrap(), 0.0);
        assert_eq!(cut_weight(&path3(), &set(&[0]), &set(&[2])).unwrap(), 0.0);
        assert_eq!(cut_weight(&g, &set(&[0, 1]), &set(&[1])).unwrap_err(), Error::OverlappingSets);
    }

    #[test]
    fn conductance_examples() {
        let g = triangle();
        assert_eq!(conductance(&g, &set(&[0])).unwrap(), 1.0);
        assert_eq!(conductance(&g, &set(&[0, 1])).unwrap(), 0.5);
        assert_eq!(conductance(&g, &VertexSet::full(3)).unwrap(), 0.0);
        assert_eq!(conductance(&g, &VertexSet::empty()).unwrap(), 1.0);
    }

    #[test]
    fn exact_conductance_two_triangles() {
        let g = build_graph(&[
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 1.0),
            (3, 4, 1.0),
            (3, 5, 1.0),
            (4, 5, 1.0),
            (2, 3, 1.0),
        ])
        .unwrap();
        let (phi, s) = graph_conductance_exact(&g).unwrap();
        assert!((phi - 1.0 / 7.0).abs() < 1e-15);
        assert!(s == set(&[0, 1, 2]) || s == set(&[3, 4, 5]));
    }

    #[test]
    fn exact_conductance_single_edge_and_errors() {
        let g = build_graph(&[(0, 1, 1.0)]).unwrap();
        assert_eq!(graph_conductance_exact(&g).unwrap().0, 1.0);
        let g = build_graph(&[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(graph_conductance_exact(&g).unwrap_err(), Error::Disconnected);
        let edges: Vec<_> = (0..25).map(|i| (i, i + 1, 1.0)).collect();
        let g = build_graph(&edges).unwrap();
        assert!(matches!(graph_conductance_exact(&g), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn induced_subgraph_examples() {
        let g = triangle();
        let sub = induced_subgraph(&g, &set(&[0, 1])).unwrap();
        assert_eq!((sub.graph.n(), sub.graph.m()), (2, 1));
        let sub = induced_subgraph(&g, &VertexSet::full(3)).unwrap();
        assert_eq!(sub.graph.degrees(), g.degrees());
        assert_eq!(sub.graph.m(), 3);
        let sub = induced_subgraph(&path3(), &set(&[0, 2])).unwrap();
        assert_eq!((sub.graph.n(), sub.graph.m()), (2, 0));
        assert_eq!(sub.original, vec![0, 2]);
        assert_eq!(induced_subgraph(&g, &VertexSet::empty()).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn contract_examples() {
        let g = triangle();
        let p = Partition::new(3, vec![set(&[0, 1]), set(&[2])]).unwrap();
        let h = contract(&g, &p).unwrap();
        assert_eq!(h.vertex_weights(), &[2, 1]);
        assert_eq!(h.weight(0, 1), 2.0);
        assert_eq!(h.internal_weight(0), 1.0);

        let h = contract(&g, &Partition::singletons(3)).unwrap();
        assert_eq!(h.vertex_weights(), &[1, 1, 1]);
        assert_eq!(h.pairs(), &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);

        let h = contract(&g, &Partition::new(3, vec![VertexSet::full(3)]).unwrap()).unwrap();
        assert_eq!(h.k(), 1);
        assert_eq!(h.vertex_weights(), &[3]);
        assert!(h.pairs().is_empty());
    }

    #[test]
    fn partition_validation() {
        assert!(matches!(Partition::new(3, vec![set(&[0, 1])]), Err(Error::IncompletePartition(_))));
        assert!(matches!(
            Partition::new(3, vec![set(&[0, 1]), set(&[1, 2])]),
            Err(Error::IncompletePartition(_))
        ));
        let p = Partition::from_labels(&[1, 0, 1]).unwrap();
        assert_eq!(p.part(0), &set(&[1]));
        assert_eq!(p.canonical().part(0), &set(&[0, 2]));
        let g = triangle();
        let p = Partition::singletons(2);
        assert!(matches!(contract(&g, &p), Err(Error::IncompletePartition(_))));
    }

    #[test]
    fn weighted_sparsity_examples() {
        let h = ContractedGraph::new(vec![2, 1], &[(0, 1, 2.0)]).unwrap();
        assert_eq!(weighted_sparsity(&h, &set(&[0])).unwrap(), 1.0);
        let h0 = ContractedGraph::new(vec![1, 1, 1], &[(0, 1, 1.0)]).unwrap();
        assert_eq!(weighted_sparsity(&h0, &set(&[2])).unwrap(), 0.0);
        let h = ContractedGraph::new(vec![1, 1], &[(0, 1, 3.0)]).unwrap();
        assert_eq!(weighted_sparsity(&h, &set(&[0])).unwrap(), 3.0);
        assert_eq!(weighted_sparsity(&h, &VertexSet::empty()).unwrap_err(), Error::TrivialCut);
        assert_eq!(weighted_sparsity(&h, &VertexSet::full(2)).unwrap_err(), Error::TrivialCut);
    }
}
