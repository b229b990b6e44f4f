//! Binary hierarchical-clustering trees.
//!
//! Nodes live in a flat array. Every finished tree is renumbered in
//! pre-order (root = 0, left subtree before right), and each node carries its
//! parent, leaf count (`size`) and depth, which is what lets
//! [`dasgupta_cost`] run in `O(m · depth)`.

mod exact;
mod linkage;

pub use exact::{brute_force_opt, brute_force_wopt, BRUTE_FORCE_MAX_N};
pub use linkage::average_linkage;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ContractedGraph, Graph};

pub type NodeId = usize;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    parent: usize,
    children: Option<[NodeId; 2]>,
    leaf: Option<usize>,
    size: usize,
    depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcTree {
    nodes: Vec<Node>,
    n_leaves: usize,
    /// leaf label -> node id, `NONE` where the label is unused
    leaf_index: Vec<usize>,
}

impl HcTree {
    pub fn leaf(label: usize) -> HcTree {
        let mut arena = Arena::default();
        let root = arena.leaf(label);
        arena.finish(root).expect("single leaf")
    }

    /// New root with `left` and `right` as children. Leaf labels must be
    /// disjoint.
    pub fn join(left: &HcTree, right: &HcTree) -> Result<HcTree> {
        let mut arena = Arena::default();
        let l = arena.append(left, None);
        let r = arena.append(right, None);
        let root = arena.internal(l, r);
        arena.finish(root)
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        let p = self.nodes[node].parent;
        (p != NONE).then_some(p)
    }

    pub fn children(&self, node: NodeId) -> Option<[NodeId; 2]> {
        self.nodes[node].children
    }

    pub fn size(&self, node: NodeId) -> usize {
        self.nodes[node].size
    }

    pub fn depth(&self, node: NodeId) -> usize {
        self.nodes[node].depth
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        self.nodes[node].children.is_none()
    }

    /// Label carried by a leaf node.
    pub fn leaf_label(&self, node: NodeId) -> Option<usize> {
        self.nodes[node].leaf
    }

    /// Node holding leaf `label`.
    pub fn leaf_node(&self, label: usize) -> Option<NodeId> {
        self.leaf_index.get(label).copied().filter(|&i| i != NONE)
    }

    /// Leaf labels from left to right.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.nodes.iter().filter_map(|n| n.leaf).collect()
    }

    /// Length of the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// True when the leaf labels are exactly `0..n_leaves`.
    pub fn is_bijective(&self) -> bool {
        self.leaf_index.len() == self.n_leaves && self.leaf_index.iter().all(|&i| i != NONE)
    }

    /// Overwrites the stored size of one node without any consistency
    /// check. Only meant for fault-injection tests of the verifiers.
    #[doc(hidden)]
    pub fn set_size_unchecked(&mut self, node: NodeId, size: usize) {
        self.nodes[node].size = size;
    }

    /// Same tree with the children of `node` swapped.
    pub fn swap_children(&self, node: NodeId) -> HcTree {
        let mut arena = Arena::default();
        let root = arena.append_with(self, None, Some(node));
        arena.finish(root).expect("swapping children keeps the tree valid")
    }

    fn check_covers(&self, n: usize) -> Result<()> {
        if self.n_leaves != n || !self.is_bijective() {
            return Err(Error::LeafMismatch(format!(
                "tree has {} leaves (bijective: {}), graph has {} vertices",
                self.n_leaves,
                self.is_bijective(),
                n
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TreeJson::from(self)).expect("tree serialises")
    }

    pub fn from_json(text: &str) -> Result<HcTree> {
        let json: TreeJson = serde_json::from_str(text).map_err(|e| Error::MalformedTree(e.to_string()))?;
        json.try_into()
    }
}

/// Scratch space for assembling trees out of pieces. `finish` validates the
/// structure and recomputes every attribute.
#[derive(Default)]
pub(crate) struct Arena {
    children: Vec<Option<[usize; 2]>>,
    leaf: Vec<Option<usize>>,
}

impl Arena {
    pub(crate) fn leaf(&mut self, label: usize) -> usize {
        self.children.push(None);
        self.leaf.push(Some(label));
        self.children.len() - 1
    }

    pub(crate) fn internal(&mut self, l: usize, r: usize) -> usize {
        self.children.push(Some([l, r]));
        self.leaf.push(None);
        self.children.len() - 1
    }

    pub(crate) fn append(&mut self, t: &HcTree, root_slot: Option<usize>) -> usize {
        self.append_with(t, root_slot, None)
    }

    /// Copies `t` into the arena. With `root_slot`, the root of `t` is written
    /// into that existing slot instead of a fresh one.
    fn append_with(&mut self, t: &HcTree, root_slot: Option<usize>, swap: Option<NodeId>) -> usize {
        let base = self.children.len();
        let skip = usize::from(root_slot.is_some());
        let map = |i: usize| match root_slot {
            Some(slot) if i == 0 => slot,
            Some(_) => base + i - 1,
            None => base + i,
        };
        for (i, node) in t.nodes.iter().enumerate() {
            let mut ch = node.children.map(|[a, b]| [map(a), map(b)]);
            if swap == Some(i) {
                ch = ch.map(|[a, b]| [b, a]);
            }
            if i < skip {
                let slot = map(0);
                self.children[slot] = ch;
                self.leaf[slot] = node.leaf;
            } else {
                self.children.push(ch);
                self.leaf.push(node.leaf);
            }
        }
        map(0)
    }

    pub(crate) fn finish(self, root: usize) -> Result<HcTree> {
        let total = self.children.len();
        let mut order = Vec::with_capacity(total);
        let mut new_id = vec![NONE; total];
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            if x >= total {
                return Err(Error::MalformedTree(format!("child index {x} out of range")));
            }
            if new_id[x] != NONE {
                return Err(Error::MalformedTree(format!("node {x} reachable twice")));
            }
            new_id[x] = order.len();
            order.push(x);
            match (self.children[x], self.leaf[x]) {
                (Some([l, r]), None) => {
                    stack.push(r);
                    stack.push(l);
                }
                (None, Some(_)) => {}
                _ => return Err(Error::MalformedTree(format!("node {x} must be a leaf or have two children"))),
            }
        }
        if order.len() != total {
            return Err(Error::MalformedTree(format!("{} nodes unreachable from the root", total - order.len())));
        }
        let mut nodes: Vec<Node> = order
            .iter()
            .map(|&x| Node {
                parent: NONE,
                children: self.children[x].map(|[l, r]| [new_id[l], new_id[r]]),
                leaf: self.leaf[x],
                size: 0,
                depth: 0,
            })
            .collect();
        let mut leaf_index = Vec::new();
        let mut n_leaves = 0;
        // pre-order: parents precede children
        for i in 0..nodes.len() {
            if let Some([l, r]) = nodes[i].children {
                let d = nodes[i].depth + 1;
                for c in [l, r] {
                    nodes[c].parent = i;
                    nodes[c].depth = d;
                }
            }
            if let Some(label) = nodes[i].leaf {
                if label >= leaf_index.len() {
                    leaf_index.resize(label + 1, NONE);
                }
                if leaf_index[label] != NONE {
                    return Err(Error::DuplicateLeaf(label));
                }
                leaf_index[label] = i;
                n_leaves += 1;
            }
        }
        for i in (0..nodes.len()).rev() {
            nodes[i].size = match nodes[i].children {
                Some([l, r]) => nodes[l].size + nodes[r].size,
                None => 1,
            };
        }
        Ok(HcTree { nodes, n_leaves, leaf_index })
    }
}

/// Lowest common ancestor of the leaves labelled `u` and `v`: climb from the
/// deeper leaf to equal depth, then climb both in lockstep.
pub fn lca(t: &HcTree, u: usize, v: usize) -> Result<NodeId> {
    let a = t.leaf_node(u).ok_or(Error::UnknownVertex(u))?;
    let b = t.leaf_node(v).ok_or(Error::UnknownVertex(v))?;
    Ok(lca_nodes(t, a, b))
}

pub(crate) fn lca_nodes(t: &HcTree, mut a: NodeId, mut b: NodeId) -> NodeId {
    while t.nodes[a].depth > t.nodes[b].depth {
        a = t.nodes[a].parent;
    }
    while t.nodes[b].depth > t.nodes[a].depth {
        b = t.nodes[b].parent;
    }
    while a != b {
        a = t.nodes[a].parent;
        b = t.nodes[b].parent;
    }
    a
}

/// Dasgupta cost `Σ_e w_e · |leaves(lca(e))|`, summed in edge order.
pub fn dasgupta_cost(g: &Graph, t: &HcTree) -> Result<f64> {
    t.check_covers(g.n())?;
    Ok(g.edges()
        .iter()
        .map(|e| e.w * t.size(lca_nodes(t, t.leaf_index[e.u], t.leaf_index[e.v])) as f64)
        .sum())
}

/// `cost_G(e)` for every edge, in edge order.
pub fn edge_costs(g: &Graph, t: &HcTree) -> Result<Vec<f64>> {
    t.check_covers(g.n())?;
    Ok(g.edges()
        .iter()
        .map(|e| e.w * t.size(lca_nodes(t, t.leaf_index[e.u], t.leaf_index[e.v])) as f64)
        .collect())
}

/// Total vertex weight under every node, given per-leaf weights.
pub fn subtree_weights(t: &HcTree, leaf_weight: &[usize]) -> Vec<usize> {
    let mut acc = vec![0usize; t.nodes.len()];
    for i in (0..t.nodes.len()).rev() {
        acc[i] = match (t.nodes[i].children, t.nodes[i].leaf) {
            (Some([l, r]), _) => acc[l] + acc[r],
            (None, Some(label)) => leaf_weight[label],
            (None, None) => unreachable!("leaf without label"),
        };
    }
    acc
}

/// Weighted Dasgupta cost on a contracted graph: each pair pays
/// `W(u, v)` times the total vertex weight under `lca(u, v)`.
pub fn weighted_dasgupta_cost(h: &ContractedGraph, t: &HcTree) -> Result<f64> {
    t.check_covers(h.k())?;
    let acc = subtree_weights(t, h.vertex_weights());
    Ok(h.pairs()
        .iter()
        .map(|&(i, j, w)| w * acc[lca_nodes(t, t.leaf_index[i], t.leaf_index[j])] as f64)
        .sum())
}

/// Balanced tree by recursive halving, the first `⌈len/2⌉` leaves going left.
pub fn balanced_tree(leaf_order: &[usize]) -> Result<HcTree> {
    if leaf_order.is_empty() {
        return Err(Error::EmptyLeafSet);
    }
    fn build(arena: &mut Arena, leaves: &[usize]) -> usize {
        if leaves.len() == 1 {
            return arena.leaf(leaves[0]);
        }
        let mid = leaves.len().div_ceil(2);
        let l = build(arena, &leaves[..mid]);
        let r = build(arena, &leaves[mid..]);
        arena.internal(l, r)
    }
    let mut arena = Arena::default();
    let root = build(&mut arena, leaf_order);
    arena.finish(root)
}

/// Left-deep merge: the forest is ordered by leaf count (stable, so equal
/// sizes keep their input order), then each tree in turn becomes the right
/// child of a new root above everything merged so far.
pub fn caterpillar_merge(trees: &[HcTree]) -> Result<HcTree> {
    if trees.is_empty() {
        return Err(Error::EmptyForest);
    }
    let mut order: Vec<&HcTree> = trees.iter().collect();
    order.sort_by_key(|t| t.n_leaves());
    if order.len() == 1 {
        return Ok(order[0].clone());
    }
    let mut arena = Arena::default();
    let mut acc = arena.append(order[0], None);
    for t in &order[1..] {
        let next = arena.append(t, None);
        acc = arena.internal(acc, next);
    }
    arena.finish(acc)
}

/// Puts the root of `sub` where leaf node `leaf` was.
pub fn replace_leaf(t: &HcTree, leaf: NodeId, sub: &HcTree) -> Result<HcTree> {
    replace_leaves(t, &[(leaf, sub)])
}

/// Several leaf replacements in one pass.
pub fn replace_leaves(t: &HcTree, replacements: &[(NodeId, &HcTree)]) -> Result<HcTree> {
    let mut arena = Arena::default();
    let root = arena.append(t, None);
    for &(leaf, sub) in replacements {
        if leaf >= t.node_count() || !t.is_leaf(leaf) {
            return Err(Error::NotALeaf(leaf));
        }
        arena.append(sub, Some(root + leaf));
    }
    arena.finish(root)
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    children: Option<[usize; 2]>,
    leaf: Option<usize>,
    parent: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    n_leaves: usize,
    nodes: Vec<NodeJson>,
}

impl From<&HcTree> for TreeJson {
    fn from(t: &HcTree) -> Self {
        TreeJson {
            n_leaves: t.n_leaves,
            nodes: t
                .nodes
                .iter()
                .map(|n| NodeJson {
                    children: n.children,
                    leaf: n.leaf,
                    parent: (n.parent != NONE).then_some(n.parent),
                })
                .collect(),
        }
    }
}

impl TryFrom<TreeJson> for HcTree {
    type Error = Error;

    fn try_from(json: TreeJson) -> Result<HcTree> {
        let roots: Vec<usize> =
            json.nodes.iter().enumerate().filter(|(_, n)| n.parent.is_none()).map(|(i, _)| i).collect();
        if roots.len() != 1 {
            return Err(Error::MalformedTree(format!("expected one root, found {}", roots.len())));
        }
        for (i, n) in json.nodes.iter().enumerate() {
            if let Some(ch) = n.children {
                if ch.iter().any(|&c| json.nodes.get(c).and_then(|x| x.parent) != Some(i)) {
                    return Err(Error::MalformedTree(format!("parent links of node {i} are inconsistent")));
                }
            }
        }
        let arena = Arena {
            children: json.nodes.iter().map(|n| n.children).collect(),
            leaf: json.nodes.iter().map(|n| n.leaf).collect(),
        };
        let tree = arena.finish(roots[0])?;
        if tree.n_leaves != json.n_leaves {
            return Err(Error::MalformedTree(format!(
                "n_leaves is {} but the tree has {} leaves",
                json.n_leaves, tree.n_leaves
            )));
        }
        Ok(tree)
    }
}
