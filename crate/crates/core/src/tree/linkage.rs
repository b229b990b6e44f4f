use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use super::{Arena, HcTree};
use crate::graph::Graph;

#[derive(Debug)]
struct Candidate {
    avg: f64,
    key: (usize, usize),
    a: usize,
    b: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // max-heap: larger average first, then the smaller (min id, min id) key
    fn cmp(&self, other: &Self) -> Ordering {
        self.avg.total_cmp(&other.avg).then_with(|| other.key.cmp(&self.key))
    }
}

struct Cluster {
    size: usize,
    min_id: usize,
    node: usize,
    links: HashMap<usize, f64>,
}

fn pair_key(a: &Cluster, b: &Cluster) -> (usize, usize) {
    (a.min_id.min(b.min_id), a.min_id.max(b.min_id))
}

/// Agglomerative clustering on the similarity graph that repeatedly merges
/// the two clusters with the largest average similarity `w(A, B)/(|A|·|B|)`.
/// Missing edges count as zero similarity; ties go to the lexicographically
/// smallest pair of (smallest member id) values.
pub fn average_linkage(g: &Graph) -> HcTree {
    let n = g.n();
    assert!(n >= 1, "average linkage needs at least one vertex");
    let mut arena = Arena::default();
    let mut clusters: Vec<Option<Cluster>> = (0..n)
        .map(|u| {
            Some(Cluster { size: 1, min_id: u, node: arena.leaf(u), links: g.neighbors(u).collect() })
        })
        .collect();
    let mut by_min_id: BTreeSet<(usize, usize)> = (0..n).map(|u| (u, u)).collect();
    let mut heap: BinaryHeap<Candidate> = g
        .edges()
        .iter()
        .map(|e| Candidate { avg: e.w, key: (e.u, e.v), a: e.u, b: e.v })
        .collect();

    let mut alive = n;
    while alive > 1 {
        let (a, b) = loop {
            match heap.pop() {
                Some(c) if clusters[c.a].is_some() && clusters[c.b].is_some() => break (c.a, c.b),
                Some(_) => continue,
                None => {
                    // only zero-similarity pairs remain
                    let mut it = by_min_id.iter();
                    let &(_, a) = it.next().expect("two clusters alive");
                    let &(_, b) = it.next().expect("two clusters alive");
                    break (a, b);
                }
            }
        };
        let ca = clusters[a].take().expect("alive");
        let cb = clusters[b].take().expect("alive");
        by_min_id.remove(&(ca.min_id, a));
        by_min_id.remove(&(cb.min_id, b));

        let (mut links, other) = if ca.links.len() >= cb.links.len() { (ca.links, cb.links) } else { (cb.links, ca.links) };
        for (x, w) in other {
            *links.entry(x).or_insert(0.0) += w;
        }
        links.remove(&a);
        links.remove(&b);

        let id = clusters.len();
        let merged = Cluster {
            size: ca.size + cb.size,
            min_id: ca.min_id.min(cb.min_id),
            node: arena.internal(ca.node, cb.node),
            links,
        };
        let mut xs: Vec<(usize, f64)> = merged.links.iter().map(|(&x, &w)| (x, w)).collect();
        xs.sort_unstable_by_key(|&(x, _)| x);
        for (x, w) in xs {
            let cx = clusters[x].as_mut().expect("neighbour alive");
            cx.links.remove(&a);
            cx.links.remove(&b);
            cx.links.insert(id, w);
            let key = pair_key(&merged, cx);
            heap.push(Candidate { avg: w / (merged.size * cx.size) as f64, key, a: id, b: x });
        }
        by_min_id.insert((merged.min_id, id));
        clusters.push(Some(merged));
        alive -= 1;
    }
    let root = clusters.iter().flatten().next().expect("one cluster left").node;
    arena.finish(root).expect("merge tree is well formed")
}
