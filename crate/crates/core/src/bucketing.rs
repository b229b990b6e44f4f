//! Degree buckets `B^j(u) = { v : β^j·d_u ≤ d_v < β^{j+1}·d_u }` inside a cluster.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// Bucket ratio `β > 1`, possibly infinite. Kept alongside its logarithm so
/// that `2^{k(γ+1)}` stays usable after it overflows an `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Beta {
    value: f64,
    ln: f64,
}

impl Beta {
    pub fn new(beta: f64) -> Result<Beta> {
        if !(beta > 1.0) {
            return Err(Error::BadBeta(beta));
        }
        Ok(Beta { value: beta, ln: beta.ln() })
    }

    /// `2^exponent`.
    pub fn pow2(exponent: f64) -> Result<Beta> {
        if !(exponent > 0.0) {
            return Err(Error::BadBeta(exponent.exp2()));
        }
        Ok(Beta { value: exponent.exp2(), ln: exponent * std::f64::consts::LN_2 })
    }

    pub fn infinite() -> Beta {
        Beta { value: f64::INFINITY, ln: f64::INFINITY }
    }

    /// May be `inf`.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// The `j` with `β^j·anchor ≤ d < β^{j+1}·anchor`, for `d, anchor > 0`.
    pub fn index(&self, d: f64, anchor: f64) -> i64 {
        if !self.value.is_finite() {
            return if d >= anchor { 0 } else { -1 };
        }
        let mut j = ((d / anchor).ln() / self.ln).floor() as i64;
        let at = |j: i64| anchor * self.value.powi(j as i32);
        while j > i64::from(i32::MIN) && at(j) > d {
            j -= 1;
        }
        while j < i64::from(i32::MAX) && at(j + 1) <= d {
            j += 1;
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub j: i64,
    /// Ordered by `(degree, id)`.
    pub members: Vec<Vertex>,
}

impl Bucket {
    pub fn set(&self) -> VertexSet {
        VertexSet::new(self.members.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucketing {
    pub anchor: Vertex,
    pub beta: Beta,
    /// Nonempty buckets by increasing `j`.
    pub buckets: Vec<Bucket>,
    /// Index of the source cluster in its partition.
    pub cluster: usize,
}

fn sorted_by_degree(g: &Graph, cluster: &VertexSet) -> Result<Vec<Vertex>> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    for u in cluster.iter() {
        g.check_vertex(u)?;
    }
    let mut order = cluster.members().to_vec();
    order.sort_by(|&a, &b| g.degree(a).total_cmp(&g.degree(b)).then(a.cmp(&b)));
    Ok(order)
}

/// Groups a degree-sorted vertex list by bucket index relative to `anchor`.
fn group(g: &Graph, order: &[Vertex], anchor: Vertex, beta: Beta) -> Vec<Bucket> {
    let da = g.degree(anchor);
    let mut buckets: Vec<Bucket> = Vec::new();
    for &v in order {
        let j = if da > 0.0 && g.degree(v) > 0.0 {
            beta.index(g.degree(v), da)
        } else if g.degree(v) == da {
            0
        } else {
            // zero-degree anchors only arise for isolated vertices
            i64::from(g.degree(v) > da)
        };
        match buckets.last_mut() {
            Some(b) if b.j == j => b.members.push(v),
            _ => buckets.push(Bucket { j, members: vec![v] }),
        }
    }
    buckets
}

/// Anchors at the minimum-degree vertex (smallest id on ties), so only
/// `j ≥ 0` occurs.
pub fn bucket_from_min_degree(g: &Graph, cluster: &VertexSet, beta: Beta) -> Result<Bucketing> {
    let order = sorted_by_degree(g, cluster)?;
    let anchor = order[0];
    Ok(Bucketing { anchor, beta, buckets: group(g, &order, anchor, beta), cluster: 0 })
}

/// Anchors at the vertex whose own bucket `B(u) = B^0(u)` has the largest
/// volume (smaller degree, then smaller id, on ties) and buckets the whole
/// cluster around it. Sort plus a two-pointer window: `O(P log P)`.
pub fn bucket_from_max_volume(g: &Graph, cluster: &VertexSet, beta: Beta) -> Result<Bucketing> {
    let order = sorted_by_degree(g, cluster)?;
    let deg: Vec<f64> = order.iter().map(|&v| g.degree(v)).collect();
    let mut prefix = Vec::with_capacity(deg.len() + 1);
    prefix.push(0.0);
    for &d in &deg {
        prefix.push(prefix.last().unwrap() + d);
    }
    let in_window = |d: f64, da: f64| if da > 0.0 { beta.index(d, da) == 0 } else { d == da };
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut hi = 0;
    let mut lo = 0;
    while lo < order.len() {
        let da = deg[lo];
        hi = hi.max(lo);
        while hi < order.len() && in_window(deg[hi], da) {
            hi += 1;
        }
        let vol = prefix[hi] - prefix[lo];
        if vol > best.0 {
            best = (vol, lo);
        }
        // the next candidate anchor is the next distinct degree
        while lo < order.len() && deg[lo] == da {
            lo += 1;
        }
    }
    let anchor = order[best.1];
    Ok(Bucketing { anchor, beta, buckets: group(g, &order, anchor, beta), cluster: 0 })
}

/// `true` iff the total number of buckets is at most `k + ⌈log₂ n⌉`.
pub fn bucket_count_bound_check(bucketings: &[Bucketing], k: usize, n: usize) -> bool {
    let total: usize = bucketings.iter().map(|b| b.buckets.len()).sum();
    total <= k + ceil_log2(n)
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize }
}

/// `max(1, ln(w_max/w_min)/ln n)`; 1 for graphs without edges or with one vertex.
pub fn auto_gamma(g: &Graph) -> f64 {
    if g.m() == 0 || g.n() < 2 {
        return 1.0;
    }
    f64::max(1.0, (g.w_max() / g.w_min()).ln() / (g.n() as f64).ln())
}
