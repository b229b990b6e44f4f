//! Normalised Laplacian spectrum, spectral embedding and spectral clustering.

mod eigen;
mod kmeans;

use serde::Serialize;

pub use kmeans::{kmeans, kmeans_labels, KMEANS_RESTARTS};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition, VertexSet};

/// Graphs up to this many vertices are solved densely.
pub const DEFAULT_DENSE_THRESHOLD: usize = 256;

/// Eigenvalues below this are treated as zero when forming gap ratios.
pub const GAP_ZERO: f64 = 1e-12;

pub const DEFAULT_KMEANS_ITERS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    /// Matrix-vector budget; `None` means `10·n`.
    pub max_iter: Option<usize>,
    pub seed: u64,
    pub dense_threshold: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-8, max_iter: None, seed: 0, dense_threshold: DEFAULT_DENSE_THRESHOLD }
    }
}

/// Bottom eigenpairs of `L = I - D^{-1/2} A D^{-1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// One unit vector of length `n` per eigenvalue.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    /// `λ_r / λ_{r-1}` for the last two requested values.
    pub gap: Option<f64>,
    pub residual_norms: Vec<f64>,
}

impl SpectrumReport {
    /// `λ_{k+1}/λ_k` (1-indexed), if both are present and `λ_k` is nonzero.
    pub fn gap_at(&self, k: usize) -> Option<f64> {
        if k == 0 || k >= self.eigenvalues.len() {
            return None;
        }
        let (lk, lk1) = (self.eigenvalues[k - 1], self.eigenvalues[k]);
        (lk > GAP_ZERO).then(|| lk1 / lk)
    }
}

/// Bottom `r` eigenpairs, deterministic given `opts.seed`.
pub fn bottom_eigs(g: &Graph, r: usize, opts: &EigenOptions) -> Result<SpectrumReport> {
    let n = g.n();
    if r == 0 || r > n {
        return Err(Error::RankDeficient { requested: r, n });
    }
    let op = eigen::ShiftedOperator::new(g);
    let (values, mut vectors) = if n <= opts.dense_threshold {
        eigen::dense_bottom(g, r)
    } else {
        let budget = opts.max_iter.unwrap_or(10 * n).max(1);
        let res = eigen::krylov_bottom(&op, n, r, opts.tol, budget, opts.seed)?;
        (res.values, res.vectors)
    };
    for v in &mut vectors {
        fix_sign(v);
    }
    let residual_norms: Vec<f64> = values.iter().zip(&vectors).map(|(&l, v)| op.residual(v, l)).collect();
    let bad = values
        .iter()
        .zip(&residual_norms)
        .any(|(&l, &res)| !(res <= opts.tol * f64::max(1.0, l.abs())));
    if bad {
        return Err(Error::NoConvergence { residuals: residual_norms });
    }
    let mut report = SpectrumReport { eigenvalues: values, eigenvectors: vectors, gap: None, residual_norms };
    report.gap = report.gap_at(r - 1);
    Ok(report)
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Row-major point cloud, one row per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    points: Vec<f64>,
    dim: usize,
    n: usize,
}

impl Embedding {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Embedding {
        let n = rows.len();
        let dim = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == dim), "ragged embedding rows");
        Embedding { points: rows.into_iter().flatten().collect(), dim, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.points[u * self.dim..(u + 1) * self.dim]
    }
}

/// Row `u` is `(f_1(u), …, f_k(u))` scaled to unit length; zero rows stay zero.
pub fn spectral_embedding(report: &SpectrumReport, k: usize) -> Result<Embedding> {
    let available = report.eigenvectors.len();
    if k == 0 || k > available {
        return Err(Error::InsufficientVectors { requested: k, available });
    }
    let n = report.eigenvectors[0].len();
    let mut points = Vec::with_capacity(n * k);
    for u in 0..n {
        let row: Vec<f64> = report.eigenvectors[..k].iter().map(|f| f[u]).collect();
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            points.extend(row.iter().map(|x| x / norm));
        } else {
            points.extend(row);
        }
    }
    Ok(Embedding { points, dim: k, n })
}

/// Bottom `k` eigenvectors, row-normalised embedding, then k-means.
pub fn spectral_clustering(g: &Graph, k: usize, seed: u64) -> Result<Partition> {
    spectral_clustering_with(g, k, &EigenOptions { seed, ..EigenOptions::default() })
}

pub fn spectral_clustering_with(g: &Graph, k: usize, opts: &EigenOptions) -> Result<Partition> {
    if k < 2 || k > g.n() {
        return Err(Error::BadClusterCount(k));
    }
    let report = bottom_eigs(g, k, opts)?;
    let emb = spectral_embedding(&report, k)?;
    kmeans(&emb, k, opts.seed, DEFAULT_KMEANS_ITERS)
}

/// Sweep over `f_2(u)/√d_u` in increasing order. Returns the smaller-volume
/// side of the best prefix cut and its conductance. Needs `λ_2`'s vector in
/// `report` and at least two non-isolated vertices.
pub fn sweep_cut(g: &Graph, report: &SpectrumReport) -> Result<(VertexSet, f64)> {
    let f2 = report
        .eigenvectors
        .get(1)
        .ok_or(Error::InsufficientVectors { requested: 2, available: report.eigenvectors.len() })?;
    let n = g.n();
    if n < 2 {
        return Err(Error::Disconnected);
    }
    let score: Vec<f64> =
        (0..n).map(|u| if g.degree(u) > 0.0 { f2[u] / g.degree(u).sqrt() } else { 0.0 }).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));

    let total = g.total_volume();
    let mut inside = vec![false; n];
    let (mut cut, mut vol) = (0.0, 0.0);
    let mut best: Option<(f64, usize)> = None;
    for (i, &u) in order[..n - 1].iter().enumerate() {
        let to_inside: f64 = g.neighbors(u).filter(|&(v, _)| inside[v]).map(|(_, w)| w).sum();
        cut += g.degree(u) - 2.0 * to_inside;
        vol += g.degree(u);
        inside[u] = true;
        let denom = vol.min(total - vol);
        if denom > 0.0 {
            let phi = cut / denom;
            if best.is_none_or(|(b, _)| phi < b) {
                best = Some((phi, i + 1));
            }
        }
    }
    let (phi, len) = best.ok_or(Error::Disconnected)?;
    let prefix = VertexSet::new(order[..len].iter().copied());
    let prefix_vol = g.volume(&prefix);
    let set = if prefix_vol <= total - prefix_vol { prefix } else { prefix.complement(n) };
    Ok((set, phi))
}
