//! Planted-partition random graphs and Gaussian-kernel similarity graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::tree::HcTree;

/// Blocks at most this large are sampled pair by pair; larger ones skip
/// geometrically between edges.
pub const BERNOULLI_MAX_BLOCK: usize = 2000;

pub const DEFAULT_KERNEL_THRESHOLD: f64 = 1e-12;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) { Ok(()) } else { Err(Error::BadProbability(p)) }
}

/// Stochastic block model with `k` blocks of `n_k` vertices. Block `b` holds
/// vertices `b·n_k .. (b+1)·n_k`. Isolated vertices are kept.
pub fn gen_sbm(k: usize, n_k: usize, p: f64, q: f64, seed: u64) -> Result<(Graph, Partition)> {
    check_probability(p)?;
    check_probability(q)?;
    let probs: Vec<Vec<f64>> = (0..k).map(|a| (0..k).map(|b| if a == b { p } else { q }).collect()).collect();
    gen_planted(&vec![n_k; k], &probs, seed)
}

/// Edge probabilities of the five-block hierarchical model: `p` inside
/// blocks; between blocks (1-indexed) `3q` for {1,2}, `2q` for {1,3}, {2,3}
/// and {4,5}, and `q` from {1,2,3} to {4,5}.
pub fn hsbm_probabilities(p: f64, q_min: f64) -> [[f64; 5]; 5] {
    let mut m = [[q_min; 5]; 5];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = p;
    }
    let mut set = |i: usize, j: usize, v: f64| {
        m[i - 1][j - 1] = v;
        m[j - 1][i - 1] = v;
    };
    set(1, 2, 3.0 * q_min);
    set(1, 3, 2.0 * q_min);
    set(2, 3, 2.0 * q_min);
    set(4, 5, 2.0 * q_min);
    m
}

pub fn gen_hsbm(n_k: usize, p: f64, q_min: f64, seed: u64) -> Result<(Graph, Partition)> {
    check_probability(p)?;
    check_probability(q_min)?;
    let m = hsbm_probabilities(p, q_min);
    for row in &m {
        for &x in row {
            check_probability(x)?;
        }
    }
    let probs: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
    gen_planted(&[n_k; 5], &probs, seed)
}

/// General planted model: blocks of the given sizes, symmetric probability
/// matrix. Each block pair draws from its own stream of `seed`, so the output
/// does not depend on sampling order.
pub fn gen_planted(sizes: &[usize], probs: &[Vec<f64>], seed: u64) -> Result<(Graph, Partition)> {
    let k = sizes.len();
    let n: usize = sizes.iter().sum();
    if n < 2 {
        return Err(Error::BadConfig(format!("planted model needs at least 2 vertices, got {n}")));
    }
    if probs.len() != k || probs.iter().any(|r| r.len() != k) {
        return Err(Error::BadConfig("probability matrix does not match block count".into()));
    }
    for a in 0..k {
        for b in 0..k {
            check_probability(probs[a][b])?;
            if probs[a][b] != probs[b][a] {
                return Err(Error::BadConfig(format!("probability matrix not symmetric at ({a}, {b})")));
            }
        }
    }
    let mut offset = vec![0; k + 1];
    for b in 0..k {
        offset[b + 1] = offset[b] + sizes[b];
    }
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a..k {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((a * k + b) as u64);
            let p = probs[a][b];
            let (oa, ob) = (offset[a], offset[b]);
            let geometric = sizes[a].max(sizes[b]) > BERNOULLI_MAX_BLOCK;
            if a == b {
                let s = sizes[a];
                let total = s * s.saturating_sub(1) / 2;
                sample_pairs(&mut rng, total, p, geometric, |idx| {
                    let (i, j) = triangle_pair(idx);
                    edges.push((oa + i, oa + j, 1.0));
                });
            } else {
                let cols = sizes[b];
                sample_pairs(&mut rng, sizes[a] * cols, p, geometric, |idx| {
                    edges.push((oa + idx / cols, ob + idx % cols, 1.0));
                });
            }
        }
    }
    let labels: Vec<usize> = (0..k).flat_map(|b| std::iter::repeat_n(b, sizes[b])).collect();
    let graph = Graph::from_edges(n, &edges)?;
    Ok((graph, Partition::from_labels(&labels)?))
}

/// Calls `emit` with every selected index in `0..total`, each chosen
/// independently with probability `p`.
fn sample_pairs(rng: &mut ChaCha8Rng, total: usize, p: f64, geometric: bool, mut emit: impl FnMut(usize)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(emit);
        return;
    }
    if !geometric {
        for idx in 0..total {
            if rng.random::<f64>() < p {
                emit(idx);
            }
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut idx = 0usize;
    loop {
        // gap to the next success is geometric on {0, 1, ...}
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (total - idx) as f64 {
            return;
        }
        idx += skip as usize;
        emit(idx);
        idx += 1;
        if idx >= total {
            return;
        }
    }
}

/// Maps a linear index to the pair `(i, j)`, `i < j`, enumerating
/// `(0,1), (0,2), (1,2), (0,3), ...` column by column.
fn triangle_pair(idx: usize) -> (usize, usize) {
    let mut j = (((8.0 * idx as f64 + 1.0).sqrt() + 1.0) / 2.0) as usize;
    while j * (j - 1) / 2 > idx {
        j -= 1;
    }
    while (j + 1) * j / 2 <= idx {
        j += 1;
    }
    (idx - j * (j - 1) / 2, j)
}

/// Random connected graph on `n` vertices: a uniform random recursive tree
/// plus every other pair independently with probability `p`. Weights are
/// uniform in `[w_lo, w_hi)`.
pub fn gen_random_connected(n: usize, p: f64, w_lo: f64, w_hi: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    if !(w_lo > 0.0 && w_hi >= w_lo) {
        return Err(Error::BadConfig(format!("weight range [{w_lo}, {w_hi}) must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = |rng: &mut ChaCha8Rng| if w_hi > w_lo { rng.random_range(w_lo..w_hi) } else { w_lo };
    let mut edges = Vec::new();
    let mut linked = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        linked.insert((u, v));
        edges.push((u, v, weight(&mut rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !linked.contains(&(u, v)) && rng.random::<f64>() < p {
                edges.push((u, v, weight(&mut rng)));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random binary tree over leaves `0..n`, built by joining two uniformly
/// chosen subtrees until one remains.
pub fn gen_random_tree(n: usize, seed: u64) -> Result<HcTree> {
    if n == 0 {
        return Err(Error::EmptyLeafSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forest: Vec<HcTree> = (0..n).map(HcTree::leaf).collect();
    while forest.len() > 1 {
        let a = forest.swap_remove(rng.random_range(0..forest.len()));
        let b = forest.swap_remove(rng.random_range(0..forest.len()));
        forest.push(HcTree::join(&a, &b)?);
    }
    Ok(forest.pop().expect("one tree left"))
}

/// Complete similarity graph with `w = exp(-‖x_u - x_v‖² / (2σ²))`, dropping
/// weights below `threshold`. Vertex `u` is row `u` of `points`.
pub fn gaussian_kernel_graph(points: &[Vec<f64>], sigma: f64, threshold: f64) -> Result<Graph> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::BadSigma(sigma));
    }
    let n = points.len();
    if n < 2 {
        return Err(Error::BadConfig(format!("kernel graph needs at least 2 points, got {n}")));
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().position(|p| p.len() != dim) {
        return Err(Error::BadConfig(format!("point {bad} has {} coordinates, expected {dim}", points[bad].len())));
    }
    let scale = 2.0 * sigma * sigma;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let d2: f64 = points[u].iter().zip(&points[v]).map(|(a, b)| (a - b) * (a - b)).sum();
            let w = (-d2 / scale).exp();
            if w > 0.0 && w >= threshold {
                edges.push((u, v, w));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_between(g: &Graph, part: &Partition, a: usize, b: usize) -> usize {
        g.edges()
            .iter()
            .filter(|e| {
                let (x, y) = (part.label(e.u), part.label(e.v));
                (x, y) == (a, b) || (x, y) == (b, a)
            })
            .count()
    }

    fn within_4_sigma(count: usize, trials: f64, p: f64) -> bool {
        let mean = trials * p;
        let sd = (trials * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= 4.0 * sd
    }

    #[test]
    fn deterministic_limits() {
        let (g, part) = gen_sbm(3, 4, 1.0, 0.0, 1).unwrap();
        assert_eq!(g.m(), 3 * 6);
        assert_eq!(part.k(), 3);
        assert_eq!(g.components().0, 3);
        let (g, _) = gen_sbm(3, 4, 0.0, 0.0, 1).unwrap();
        assert_eq!((g.n(), g.m()), (12, 0));
    }

    #[test]
    fn intra_block_count_is_binomial() {
        let (g, part) = gen_sbm(5, 100, 0.1, 0.002, 7).unwrap();
        let intra: usize = (0..5).map(|b| count_between(&g, &part, b, b)).sum();
        assert!(within_4_sigma(intra, 5.0 * 4950.0, 0.1), "{intra}");
    }

    #[test]
    fn reproducible() {
        let a = gen_sbm(4, 50, 0.2, 0.01, 3).unwrap().0;
        let b = gen_sbm(4, 50, 0.2, 0.01, 3).unwrap().0;
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), gen_sbm(4, 50, 0.2, 0.01, 4).unwrap().0.edges());
    }

    #[test]
    fn bad_probability() {
        assert_eq!(gen_sbm(2, 5, 1.5, 0.0, 0).unwrap_err(), Error::BadProbability(1.5));
        assert!(gen_hsbm(5, 0.1, 0.5, 0).is_err());
    }

    #[test]
    fn hsbm_matrix_is_symmetric() {
        let m = hsbm_probabilities(0.1, 0.0005);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
        assert_eq!(m[0][1], 3.0 * 0.0005);
        assert_eq!(m[0][2], 2.0 * 0.0005);
        assert_eq!(m[3][4], 2.0 * 0.0005);
        assert_eq!(m[2][3], 0.0005);
    }

    #[test]
    fn hsbm_without_cross_edges() {
        let (g, part) = gen_hsbm(30, 0.3, 0.0, 2).unwrap();
        assert!(g.edges().iter().all(|e| part.label(e.u) == part.label(e.v)));
    }

    #[test]
    fn hsbm_cross_count_is_binomial() {
        let (g, part) = gen_hsbm(600, 0.1, 0.0005, 9).unwrap();
        let c = count_between(&g, &part, 0, 1);
        assert!(within_4_sigma(c, 360000.0, 0.0015), "{c}");
    }

    #[test]
    fn geometric_sampling_matches_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hits = Vec::new();
        sample_pairs(&mut rng, 1_000_000, 0.01, true, |i| hits.push(i));
        assert!(within_4_sigma(hits.len(), 1e6, 0.01));
        assert!(hits.windows(2).all(|w| w[0] < w[1]));
        assert!(hits.iter().all(|&i| i < 1_000_000));
    }

    #[test]
    fn triangle_indexing() {
        let pairs: Vec<_> = (0..6).map(triangle_pair).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]);
        let big = 2999 * 3000 / 2 - 1;
        assert_eq!(triangle_pair(big), (2998, 2999));
    }

    #[test]
    fn random_connected_is_connected() {
        for seed in 0..20 {
            let g = gen_random_connected(1 + seed as usize % 9, 0.2, 0.5, 2.0, seed).unwrap();
            assert!(g.is_connected());
            assert!(g.edges().iter().all(|e| (0.5..2.0).contains(&e.w)));
        }
    }

    #[test]
    fn random_tree_is_bijective() {
        for n in 1..20 {
            let t = gen_random_tree(n, n as u64).unwrap();
            assert!(t.is_bijective() && t.n_leaves() == n);
        }
    }

    #[test]
    fn kernel_weights() {
        let g = gaussian_kernel_graph(&[vec![0.0, 0.0], vec![0.0, 0.0]], 1.0, 1e-12).unwrap();
        assert_eq!(g.edges()[0].w, 1.0);
        let s = 0.7;
        let g = gaussian_kernel_graph(&[vec![0.0], vec![s * 2f64.sqrt()]], s, 1e-12).unwrap();
        assert!((g.edges()[0].w - (-1f64).exp()).abs() < 1e-15);
        let pts = [vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5]];
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * 4.0).collect()).collect();
        let a = gaussian_kernel_graph(&pts, 1.3, 0.0).unwrap();
        let b = gaussian_kernel_graph(&scaled, 5.2, 0.0).unwrap();
        for (x, y) in a.edges().iter().zip(b.edges()) {
            assert!((x.w - y.w).abs() <= 1e-15 * x.w.max(1.0));
        }
        assert_eq!(gaussian_kernel_graph(&pts, 0.0, 0.0).unwrap_err(), Error::BadSigma(0.0));
    }
}
