use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Embedding;
use crate::error::{Error, Result};
use crate::graph::Partition;

pub const KMEANS_RESTARTS: u64 = 5;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding, Lloyd iterations to a fixed point (or `max_iter`),
/// best of [`KMEANS_RESTARTS`] runs by within-cluster sum of squares. Empty
/// clusters are refilled with the point of the largest cluster farthest from
/// its centre. Parts are numbered by smallest member.
pub fn kmeans(points: &Embedding, k: usize, seed: u64, max_iter: usize) -> Result<Partition> {
    let (labels, _) = kmeans_labels(points, k, seed, max_iter)?;
    Ok(Partition::from_labels(&labels)?.canonical())
}

/// Like [`kmeans`] but returns raw labels and the objective.
pub fn kmeans_labels(points: &Embedding, k: usize, seed: u64, max_iter: usize) -> Result<(Vec<usize>, f64)> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        let centers = plus_plus(points, k, &mut rng);
        let (labels, wcss) = lloyd(points, centers, max_iter);
        if best.as_ref().is_none_or(|(_, b)| wcss < *b) {
            best = Some((labels, wcss));
        }
    }
    Ok(best.expect("at least one restart"))
}

fn plus_plus(points: &Embedding, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![points.row(first).to_vec()];
    let mut d2: Vec<f64> = (0..n).map(|u| sq_dist(points.row(u), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (u, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(u);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive mass")
        } else {
            let free: Vec<usize> = (0..n).filter(|&u| !chosen[u]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centers.push(points.row(pick).to_vec());
        for u in 0..n {
            d2[u] = d2[u].min(sq_dist(points.row(u), &centers[centers.len() - 1]));
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn recompute_centers(points: &Embedding, labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = points.dim();
    let mut centers = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (u, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (c, x) in centers[l].iter_mut().zip(points.row(u)) {
            *c += x;
        }
    }
    for (c, &cnt) in centers.iter_mut().zip(&counts) {
        if cnt > 0 {
            c.iter_mut().for_each(|x| *x /= cnt as f64);
        }
    }
    (centers, counts)
}

/// Moves, for each empty cluster, the farthest point of the currently
/// largest cluster into it.
fn repair_empty(points: &Embedding, labels: &mut [usize], k: usize) {
    loop {
        let (centers, counts) = recompute_centers(points, labels, k);
        let Some(empty) = counts.iter().position(|&c| c == 0) else { return };
        let largest = (0..k).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).expect("k > 0");
        let mut far = None;
        let mut far_d = -1.0;
        for (u, &l) in labels.iter().enumerate() {
            if l == largest {
                let d = sq_dist(points.row(u), &centers[largest]);
                if d > far_d {
                    far_d = d;
                    far = Some(u);
                }
            }
        }
        labels[far.expect("largest cluster is non-empty")] = empty;
    }
}

fn lloyd(points: &Embedding, mut centers: Vec<Vec<f64>>, max_iter: usize) -> (Vec<usize>, f64) {
    let n = points.len();
    let k = centers.len();
    let mut labels: Vec<usize> = (0..n).map(|u| nearest(points.row(u), &centers)).collect();
    repair_empty(points, &mut labels, k);
    for _ in 0..max_iter {
        centers = recompute_centers(points, &labels, k).0;
        let mut next: Vec<usize> = (0..n).map(|u| nearest(points.row(u), &centers)).collect();
        repair_empty(points, &mut next, k);
        if next == labels {
            break;
        }
        labels = next;
    }
    let centers = recompute_centers(points, &labels, k).0;
    let wcss = (0..n).map(|u| sq_dist(points.row(u), &centers[labels[u]])).sum();
    (labels, wcss)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(rows: &[&[f64]]) -> Embedding {
        Embedding::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    /// WCSS of a labelling, computed from scratch.
    fn wcss(points: &Embedding, labels: &[usize], k: usize) -> f64 {
        let (c, _) = recompute_centers(points, labels, k);
        (0..points.len()).map(|u| sq_dist(points.row(u), &c[labels[u]])).sum()
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let p = emb(&[&[0.0], &[1.0], &[5.0]]);
        let (labels, obj) = kmeans_labels(&p, 3, 7, 100).unwrap();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
        assert_eq!(obj, 0.0);
    }

    #[test]
    fn one_dimensional_split_matches_enumeration() {
        let p = emb(&[&[0.0], &[0.1], &[10.0], &[10.1]]);
        // oracle: all 2-partitions
        let mut best = (f64::INFINITY, 0u32);
        for mask in 1u32..(1 << 4) - 1 {
            let labels: Vec<usize> = (0..4).map(|u| (mask >> u & 1) as usize).collect();
            let v = wcss(&p, &labels, 2);
            if v < best.0 {
                best = (v, mask);
            }
        }
        let part = kmeans(&p, 2, 1, 100).unwrap();
        assert_eq!(part.part(0).members(), &[0, 1]);
        assert_eq!(part.part(1).members(), &[2, 3]);
        let labels = part.labels().to_vec();
        assert!((wcss(&p, &labels, 2) - best.0).abs() < 1e-12);
    }

    #[test]
    fn identical_points_still_give_k_clusters() {
        let p = Embedding::from_rows(vec![vec![1.0, 1.0]; 6]);
        let (labels, obj) = kmeans_labels(&p, 2, 3, 100).unwrap();
        assert_eq!(obj, 0.0);
        assert!(labels.contains(&0) && labels.contains(&1));
    }

    #[test]
    fn rejects_bad_k() {
        let p = emb(&[&[0.0], &[1.0]]);
        assert_eq!(kmeans(&p, 3, 0, 10).unwrap_err(), Error::KTooLarge { k: 3, n: 2 });
        assert!(kmeans(&p, 0, 0, 10).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i * 37 % 11) as f64, (i * 13 % 7) as f64]).collect();
        let p = Embedding::from_rows(rows);
        assert_eq!(kmeans_labels(&p, 4, 99, 100).unwrap(), kmeans_labels(&p, 4, 99, 100).unwrap());
    }
}
