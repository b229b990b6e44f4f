//! Bottom eigenpairs of the normalised Laplacian.
//!
//! Small graphs go through a dense symmetric eigensolve. Larger graphs use a
//! block Krylov method with thick restarts on `M = 2I - L`, whose largest
//! eigenpairs are the smallest of `L`. `M` is applied through the adjacency
//! lists and never formed.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// `y = (2I - L) x`. Isolated vertices have `L_uu = 0`, hence `M_uu = 2`.
pub(crate) struct ShiftedOperator<'a> {
    g: &'a Graph,
    inv_sqrt_d: Vec<f64>,
}

impl<'a> ShiftedOperator<'a> {
    pub(crate) fn new(g: &'a Graph) -> Self {
        let inv_sqrt_d = g.degrees().iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
        ShiftedOperator { g, inv_sqrt_d }
    }

    pub(crate) fn apply(&self, x: &[f64], y: &mut [f64]) {
        for u in 0..self.g.n() {
            let su = self.inv_sqrt_d[u];
            if su == 0.0 {
                y[u] = 2.0 * x[u];
                continue;
            }
            let mut acc = 0.0;
            for (v, w) in self.g.neighbors(u) {
                acc += w * self.inv_sqrt_d[v] * x[v];
            }
            y[u] = x[u] + su * acc;
        }
    }

    /// `‖L x - λ x‖₂`
    pub(crate) fn residual(&self, x: &[f64], lambda: f64) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        // L x - λ x = (2 - λ) x - M x
        y.iter().zip(x).map(|(&mx, &xi)| ((2.0 - lambda) * xi - mx).powi(2)).sum::<f64>().sqrt()
    }
}

pub(crate) fn dense_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        if g.degree(u) > 0.0 {
            l[(u, u)] = 1.0;
        }
    }
    for e in g.edges() {
        let x = -e.w / (g.degree(e.u) * g.degree(e.v)).sqrt();
        l[(e.u, e.v)] = x;
        l[(e.v, e.u)] = x;
    }
    l
}

/// Dense solve; returns all `n` pairs in ascending order.
pub(crate) fn dense_bottom(g: &Graph, r: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(dense_laplacian(g));
    let mut idx: Vec<usize> = (0..g.n()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = idx[..r].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = idx[..r].iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    (values, vectors)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalises `x` against `basis` (two Gram–Schmidt passes) and
/// normalises it. `None` if nothing substantial is left.
fn orthonormalize(basis: &[Vec<f64>], mut x: Vec<f64>) -> Option<Vec<f64>> {
    let start = norm(&x);
    if start == 0.0 || !start.is_finite() {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
    let nx = norm(&x);
    if nx <= 1e-10 * start {
        return None;
    }
    x.iter_mut().for_each(|xi| *xi /= nx);
    Some(x)
}

pub(crate) struct KrylovResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Bottom `r` eigenpairs of `L` via the top of `M = 2I - L`.
pub(crate) fn krylov_bottom(
    op: &ShiftedOperator<'_>,
    n: usize,
    r: usize,
    tol: f64,
    max_matvecs: usize,
    seed: u64,
) -> Result<KrylovResult> {
    let block = r;
    let ncv = n.min((3 * r + 20).max(30));
    let keep = (2 * r + 4).min(ncv.saturating_sub(block)).max(r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_vector = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| rng.random::<f64>() - 0.5).collect() };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ncv);
    let mut images: Vec<Option<Vec<f64>>> = Vec::with_capacity(ncv);
    let mut h = vec![0.0; ncv * ncv];
    let mut attempts = 0;
    while basis.len() < block && attempts < 10 * block {
        attempts += 1;
        if let Some(v) = orthonormalize(&basis, random_vector(&mut rng)) {
            basis.push(v);
            images.push(None);
        }
    }

    let mut matvecs = 0usize;
    loop {
        // expand until every basis vector has its image under M
        let mut j = 0;
        while j < basis.len() {
            if images[j].is_none() {
                if matvecs >= max_matvecs {
                    basis.truncate(j);
                    images.truncate(j);
                    break;
                }
                let mut w = vec![0.0; n];
                op.apply(&basis[j], &mut w);
                matvecs += 1;
                for i in 0..basis.len() {
                    let hij = dot(&basis[i], &w);
                    h[i * ncv + j] = hij;
                    h[j * ncv + i] = hij;
                }
                if basis.len() < ncv {
                    let fresh = orthonormalize(&basis, w.clone()).or_else(|| {
                        (0..5).find_map(|_| orthonormalize(&basis, random_vector(&mut rng)))
                    });
                    if let Some(v) = fresh {
                        basis.push(v);
                        images.push(None);
                    }
                }
                images[j] = Some(w);
            }
            j += 1;
        }

        // Rayleigh-Ritz on the projected matrix
        let s = basis.len();
        if s < r {
            return Err(Error::NoConvergence { residuals: vec![f64::INFINITY; r] });
        }
        let proj = DMatrix::from_fn(s, s, |i, j| h[i * ncv + j]);
        let eig = SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let take = keep.min(s);
        let mut ritz = Vec::with_capacity(take);
        let mut ritz_images = Vec::with_capacity(take);
        let mut thetas = Vec::with_capacity(take);
        for &c in &order[..take] {
            let y = eig.eigenvectors.column(c);
            let mut x = vec![0.0; n];
            let mut mx = vec![0.0; n];
            for (k, &yk) in y.iter().enumerate() {
                let bk = &basis[k];
                let ik = images[k].as_ref().expect("image computed");
                for t in 0..n {
                    x[t] += yk * bk[t];
                    mx[t] += yk * ik[t];
                }
            }
            thetas.push(eig.eigenvalues[c]);
            ritz.push(x);
            ritz_images.push(mx);
        }
        let residuals: Vec<Vec<f64>> = (0..take)
            .map(|i| ritz_images[i].iter().zip(&ritz[i]).map(|(&mx, &x)| mx - thetas[i] * x).collect())
            .collect();
        let norms: Vec<f64> = residuals.iter().take(r).map(|v| norm(v)).collect();
        let converged = |i: usize| norms[i] <= tol * f64::max(1.0, (2.0 - thetas[i]).abs());
        if s == n || (0..r).all(converged) {
            return Ok(KrylovResult {
                values: thetas[..r].iter().map(|t| 2.0 - t).collect(),
                vectors: ritz.into_iter().take(r).collect(),
            });
        }
        if matvecs >= max_matvecs {
            return Err(Error::NoConvergence { residuals: norms });
        }

        // thick restart: keep the leading Ritz vectors, continue from residuals
        basis = ritz;
        images = ritz_images.into_iter().map(Some).collect();
        h.iter_mut().for_each(|x| *x = 0.0);
        for (i, &t) in thetas.iter().enumerate() {
            h[i * ncv + i] = t;
        }
        let before = basis.len();
        for (i, res) in residuals.into_iter().enumerate().take(r) {
            if basis.len() >= ncv || basis.len() - before >= block {
                break;
            }
            if converged(i) {
                continue;
            }
            if let Some(v) = orthonormalize(&basis, res) {
                basis.push(v);
                images.push(None);
            }
        }
        if basis.len() == before {
            if let Some(v) = (0..5).find_map(|_| orthonormalize(&basis, random_vector(&mut rng))) {
                basis.push(v);
                images.push(None);
            } else {
                return Err(Error::NoConvergence { residuals: norms });
            }
        }
    }
}
