//! Dense reference computations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sbm_spectral::spectral::{BipartiteSparse, SparseSym, Subspace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense symmetric Gaussian matrix and its sparse copy.
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> (DMatrix<f64>, SparseSym) {
    let mut dense = DMatrix::zeros(n, n);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.sample(StandardNormal);
            dense[(i, j)] = x;
            dense[(j, i)] = x;
            triplets.push((i, j, x));
        }
    }
    (dense, SparseSym::from_triplets(n, triplets).unwrap())
}

/// Random 0/1 matrix with entry density `density`.
pub fn random_bipartite(rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> (DMatrix<f64>, BipartiteSparse) {
    let mut dense = DMatrix::zeros(rows, cols);
    let mut entries = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.random::<f64>() < density {
                dense[(i, j)] = 1.0;
                entries.push((i, j));
            }
        }
    }
    (dense, BipartiteSparse::from_entries(rows, cols, entries).unwrap())
}

/// Eigenvalues descending with their eigenvectors as columns.
pub fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Orthonormal basis of the top-`r` algebraic eigenspace.
pub fn top_eigvecs(m: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    sorted_eigen(m).1.columns(0, r).into_owned()
}

/// Top-`r` left singular vectors and all singular values, descending.
pub fn top_left_singular(m: &DMatrix<f64>, r: usize) -> (DMatrix<f64>, Vec<f64>) {
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let basis = DMatrix::from_fn(m.nrows(), r, |row, c| u[(row, order[c])]);
    (basis, order.iter().map(|&i| svd.singular_values[i]).collect())
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn to_matrix(s: &Subspace) -> DMatrix<f64> {
    let basis = s.basis();
    DMatrix::from_fn(s.dimension(), basis.len(), |r, c| basis[c][r])
}

/// Sine of the largest principal angle, computed as `||(I - Q Q^T) U||`,
/// which stays accurate for tiny angles.
pub fn sin_angle(q: &DMatrix<f64>, u: &DMatrix<f64>) -> f64 {
    let residual = u - q * (q.transpose() * u);
    spectral_norm(&residual)
}

/// Smallest `max_i (1 - |T_i ∩ P_pi(i)| / |T_i|)` over all bijections `pi`.
pub fn brute_force_gamma(pred: &[usize], truth: &[usize], k: usize) -> f64 {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let mut worst: f64 = 0.0;
        for i in 0..k {
            let size = truth.iter().filter(|&&t| t == i).count();
            if size == 0 {
                continue;
            }
            let hit = truth.iter().zip(pred).filter(|&(&t, &q)| t == i && q == p[i]).count();
            worst = worst.max(1.0 - hit as f64 / size as f64);
        }
        best = best.min(worst);
    });
    best
}

fn permute(p: &mut Vec<usize>, start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}
