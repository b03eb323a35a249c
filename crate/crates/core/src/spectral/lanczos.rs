//! Lanczos with full reorthogonalization, used for extreme eigenvalues.
//!
//! Norm estimates only need the largest `|theta|`, whose Ritz values
//! converge much faster under Lanczos than under subspace iteration when the
//! edge of the spectrum is crowded (as it is for random noise matrices).

use rand::Rng;

use super::subspace::{axpy, dot, norm};
use super::SymmetricOperator;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

const START_SEED: u64 = 0x1a9c_2b05;
const CHECK_EVERY: usize = 5;

/// Largest absolute eigenvalue, stopping when its Ritz residual
/// `beta_k |s_k|` is at most `tol * |theta|` or the Krylov space is exhausted.
pub(crate) fn largest_magnitude<M>(m: &M, tol: f64, max_steps: usize) -> Result<f64>
where
    M: SymmetricOperator + ?Sized,
{
    let n = m.dim();
    if n == 0 {
        return Ok(0.0);
    }
    let steps = max_steps.max(1).min(n);
    let mut rng = rng::stream(START_SEED, Stream::StartVectors);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|x| *x /= q_norm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut scale = 0.0f64;
    let mut w = vec![0.0; n];
    let mut last = (0.0, f64::INFINITY);

    for k in 1..=steps {
        m.apply(&q, &mut w);
        let alpha = dot(&q, &w);
        basis.push(q);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let beta = norm(&w);
        alphas.push(alpha);
        scale = scale.max(alpha.abs()).max(beta);

        let exhausted = beta <= 1e-13 * scale || k == steps;
        if k % CHECK_EVERY == 0 || exhausted {
            let (theta, last_component) = extreme_ritz(&alphas, &betas);
            let residual = beta * last_component.abs();
            last = (theta, residual);
            if residual <= tol * theta.abs() || theta == 0.0 && scale == 0.0 || beta <= 1e-13 * scale {
                return Ok(theta.abs());
            }
            if k == n {
                // The Krylov space is the whole space: T_n is similar to M.
                return Ok(theta.abs());
            }
        }
        if k == steps {
            break;
        }
        betas.push(beta);
        q = w.iter().map(|x| x / beta).collect();
    }
    Err(Error::NonConvergence {
        iterations: steps,
        residual: last.1,
    })
}

/// Ritz value of largest magnitude of the tridiagonal matrix and the last
/// component of its eigenvector.
fn extreme_ritz(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let mut d = alphas.to_vec();
    let mut e: Vec<f64> = betas[..k - 1].to_vec();
    e.push(0.0);
    let mut last_row = vec![0.0; k];
    last_row[k - 1] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut last_row);
    let best = (0..k)
        .max_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()).then(d[i].total_cmp(&d[j])))
        .expect("nonempty");
    (d[best], last_row[best])
}

/// Implicit QL on the tridiagonal matrix with diagonal `d` and off-diagonal
/// `e` (`e[i]` couples `i` and `i + 1`, `e[k-1]` unused). On return `d`
/// holds the eigenvalues and `row` the corresponding entries of one row of
/// the eigenvector matrix (pass a unit vector to select the row).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], row: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = row[i + 1];
                row[i + 1] = s * row[i] + c * f;
                row[i] = c * row[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{symmetric_eigen, SparseSym};

    #[test]
    fn tridiagonal_matches_jacobi() {
        let alphas = [2.0, -1.0, 0.5, 3.0, 0.0];
        let betas = [1.0, 0.3, 2.0, 0.7];
        let n = alphas.len();
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            dense[i * n + i] = alphas[i];
            if i + 1 < n {
                dense[i * n + i + 1] = betas[i];
                dense[(i + 1) * n + i] = betas[i];
            }
        }
        let (mut want, vecs) = symmetric_eigen(&dense, n);
        let mut d = alphas.to_vec();
        let mut e = betas.to_vec();
        e.push(0.0);
        let mut row = vec![0.0; n];
        row[n - 1] = 1.0;
        tridiagonal_ql(&mut d, &mut e, &mut row);
        for (j, &lam) in d.iter().enumerate() {
            let col = (0..n).min_by(|&a, &b| (want[a] - lam).abs().total_cmp(&(want[b] - lam).abs())).unwrap();
            assert!((want[col] - lam).abs() < 1e-12);
            // Eigenvectors agree up to sign in their last component.
            assert!((vecs[(n - 1) * n + col].abs() - row[j].abs()).abs() < 1e-10);
        }
        want.sort_by(f64::total_cmp);
        d.sort_by(f64::total_cmp);
        assert!(want.iter().zip(&d).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn finds_negative_extreme() {
        let m = SparseSym::from_triplets(3, [(0, 0, -5.0), (1, 1, 3.0), (2, 2, 1.0)]).unwrap();
        assert!((largest_magnitude(&m, 1e-12, 100).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(largest_magnitude(&SparseSym::zeros(4), 1e-8, 10).unwrap(), 0.0);
    }
}
