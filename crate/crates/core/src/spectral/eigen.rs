//! Subspace iteration with Rayleigh-Ritz extraction.
//!
//! A block of `p > r` vectors is repeatedly multiplied by the operator
//! (shifted by `sigma * I` when the algebraically largest eigenvalues are
//! wanted, with `sigma` tracking the largest Ritz magnitude seen so that the
//! negative end of the spectrum is never amplified) and re-orthonormalized.
//! After every multiplication the block's Rayleigh quotient is diagonalized;
//! the iteration stops once the `r` target Ritz pairs satisfy
//! `||M q - theta q|| <= tol * ||M||`.

use rand::Rng;
use rayon::prelude::*;

use super::jacobi::symmetric_eigen;
use super::subspace::{axpy, dot, norm, orthogonalize_against, Subspace};
use super::{BipartiteSparse, RowGram, SymmetricOperator};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

const START_SEED: u64 = 0x5eed_5bec_42;
const PARALLEL_DIM: usize = 2048;
const NORM_MAX_STEPS: usize = 1000;

/// Which end of the spectrum counts as "top".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenOrder {
    /// Largest eigenvalues by signed value.
    #[default]
    Algebraic,
    /// Largest eigenvalues by absolute value.
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub order: EigenOrder,
    /// Block size; defaults to `max(2r, r + 8)` capped at the dimension.
    pub block_size: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            order: EigenOrder::Algebraic,
            block_size: None,
        }
    }
}

impl EigenOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_order(mut self, order: EigenOrder) -> Self {
        self.order = order;
        self
    }
}

/// Top-`r` invariant subspace with its Ritz values and diagnostics.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub subspace: Subspace,
    /// Ritz values in target order (for singular spaces: singular values).
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// The `r`-th and `(r+1)`-th Ritz values coincide within `tol`.
    pub degenerate_gap: bool,
}

/// Basis of the invariant subspace of the `r` top eigenvalues of `m`.
pub fn top_eigenspace<M>(m: &M, r: usize, opts: &EigenOptions) -> Result<Eigenspace>
where
    M: SymmetricOperator + ?Sized,
{
    let n = m.dim();
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "requested rank {r} for dimension {n}"
        )));
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let p = opts
        .block_size
        .unwrap_or_else(|| (2 * r).max(r + 8))
        .max(r)
        .min(n);

    let mut fallback = rng::stream(START_SEED, Stream::StartVectors);
    let mut block = orthonormal_block(
        (0..p).map(|_| random_vector(n, &mut fallback)).collect(),
        &mut fallback,
    );
    let mut sigma = 0.0f64;
    let mut scale = 0.0f64;
    let mut worst = f64::INFINITY;

    for iteration in 1..=opts.max_iter.max(1) {
        let images = apply_block(m, &block);
        let mut h = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..=i {
                let hij = 0.5 * (dot(&block[i], &images[j]) + dot(&block[j], &images[i]));
                h[i * p + j] = hij;
                h[j * p + i] = hij;
            }
        }
        let (theta, s) = symmetric_eigen(&h, p);
        let mut order: Vec<usize> = (0..p).collect();
        match opts.order {
            EigenOrder::Algebraic => order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a])),
            EigenOrder::Magnitude => order.sort_by(|&a, &b| {
                theta[b]
                    .abs()
                    .total_cmp(&theta[a].abs())
                    .then(theta[b].total_cmp(&theta[a]))
            }),
        }
        let ritz: Vec<Vec<f64>> = order.iter().map(|&c| rotate(&block, &s, p, c)).collect();
        let ritz_images: Vec<Vec<f64>> = order.iter().map(|&c| rotate(&images, &s, p, c)).collect();
        let values: Vec<f64> = order.iter().map(|&c| theta[c]).collect();
        scale = values.iter().fold(scale, |acc, v| acc.max(v.abs()));

        let residuals: Vec<f64> = (0..r)
            .map(|i| {
                let mut res = ritz_images[i].clone();
                axpy(-values[i], &ritz[i], &mut res);
                norm(&res)
            })
            .collect();
        worst = residuals.iter().copied().fold(0.0, f64::max);

        if worst <= opts.tol * scale {
            let degenerate_gap = p > r && {
                let key = |v: f64| match opts.order {
                    EigenOrder::Algebraic => v,
                    EigenOrder::Magnitude => v.abs(),
                };
                (key(values[r - 1]) - key(values[r])).abs() <= opts.tol * scale
            };
            if degenerate_gap {
                log::warn!(
                    "eigenvalues {} and {} are not separated (gap below {:.1e})",
                    r,
                    r + 1,
                    opts.tol * scale
                );
            }
            let basis = ritz.into_iter().take(r).collect();
            return Ok(Eigenspace {
                subspace: Subspace::from_parts(n, basis),
                values: values[..r].to_vec(),
                residuals,
                iterations: iteration,
                degenerate_gap,
            });
        }

        if opts.order == EigenOrder::Algebraic {
            sigma = scale;
        }
        let next: Vec<Vec<f64>> = ritz_images
            .into_iter()
            .zip(&ritz)
            .map(|(mut img, q)| {
                if sigma != 0.0 {
                    axpy(sigma, q, &mut img);
                }
                img
            })
            .collect();
        block = orthonormal_block(next, &mut fallback);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: worst,
    })
}

/// Top-`r` left singular subspace of `b`, via the operator `B B^T`.
/// `values` holds the singular values.
pub fn top_left_singular_space(b: &BipartiteSparse, r: usize, opts: &EigenOptions) -> Result<Eigenspace> {
    let gram = RowGram(b);
    let opts = EigenOptions {
        order: EigenOrder::Magnitude,
        ..*opts
    };
    let mut space = top_eigenspace(&gram, r, &opts)?;
    let largest = space.values.first().copied().unwrap_or(0.0);
    let smallest = space.values.last().copied().unwrap_or(0.0);
    if largest <= 0.0 || smallest <= 1e-12 * largest {
        return Err(Error::RankDeficient { requested: r });
    }
    space.values = space.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok(space)
}

/// Largest absolute eigenvalue of `m`, converged to relative tolerance `tol`.
///
/// Uses Lanczos rather than subspace iteration: only the extreme Ritz value
/// is needed, and it converges in far fewer products on crowded spectra.
pub fn spectral_norm<M>(m: &M, tol: f64) -> Result<f64>
where
    M: SymmetricOperator + ?Sized,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    super::lanczos::largest_magnitude(m, tol, NORM_MAX_STEPS)
}

fn apply_block<M: SymmetricOperator + ?Sized>(m: &M, block: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.dim();
    let run = |x: &Vec<f64>| {
        let mut y = vec![0.0; n];
        m.apply(x, &mut y);
        y
    };
    if n >= PARALLEL_DIM {
        block.par_iter().map(run).collect()
    } else {
        block.iter().map(run).collect()
    }
}

/// Column `c` of `vectors * s` where `s` is row-major `p x p`.
fn rotate(vectors: &[Vec<f64>], s: &[f64], p: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for (k, v) in vectors.iter().enumerate() {
        let coef = s[k * p + c];
        if coef != 0.0 {
            axpy(coef, v, &mut out);
        }
    }
    out
}

fn random_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Orthonormalizes in order, replacing vectors that collapse (the operator
/// annihilated them) with fresh random directions.
fn orthonormal_block<R: Rng>(vectors: Vec<Vec<f64>>, rng: &mut R) -> Vec<Vec<f64>> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let scale = norm(&v);
        if !orthogonalize_against(&mut v, &basis, scale) {
            loop {
                let mut fresh = random_vector(n, rng);
                let s = norm(&fresh);
                if orthogonalize_against(&mut fresh, &basis, s) {
                    v = fresh;
                    break;
                }
            }
        }
        basis.push(v);
    }
    basis
}
