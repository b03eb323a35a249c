//! Perturbation norms of the trimmed adjacency matrix.
//!
//! With `Abar0` the expected adjacency matrix (block means, diagonal
//! included) and `Abar`, `A` the expected and observed matrices with the
//! rows and columns of high-degree vertices zeroed, `A = Abar0 + Delta + E`
//! where `Delta = Abar - Abar0` and `E = A - Abar`. The block means are
//! dense, so all three are applied matrix-free.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sample_sbm, SbmParams};
use crate::rng::trial_seed;
use crate::spectral::{
    spectral_norm, subspace_angle, top_eigenspace, trim_graph, EigenOptions, SparseSym, Subspace, SymmetricOperator,
};

/// Options of [`verify_norm_bounds_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Vertices with degree above `trim_factor * d` are trimmed, `d = a + (k-1) b`.
    pub trim_factor: f64,
    /// Relative tolerance of the norm estimates.
    pub norm_tol: f64,
    #[serde(skip, default)]
    pub eigen: EigenOptions,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            trim_factor: 20.0,
            norm_tol: 1e-6,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTrial {
    pub seed: u64,
    pub trimmed: usize,
    pub delta_norm: f64,
    pub e_norm: f64,
    pub e_over_sqrt_d: f64,
    /// `sin` of the angle between the top-`k` eigenspaces of `A` and `Abar0`.
    pub sin_angle: f64,
    /// `(||E|| + ||Delta||) / lambda_k - sin_angle`; absent when `lambda_k = 0`.
    pub davis_kahan_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub params: SbmParams,
    /// Expected degree scale `a + (k-1) b`.
    pub d: f64,
    /// `k`-th eigenvalue of `Abar0`.
    pub lambda_k: f64,
    pub trials: Vec<NormTrial>,
    pub delta_at_most_one: f64,
    pub max_e_over_sqrt_d: f64,
    pub min_davis_kahan_slack: Option<f64>,
}

/// Block-mean matrix `Abar0`, optionally restricted to kept vertices.
struct BlockMean<'a> {
    params: &'a SbmParams,
    kept: Option<&'a [bool]>,
}

impl BlockMean<'_> {
    fn apply_into(&self, x: &[f64], y: &mut [f64], sign: f64) {
        let p = self.params.within_prob();
        let q = self.params.cross_prob();
        let keep = |v: usize| self.kept.is_none_or(|k| k[v]);
        let mut sums = vec![0.0; self.params.k];
        for (v, &xv) in x.iter().enumerate() {
            if keep(v) {
                sums[self.params.block_of(v)] += xv;
            }
        }
        let total: f64 = sums.iter().sum();
        for (v, yv) in y.iter_mut().enumerate() {
            if keep(v) {
                *yv += sign * ((p - q) * sums[self.params.block_of(v)] + q * total);
            }
        }
    }
}

struct DeltaOp<'a> {
    params: &'a SbmParams,
    kept: &'a [bool],
}

impl SymmetricOperator for DeltaOp<'_> {
    fn dim(&self) -> usize {
        self.kept.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        BlockMean { params: self.params, kept: Some(self.kept) }.apply_into(x, y, 1.0);
        BlockMean { params: self.params, kept: None }.apply_into(x, y, -1.0);
    }
}

struct NoiseOp<'a> {
    params: &'a SbmParams,
    kept: &'a [bool],
    adjacency: &'a SparseSym,
}

impl SymmetricOperator for NoiseOp<'_> {
    fn dim(&self) -> usize {
        self.kept.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.adjacency.apply(x, y);
        BlockMean { params: self.params, kept: Some(self.kept) }.apply_into(x, y, -1.0);
    }
}

/// Span of the block indicators: the top-`k` eigenspace of `Abar0`.
pub fn expected_eigenspace(params: &SbmParams) -> Subspace {
    let n = params.num_vertices();
    let scale = 1.0 / (params.block_size as f64).sqrt();
    let basis = (0..params.k)
        .map(|c| (0..n).map(|v| if params.block_of(v) == c { scale } else { 0.0 }).collect())
        .collect();
    Subspace::from_orthonormal(n, basis).expect("disjoint normalized indicators")
}

/// `k`-th largest eigenvalue of `Abar0`.
pub fn expected_lambda_k(params: &SbmParams) -> f64 {
    (params.within_prob() - params.cross_prob()) * params.block_size as f64
}

pub fn verify_norm_bounds(params: &SbmParams, trials: usize, seed: u64) -> Result<NormReport> {
    verify_norm_bounds_with(params, trials, seed, &NormOptions::default())
}

pub fn verify_norm_bounds_with(params: &SbmParams, trials: usize, seed: u64, opts: &NormOptions) -> Result<NormReport> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let d = params.a + (params.k as f64 - 1.0) * params.b;
    let lambda_k = expected_lambda_k(params);
    if lambda_k <= 0.0 {
        log::warn!("lambda_k = {lambda_k}: Davis-Kahan check skipped");
    }
    let records = (0..trials)
        .map(|t| norm_trial(params, trial_seed(seed, t), d, lambda_k, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(*params, d, lambda_k, records))
}

/// One trial of the norm suite at `seed`.
pub fn norm_trial(params: &SbmParams, seed: u64, d: f64, lambda_k: f64, opts: &NormOptions) -> Result<NormTrial> {
    let (g, _) = sample_sbm(params, seed)?;
    // For the zero model any positive threshold trims nothing.
    let threshold = (opts.trim_factor * d).max(f64::MIN_POSITIVE);
    let (adjacency, trimmed) = trim_graph(&g, threshold)?;
    let n = g.num_vertices();
    let mut kept = vec![true; n];
    for &v in &trimmed {
        kept[v] = false;
    }
    let delta_norm = spectral_norm(&DeltaOp { params, kept: &kept }, opts.norm_tol)?;
    let e_norm = spectral_norm(
        &NoiseOp {
            params,
            kept: &kept,
            adjacency: &adjacency,
        },
        opts.norm_tol,
    )?;
    let space = top_eigenspace(&adjacency, params.k, &opts.eigen)?;
    let sin_angle = subspace_angle(&space.subspace, &expected_eigenspace(params))?;
    let davis_kahan_slack = (lambda_k > 0.0).then(|| (e_norm + delta_norm) / lambda_k - sin_angle);
    Ok(NormTrial {
        seed,
        trimmed: trimmed.len(),
        delta_norm,
        e_norm,
        e_over_sqrt_d: if d > 0.0 { e_norm / d.sqrt() } else { 0.0 },
        sin_angle,
        davis_kahan_slack,
    })
}

pub(crate) fn summarize(params: SbmParams, d: f64, lambda_k: f64, trials: Vec<NormTrial>) -> NormReport {
    let count = trials.len().max(1) as f64;
    let delta_at_most_one = trials.iter().filter(|t| t.delta_norm <= 1.0).count() as f64 / count;
    let max_e_over_sqrt_d = trials.iter().map(|t| t.e_over_sqrt_d).fold(0.0, f64::max);
    let min_davis_kahan_slack = trials
        .iter()
        .filter_map(|t| t.davis_kahan_slack)
        .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))));
    NormReport {
        params,
        d,
        lambda_k,
        trials,
        delta_at_most_one,
        max_e_over_sqrt_d,
        min_davis_kahan_slack,
    }
}
