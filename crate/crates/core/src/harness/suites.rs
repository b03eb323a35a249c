//! Statistical checks of the individual pipeline stages, each started from
//! controlled input.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gamma::gamma_correctness;
use crate::error::Result;
use crate::graph::{color_edges, sample_sbm, split_vertices, Clustering, SbmParams};
use crate::multiblock::{column_stage, correction_multi, gamma_bound_multi, merge_multi, MultiConfig};
use crate::rng::{self, trial_seed, Stream};
use crate::twoblock::{correction_two, gamma_bound_two, TwoBlockConfig};

/// Moves `floor(fraction * |block|)` random vertices of every block to a
/// uniformly random other class. For two classes this swaps equal numbers.
pub fn corrupt_partition<R: Rng>(truth: &Clustering, fraction: f64, rng: &mut R) -> Clustering {
    let k = truth.k();
    let mut labels = truth.labels().to_vec();
    for (c, mut members) in truth.classes().into_iter().enumerate() {
        let moved = (fraction * members.len() as f64).floor() as usize;
        members.shuffle(rng);
        for &v in &members[..moved] {
            let other = rng.random_range(0..k - 1);
            labels[v] = if other >= c { other + 1 } else { other };
        }
    }
    Clustering::new(labels, k).expect("labels stay below k")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTrial {
    pub seed: u64,
    pub input_gamma: f64,
    pub output_gamma: f64,
    pub bound: f64,
}

/// One correction pass on the blue half of a two-block graph, started from a
/// `corruption`-corrupted copy of the truth.
pub fn correction_suite_two(params: &SbmParams, trials: usize, corruption: f64, seed: u64) -> Result<Vec<CorrectionTrial>> {
    let cfg = TwoBlockConfig::for_partition(params.a, params.b)?;
    let bound = gamma_bound_two(params.a, params.b);
    (0..trials)
        .map(|t| {
            let seed = trial_seed(seed, t);
            let (g, truth) = sample_sbm(params, seed)?;
            let (_, blue) = color_edges(&g, seed);
            let input = corrupt_partition(&truth, corruption, &mut rng::stream(seed, Stream::Corruption));
            let output = correction_two(&input, &blue, &cfg)?;
            Ok(CorrectionTrial {
                seed,
                input_gamma: gamma_correctness(&input, &truth)?.gamma,
                output_gamma: gamma_correctness(&output, &truth)?.gamma,
                bound,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStageTrial {
    pub seed: u64,
    /// Error on `Z` after correcting corrupted sets.
    pub correction_gamma: f64,
    /// Error on `Y` after merging from a corrupted labeling of `Z`.
    pub merge_gamma: f64,
    /// Clamped stage bounds.
    pub correction_bound: f64,
    pub merge_bound: f64,
}

/// Correction and merge stages of the multi-block pipeline, each started
/// from a `corruption`-corrupted copy of the truth on `Z`.
pub fn multi_stage_suite(params: &SbmParams, trials: usize, corruption: f64, seed: u64) -> Result<Vec<MultiStageTrial>> {
    let n = params.num_vertices();
    let cfg = MultiConfig::new(params.a, params.b, params.k, n)?;
    let bounds = gamma_bound_multi(params.a, params.b, params.k);
    (0..trials)
        .map(|t| {
            let seed = trial_seed(seed, t);
            let (g, truth) = sample_sbm(params, seed)?;
            let (red, blue) = color_edges(&g, seed);
            let (y, z) = split_vertices(n, seed);
            let truth_z = truth.restrict(&z);
            let truth_y = truth.restrict(&y);
            let corrupted = corrupt_partition(&truth_z, corruption, &mut rng::stream(seed, Stream::Corruption));

            let corrected = correction_multi(&corrupted.classes(), &red.induced_subgraph(&z))?;
            let merged = merge_multi(&corrupted, &blue.bipartite_between(&y, &z), &y, &z, &cfg)?;
            Ok(MultiStageTrial {
                seed,
                correction_gamma: gamma_correctness(&corrected, &truth_z)?.gamma,
                merge_gamma: gamma_correctness(&merged.restrict(&y), &truth_y)?.gamma,
                correction_bound: bounds.correction.clamp(0.0, 1.0),
                merge_bound: bounds.merge.clamp(0.0, 1.0),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionTrial {
    pub seed: u64,
    pub columns: usize,
    /// Columns with `||P_W e|| < 2 sigma sqrt(k)`, `sigma^2 = a / n`.
    pub good: usize,
    pub good_fraction: f64,
    pub sigma: f64,
    pub threshold: f64,
    /// The same count with `sigma^2` the largest entry variance of the red
    /// matrix, a tighter threshold.
    pub good_exact_variance: usize,
    pub max_projected_noise: f64,
}

/// For each column drawn by the singular-space stage, the norm of the
/// projection of its deviation `e` from its expectation onto the computed
/// space `W`, compared with `2 sigma sqrt(k)` for `sigma^2 = a / n`.
pub fn projection_suite(params: &SbmParams, trials: usize, seed: u64) -> Result<Vec<ProjectionTrial>> {
    let n = params.num_vertices();
    let cfg = MultiConfig::new(params.a, params.b, params.k, n)?;
    let red_within = params.within_prob() / 2.0;
    let red_cross = params.cross_prob() / 2.0;
    let sigma = (params.a / n as f64).sqrt();
    let threshold = 2.0 * sigma * (params.k as f64).sqrt();
    let exact_sigma = (red_within * (1.0 - red_within)).max(red_cross * (1.0 - red_cross)).sqrt();
    let exact_threshold = 2.0 * exact_sigma * (params.k as f64).sqrt();
    (0..trials)
        .map(|t| {
            let seed = trial_seed(seed, t);
            let (g, truth) = sample_sbm(params, seed)?;
            let (red, _) = color_edges(&g, seed);
            let (y, z) = split_vertices(n, seed);
            let b_matrix = red.bipartite_between(&z, &y);
            let stage = column_stage(&b_matrix, &cfg, seed)?;
            let norms: Vec<f64> = stage
                .drawn_columns
                .iter()
                .map(|&j| {
                    let block = truth.label(y[j]);
                    let mut e: Vec<f64> = z
                        .iter()
                        .map(|&v| if truth.label(v) == block { -red_within } else { -red_cross })
                        .collect();
                    for &i in b_matrix.col(j) {
                        e[i] += 1.0;
                    }
                    let c = stage.subspace.coefficients(&e).expect("rows of Z");
                    c.iter().map(|x| x * x).sum::<f64>().sqrt()
                })
                .collect();
            let good = norms.iter().filter(|&&x| x < threshold).count();
            Ok(ProjectionTrial {
                seed,
                columns: norms.len(),
                good,
                good_fraction: good as f64 / norms.len().max(1) as f64,
                sigma,
                threshold,
                good_exact_variance: norms.iter().filter(|&&x| x < exact_threshold).count(),
                max_projected_noise: norms.iter().copied().fold(0.0, f64::max),
            })
        })
        .collect()
}
