use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Clustering;

/// Largest `k` matched by enumerating all permutations.
const EXHAUSTIVE_MAX_K: usize = 8;

/// Quality of a clustering against ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    /// `max_i (1 - |V_i ∩ V'_{matching[i]}| / |V_i|)`, minimized over matchings.
    pub gamma: f64,
    /// `matching[i]` is the predicted class paired with true block `i`.
    pub matching: Vec<usize>,
    /// Overlap of each true block with its matched class.
    pub per_block_overlap: Vec<usize>,
    /// Vertices outside their block's matched class.
    pub misclassified: usize,
}

/// Smallest `gamma` such that `pred` is gamma-correct for `truth` under some
/// pairing of classes with blocks. Among optimal pairings the one with fewest
/// misclassified vertices is reported.
pub fn gamma_correctness(pred: &Clustering, truth: &Clustering) -> Result<GammaReport> {
    if pred.k() != truth.k() {
        return Err(Error::BlockCountMismatch {
            left: pred.k(),
            right: truth.k(),
        });
    }
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: pred.len(),
        });
    }
    let k = truth.k();
    // overlap[i][j] = |truth block i ∩ pred class j|
    let mut overlap = vec![vec![0usize; k]; k];
    for (&t, &p) in truth.labels().iter().zip(pred.labels()) {
        overlap[t][p] += 1;
    }
    let sizes = truth.class_sizes();
    let error = |i: usize, j: usize| block_error(overlap[i][j], sizes[i]);

    let matching = if k <= EXHAUSTIVE_MAX_K {
        exhaustive(k, &error, &overlap)
    } else {
        bottleneck_assignment(k, &error)
    };
    let gamma = (0..k).map(|i| error(i, matching[i])).fold(0.0, f64::max);
    let per_block_overlap: Vec<usize> = (0..k).map(|i| overlap[i][matching[i]]).collect();
    let misclassified = truth.len() - per_block_overlap.iter().sum::<usize>();
    Ok(GammaReport {
        gamma,
        matching,
        per_block_overlap,
        misclassified,
    })
}

fn block_error(overlap: usize, size: usize) -> f64 {
    if size == 0 {
        0.0
    } else {
        1.0 - overlap as f64 / size as f64
    }
}

fn exhaustive(k: usize, error: &impl Fn(usize, usize) -> f64, overlap: &[Vec<usize>]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = perm.clone();
    let score = |perm: &[usize]| {
        let worst = (0..k).map(|i| error(i, perm[i])).fold(0.0, f64::max);
        let kept: usize = (0..k).map(|i| overlap[i][perm[i]]).sum();
        (worst, kept)
    };
    let mut best_score = score(&perm);
    while next_permutation(&mut perm) {
        let s = score(&perm);
        if s.0 < best_score.0 || (s.0 == best_score.0 && s.1 > best_score.1) {
            best_score = s;
            best.copy_from_slice(&perm);
        }
    }
    best
}

/// Lexicographic successor; false after the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Smallest threshold admitting a perfect matching of blocks to classes using
/// only pairs with error at most the threshold.
fn bottleneck_assignment(k: usize, error: &impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut levels: Vec<f64> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| error(i, j)).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(k, |i, j| error(i, j) <= levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    perfect_matching(k, |i, j| error(i, j) <= levels[lo]).expect("the largest level admits every pair")
}

/// Augmenting-path bipartite matching; `result[i]` is the column of row `i`.
fn perfect_matching(k: usize, allowed: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn augment(i: usize, allowed: &dyn Fn(usize, usize) -> bool, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..seen.len() {
            if allowed(i, j) && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|other| augment(other, allowed, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        let mut seen = vec![false; k];
        if !augment(i, &allowed, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut result = vec![0; k];
    for (j, o) in owner.iter().enumerate() {
        result[o.expect("perfect")] = j;
    }
    Some(result)
}
