//! `k`-community recovery.
//!
//! The vertex set is split at random into `Y` and `Z`. The red edges between
//! them form a bipartite matrix whose rows (indexed by `Z`) are clustered by
//! projecting random columns onto a top-`k` left singular space; the blue
//! edges inside `Z` rank the resulting candidate sets, red edges inside `Z`
//! correct them, and blue edges between `Y` and `Z` label `Y`.
//!
//! Vertex sets handed between stages use positions in the `Z` (or `Y`)
//! vertex list, not global vertex ids.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{color_edges, split_vertices, Clustering, Graph};
use crate::rng::{self, Stream};
use crate::spectral::{project, top_left_singular_space, trim_bipartite, BipartiteSparse, EigenOptions, Subspace};

/// Rates, sizes and thresholds of the multi-block pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiConfig {
    pub a: f64,
    pub b: f64,
    pub k: usize,
    /// Total vertex count the rates are normalized by.
    pub n: usize,
    /// Degree scale `a + (k - 1) b` used for trimming.
    pub d: f64,
    pub trim_factor: f64,
    /// Number of random columns projected.
    pub m: usize,
    /// Size of each candidate set.
    pub set_size: usize,
    /// Accepted sets must pairwise overlap in fewer vertices than this.
    pub overlap_limit: usize,
    /// Merge labels `u` with `i` once it has this many blue neighbors in class `i`.
    pub merge_threshold: f64,
    #[serde(skip, default)]
    pub eigen: EigenOptions,
}

impl MultiConfig {
    pub fn new(a: f64, b: f64, k: usize, n: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k = {k}, need k >= 2")));
        }
        let per_half_block = n as f64 / (2.0 * k as f64);
        let cfg = Self {
            a,
            b,
            k,
            n,
            d: a + (k as f64 - 1.0) * b,
            trim_factor: 20.0,
            m: (2.0 * (n.max(1) as f64).ln()).ceil() as usize,
            set_size: n / (2 * k),
            overlap_limit: (0.2 * per_half_block).ceil() as usize,
            merge_threshold: (a + b) / 8.0,
            eigen: EigenOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) || self.b < 0.0 || self.a < self.b || self.a <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "need a >= b >= 0 and a > 0, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k = {}, need k >= 2", self.k)));
        }
        if self.n == 0 || self.m == 0 || self.set_size == 0 {
            return Err(Error::InvalidParams(format!(
                "n = {}, m = {} and set_size = {} must be positive",
                self.n, self.m, self.set_size
            )));
        }
        if !(self.d > 0.0 && self.trim_factor > 0.0) {
            return Err(Error::InvalidParams("d and trim_factor must be positive".into()));
        }
        Ok(())
    }

    pub fn trim_threshold(&self) -> f64 {
        self.trim_factor * self.d
    }

    /// Constant entry `(a + b) / 2n` subtracted from each drawn column.
    pub fn mean_column_level(&self) -> f64 {
        (self.a + self.b) / (2.0 * self.n as f64)
    }
}

/// A candidate block: the top coordinates of one projected column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    /// Positions in `Z`, ascending.
    pub vertices: Vec<usize>,
    /// Column of the bipartite matrix (position in `Y`) the set came from.
    pub source_column: usize,
    /// Blue edges induced inside the set (filled in by the density filter).
    pub blue_edge_count: usize,
}

/// Output of the singular-space stage, before candidate sets are formed.
#[derive(Debug, Clone)]
pub struct ColumnStage {
    /// Top-`k` left singular space of the trimmed `Z x Y1` block.
    pub subspace: Subspace,
    pub singular_values: Vec<f64>,
    /// Columns of the bipartite matrix placed in `Y1` and `Y2`.
    pub y1_columns: Vec<usize>,
    pub y2_columns: Vec<usize>,
    /// Drawn columns (positions in `Y`), in draw order.
    pub drawn_columns: Vec<usize>,
    pub trimmed_rows: Vec<usize>,
    /// Trimmed columns as positions in `Y`.
    pub trimmed_columns: Vec<usize>,
}

/// Splits the columns, trims the first half, computes its top-`k` left
/// singular space and draws the columns to project.
pub fn column_stage(b_matrix: &BipartiteSparse, cfg: &MultiConfig, seed: u64) -> Result<ColumnStage> {
    cfg.validate()?;
    let mut split = rng::stream(seed, Stream::ColumnSplit);
    let mut y1_columns = Vec::new();
    let mut y2_columns = Vec::new();
    for j in 0..b_matrix.cols() {
        if split.random::<bool>() {
            y1_columns.push(j);
        } else {
            y2_columns.push(j);
        }
    }
    let a1 = b_matrix.select_columns(&y1_columns);
    let (a1, trimmed_rows, trimmed_local) = trim_bipartite(&a1, cfg.trim_threshold())?;
    let trimmed_columns = trimmed_local.iter().map(|&j| y1_columns[j]).collect();
    let space = top_left_singular_space(&a1, cfg.k, &cfg.eigen)?;

    let mut pick = rng::stream(seed, Stream::ColumnPick);
    let count = cfg.m.min(y2_columns.len());
    let drawn_columns = index::sample(&mut pick, y2_columns.len(), count)
        .into_iter()
        .map(|i| y2_columns[i])
        .collect();
    Ok(ColumnStage {
        subspace: space.subspace,
        singular_values: space.values,
        y1_columns,
        y2_columns,
        drawn_columns,
        trimmed_rows,
        trimmed_columns,
    })
}

/// Candidate set from column `column` of `b_matrix`: the `set_size` largest
/// coordinates of `P_W (a - abar)`, ties by position.
pub fn candidate_from_column(
    b_matrix: &BipartiteSparse,
    column: usize,
    subspace: &Subspace,
    cfg: &MultiConfig,
) -> CandidateSet {
    let rows = b_matrix.rows();
    let mut centered = vec![-cfg.mean_column_level(); rows];
    for &i in b_matrix.col(column) {
        centered[i] += 1.0;
    }
    let projected = project(subspace, &centered).expect("subspace lives on the rows");
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&u, &v| projected[v].total_cmp(&projected[u]).then(u.cmp(&v)));
    let mut vertices: Vec<usize> = order.into_iter().take(cfg.set_size.min(rows)).collect();
    vertices.sort_unstable();
    CandidateSet {
        vertices,
        source_column: column,
        blue_edge_count: 0,
    }
}

/// Spectral step on the `Z x Y` red bipartite matrix; returns `k` sets of
/// positions in `z_vertices`.
pub fn spectral_partition_multi(
    b_matrix: &BipartiteSparse,
    z_vertices: &[usize],
    blue_in_z: &Graph,
    cfg: &MultiConfig,
    seed: u64,
) -> Result<Vec<CandidateSet>> {
    if b_matrix.rows() != z_vertices.len() {
        return Err(Error::DimensionMismatch {
            expected: z_vertices.len(),
            actual: b_matrix.rows(),
        });
    }
    if blue_in_z.num_vertices() != z_vertices.len() {
        return Err(Error::DimensionMismatch {
            expected: z_vertices.len(),
            actual: blue_in_z.num_vertices(),
        });
    }
    let stage = column_stage(b_matrix, cfg, seed)?;
    let candidates: Vec<CandidateSet> = stage
        .drawn_columns
        .iter()
        .map(|&j| candidate_from_column(b_matrix, j, &stage.subspace, cfg))
        .collect();
    if candidates.is_empty() {
        return Err(Error::SelectionShortfall {
            accepted: 0,
            requested: cfg.k,
            survivors: 0,
        });
    }
    let survivors = blue_density_filter(candidates, blue_in_z);
    select_disjoint(&survivors, cfg.k, cfg.overlap_limit)
}

/// Keeps the upper half (rounded up) of the candidates by induced blue edge
/// count, sorted by count descending and then by source column.
pub fn blue_density_filter(candidates: Vec<CandidateSet>, blue_in_z: &Graph) -> Vec<CandidateSet> {
    let mut members = vec![false; blue_in_z.num_vertices()];
    let mut scored: Vec<CandidateSet> = candidates
        .into_iter()
        .map(|mut c| {
            for &v in &c.vertices {
                members[v] = true;
            }
            c.blue_edge_count = blue_in_z.induced_edge_count(&members);
            for &v in &c.vertices {
                members[v] = false;
            }
            c
        })
        .collect();
    scored.sort_by(|x, y| {
        y.blue_edge_count
            .cmp(&x.blue_edge_count)
            .then(x.source_column.cmp(&y.source_column))
    });
    let keep = scored.len().div_ceil(2);
    scored.truncate(keep);
    scored
}

/// Greedy scan accepting a candidate iff it overlaps every accepted set in
/// fewer than `overlap_limit` vertices; stops at `k`.
pub fn select_disjoint(candidates: &[CandidateSet], k: usize, overlap_limit: usize) -> Result<Vec<CandidateSet>> {
    let mut accepted: Vec<CandidateSet> = Vec::with_capacity(k);
    for c in candidates {
        if accepted.len() == k {
            break;
        }
        if accepted
            .iter()
            .all(|s| sorted_intersection(&s.vertices, &c.vertices) < overlap_limit)
        {
            accepted.push(c.clone());
        }
    }
    if accepted.len() < k {
        return Err(Error::SelectionShortfall {
            accepted: accepted.len(),
            requested: k,
            survivors: candidates.len(),
        });
    }
    Ok(accepted)
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Assigns every vertex of `Z` to the set holding most of its red
/// neighbors (lowest index on ties). Sets may overlap and need not cover `Z`.
pub fn correction_multi(sets: &[Vec<usize>], red_in_z: &Graph) -> Result<Clustering> {
    let k = sets.len();
    if k == 0 {
        return Err(Error::InvalidArgument("no sets to correct against".into()));
    }
    let n = red_in_z.num_vertices();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, set) in sets.iter().enumerate() {
        for &v in set {
            if v >= n {
                return Err(Error::InvalidArgument(format!("set member {v} outside Z of size {n}")));
            }
            membership[v].push(i);
        }
    }
    let mut counts = vec![0usize; k];
    let labels = (0..n)
        .map(|u| {
            counts.iter_mut().for_each(|c| *c = 0);
            for &v in red_in_z.neighbors(u) {
                for &i in &membership[v] {
                    counts[i] += 1;
                }
            }
            argmax_lowest(&counts)
        })
        .collect();
    Clustering::new(labels, k)
}

/// Labels `Y` from blue `Y x Z` edges: class `i` when the count into class
/// `i` reaches `merge_threshold` (lowest such `i`), otherwise the class with
/// most neighbors. `Z` keeps its labels.
pub fn merge_multi(
    z_clustering: &Clustering,
    blue_yz: &BipartiteSparse,
    y_vertices: &[usize],
    z_vertices: &[usize],
    cfg: &MultiConfig,
) -> Result<Clustering> {
    if z_clustering.len() != z_vertices.len() {
        return Err(Error::DimensionMismatch {
            expected: z_vertices.len(),
            actual: z_clustering.len(),
        });
    }
    if blue_yz.rows() != y_vertices.len() || blue_yz.cols() != z_vertices.len() {
        return Err(Error::DimensionMismatch {
            expected: y_vertices.len() * z_vertices.len(),
            actual: blue_yz.rows() * blue_yz.cols(),
        });
    }
    let k = z_clustering.k();
    let total = y_vertices.len() + z_vertices.len();
    let mut labels = vec![usize::MAX; total];
    for (i, &v) in z_vertices.iter().enumerate() {
        labels[v] = z_clustering.label(i);
    }
    let mut counts = vec![0usize; k];
    for (r, &u) in y_vertices.iter().enumerate() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &j in blue_yz.row(r) {
            counts[z_clustering.label(j)] += 1;
        }
        labels[u] = counts
            .iter()
            .position(|&c| c as f64 >= cfg.merge_threshold)
            .unwrap_or_else(|| argmax_lowest(&counts));
    }
    if labels.iter().any(|&l| l == usize::MAX) {
        return Err(Error::InvalidArgument("Y and Z must partition the vertex set".into()));
    }
    Clustering::new(labels, k)
}

fn argmax_lowest(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Full pipeline with default configuration for `g.num_vertices()` vertices.
pub fn partition_multi(g: &Graph, a: f64, b: f64, k: usize, seed: u64) -> Result<Clustering> {
    let cfg = MultiConfig::new(a, b, k, g.num_vertices())?;
    partition_multi_with(g, &cfg, seed)
}

pub fn partition_multi_with(g: &Graph, cfg: &MultiConfig, seed: u64) -> Result<Clustering> {
    cfg.validate()?;
    let (red, blue) = color_edges(g, seed);
    let (y, z) = split_vertices(g.num_vertices(), seed);
    let b_matrix = red.bipartite_between(&z, &y);
    let blue_in_z = blue.induced_subgraph(&z);
    let sets = spectral_partition_multi(&b_matrix, &z, &blue_in_z, cfg, seed)?;
    let sets: Vec<Vec<usize>> = sets.into_iter().map(|c| c.vertices).collect();
    let red_in_z = red.induced_subgraph(&z);
    let z_clustering = correction_multi(&sets, &red_in_z)?;
    let blue_yz = blue.bipartite_between(&y, &z);
    merge_multi(&z_clustering, &blue_yz, &y, &z, cfg)
}

/// The two misclassification bounds of the correction and merge stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiGammaBound {
    /// `2k exp(-0.04 (a-b)^2 / (k (a+b)))`, unclamped.
    pub correction: f64,
    /// `2k exp(-0.0324 (a-b)^2 / (k (a+b)))`, unclamped.
    pub merge: f64,
    /// The weaker of the two, clamped to `[0, 1]`.
    pub bound: f64,
}

pub fn gamma_bound_multi(a: f64, b: f64, k: usize) -> MultiGammaBound {
    let kf = k as f64;
    let snr = if a + b > 0.0 { (a - b).powi(2) / (kf * (a + b)) } else { 0.0 };
    let correction = 2.0 * kf * (-0.04 * snr).exp();
    let merge = 2.0 * kf * (-0.0324 * snr).exp();
    MultiGammaBound {
        correction,
        merge,
        bound: correction.max(merge).clamp(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(vertices: &[usize], source: usize) -> CandidateSet {
        CandidateSet {
            vertices: vertices.to_vec(),
            source_column: source,
            blue_edge_count: 0,
        }
    }

    #[test]
    fn default_sizes() {
        let cfg = MultiConfig::new(22.0, 2.0, 3, 3000).unwrap();
        assert_eq!(cfg.d, 26.0);
        assert_eq!(cfg.m, 17); // ceil(2 ln 3000) = ceil(16.01)
        assert_eq!(cfg.set_size, 500);
        assert_eq!(cfg.overlap_limit, 100);
        assert_eq!(cfg.merge_threshold, 3.0);
        let odd = MultiConfig::new(22.0, 2.0, 3, 1000).unwrap();
        assert_eq!(odd.set_size, 166);
        assert_eq!(odd.overlap_limit, 34);
    }

    #[test]
    fn filter_keeps_denser_half() {
        // Blue graph on 8 vertices; {0,1,2,3} induces 3 edges, {4,5,6,7} one.
        let blue = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (4, 5), (3, 4)]).unwrap();
        let kept = blue_density_filter(vec![cand(&[4, 5, 6, 7], 0), cand(&[0, 1, 2, 3], 1)], &blue);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].vertices, vec![0, 1, 2, 3]);
        assert_eq!(kept[0].blue_edge_count, 3);
    }

    #[test]
    fn filter_ties_by_source_column() {
        let blue = Graph::empty(4);
        let kept = blue_density_filter(vec![cand(&[0, 1], 5), cand(&[0, 1], 2), cand(&[0, 1], 9)], &blue);
        let sources: Vec<_> = kept.iter().map(|c| c.source_column).collect();
        assert_eq!(sources, vec![2, 5]);
    }

    #[test]
    fn select_disjoint_cases() {
        let disjoint = vec![cand(&[0, 1], 0), cand(&[2, 3], 1), cand(&[4, 5], 2)];
        assert_eq!(select_disjoint(&disjoint, 3, 1).unwrap().len(), 3);
        let dupes = vec![cand(&[0, 1], 0), cand(&[0, 1], 1)];
        assert_eq!(select_disjoint(&dupes, 1, 1).unwrap()[0].source_column, 0);
        assert!(matches!(
            select_disjoint(&dupes, 2, 1),
            Err(Error::SelectionShortfall { accepted: 1, requested: 2, .. })
        ));
    }

    #[test]
    fn correction_argmax_and_ties() {
        // Vertex 0 has neighbors only in the second set; vertex 5 is isolated.
        let red = Graph::from_edges(6, [(0, 3), (0, 4), (1, 2)]).unwrap();
        let out = correction_multi(&[vec![1, 2], vec![3, 4]], &red).unwrap();
        assert_eq!(out.label(0), 1);
        assert_eq!(out.label(5), 0);
        assert_eq!(out.label(1), 0);
    }

    #[test]
    fn merge_threshold_and_fallback() {
        // Z = {0,1,2} labeled 0,1,1; Y = {3,4}.
        let cfg = MultiConfig {
            merge_threshold: 2.0,
            ..MultiConfig::new(10.0, 6.0, 2, 20).unwrap()
        };
        let z = Clustering::new(vec![0, 1, 1], 2).unwrap();
        let blue_yz = BipartiteSparse::from_entries(2, 3, [(0, 1), (0, 2), (0, 0)]).unwrap();
        let out = merge_multi(&z, &blue_yz, &[3, 4], &[0, 1, 2], &cfg).unwrap();
        assert_eq!(out.labels(), &[0, 1, 1, 1, 0]);
    }

    #[test]
    fn gamma_bounds() {
        let g = gamma_bound_multi(200.0, 20.0, 2);
        assert!((g.merge - 4.0 * (-0.0324f64 * 32400.0 / 440.0).exp()).abs() < 1e-14);
        // 4 exp(-2.3858) = 0.36805; the often-quoted 0.3686 is a rounding slip.
        assert!((g.merge - 0.36805).abs() < 1e-5);
        assert!(g.correction <= g.merge);
        let vacuous = gamma_bound_multi(60.0, 6.0, 3);
        assert!((vacuous.correction - 6.0 * (-0.04f64 * 2916.0 / 198.0).exp()).abs() < 1e-12);
        assert_eq!(vacuous.bound, 1.0);
        assert_eq!(gamma_bound_multi(5.0, 5.0, 3).bound, 1.0);
    }
}
