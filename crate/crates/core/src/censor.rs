//! Two-community recovery from noisy edge parities.
//!
//! An observation `y = x_u xor x_v xor z` on every edge of a random graph
//! gives a sparse symmetric matrix whose expectation has a rank-2 block
//! structure. The informative eigenvalue of that expectation is negative,
//! so the top-2 eigenspace is taken by magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CensorInstance, Clustering, Graph};
use crate::spectral::{top_eigenspace, EigenOptions, EigenOrder, SparseSym};
use crate::twoblock::halve_along_orthogonal_direction;

/// Degree used to decide which vertices are trimmed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSource {
    /// Edges of the observed graph.
    #[default]
    Graph,
    /// Only edges labeled 1.
    Observed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensorConfig {
    /// Vertices with degree above `trim_factor * p * n` are trimmed, where
    /// `n` is half the vertex count.
    pub trim_factor: f64,
    pub degree_source: DegreeSource,
    #[serde(skip, default = "magnitude_options")]
    pub eigen: EigenOptions,
}

fn magnitude_options() -> EigenOptions {
    EigenOptions::default().with_order(EigenOrder::Magnitude)
}

impl Default for CensorConfig {
    fn default() -> Self {
        Self {
            trim_factor: 20.0,
            degree_source: DegreeSource::Graph,
            eigen: magnitude_options(),
        }
    }
}

impl CensorConfig {
    pub fn trim_threshold(&self, p: f64, half: usize) -> f64 {
        self.trim_factor * p * half as f64
    }
}

/// Matrix with a 1 at `(u, v)` and `(v, u)` for every edge labeled 1.
pub fn build_observation_matrix(inst: &CensorInstance) -> SparseSym {
    observation_matrix(&inst.graph, &inst.edge_labels).expect("instance labels are aligned with its edges")
}

/// [`build_observation_matrix`] from a graph and labels in edge order.
pub fn observation_matrix(g: &Graph, edge_labels: &[u8]) -> Result<SparseSym> {
    if edge_labels.len() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: g.edge_count(),
            actual: edge_labels.len(),
        });
    }
    SparseSym::from_triplets(
        g.num_vertices(),
        g.edges()
            .zip(edge_labels)
            .filter(|(_, &y)| y == 1)
            .map(|((u, v), _)| (u, v, 1.0)),
    )
}

/// Spectral partition with the default configuration.
pub fn spectral_partition_censor(y: &SparseSym, p: f64, g: &Graph) -> Result<Clustering> {
    spectral_partition_censor_with(y, p, g, &CensorConfig::default())
}

pub fn spectral_partition_censor_with(y: &SparseSym, p: f64, g: &Graph, cfg: &CensorConfig) -> Result<Clustering> {
    let total = y.dim();
    if total == 0 || total % 2 != 0 {
        return Err(Error::InvalidGraph(format!(
            "censor partition needs a positive even vertex count, got {total}"
        )));
    }
    if g.num_vertices() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            actual: g.num_vertices(),
        });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParams(format!("p = {p} outside (0, 1]")));
    }
    let threshold = cfg.trim_threshold(p, total / 2);
    if !(threshold > 0.0) {
        return Err(Error::InvalidParams("trim threshold must be positive".into()));
    }
    let remove: Vec<bool> = (0..total)
        .map(|v| {
            let degree = match cfg.degree_source {
                DegreeSource::Graph => g.degree(v),
                DegreeSource::Observed => y.degree(v),
            };
            degree as f64 > threshold
        })
        .collect();
    let trimmed_matrix = y.zero_out(&remove);
    let trimmed: Vec<usize> = (0..total).filter(|&v| remove[v]).collect();
    let space = top_eigenspace(&trimmed_matrix, 2, &cfg.eigen)?;
    let (labels, _) = halve_along_orthogonal_direction(&space.subspace, total / 2);
    Ok(Clustering::new(labels, 2)?.with_trimmed(trimmed))
}

/// Builds the observation matrix of `inst` and partitions it.
pub fn partition_censor(inst: &CensorInstance, cfg: &CensorConfig) -> Result<Clustering> {
    let y = build_observation_matrix(inst);
    spectral_partition_censor_with(&y, inst.p, &inst.graph, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_censor;

    #[test]
    fn empty_graph_gives_zero_matrix() {
        let y = observation_matrix(&Graph::empty(6), &[]).unwrap();
        assert_eq!(y.nnz(), 0);
    }

    #[test]
    fn support_is_labeled_edges() {
        let inst = sample_censor(30, 0.3, 0.2, 4).unwrap();
        let y = build_observation_matrix(&inst);
        let mut count = 0;
        for ((u, v), label) in inst.labeled_edges() {
            assert_eq!(y.get(u, v), label as f64);
            assert_eq!(y.get(v, u), label as f64);
            count += label as usize;
        }
        assert_eq!(y.nnz(), 2 * count);
        for v in 0..60 {
            assert_eq!(y.get(v, v), 0.0);
        }
    }

    #[test]
    fn misaligned_labels_rejected() {
        let g = Graph::from_edges(4, [(0, 1)]).unwrap();
        assert!(observation_matrix(&g, &[1, 0]).is_err());
    }

    #[test]
    fn noiseless_complete_graph_recovers_exactly() {
        let inst = sample_censor(20, 1.0, 1e-12, 9).unwrap();
        let c = partition_censor(&inst, &CensorConfig::default()).unwrap();
        let l = c.labels();
        assert!(l[..20].iter().all(|&x| x == l[0]));
        assert!(l[20..].iter().all(|&x| x != l[0]));
    }

    #[test]
    fn rejects_odd_dimension() {
        let y = SparseSym::zeros(5);
        assert!(spectral_partition_censor(&y, 0.5, &Graph::empty(5)).is_err());
    }
}
