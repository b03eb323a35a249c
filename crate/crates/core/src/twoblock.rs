//! Two-community recovery.
//!
//! [`spectral_partition_two`] trims high-degree vertices, takes the top-2
//! eigenspace of the adjacency matrix, removes the direction of the all-ones
//! vector and splits the vertices in half along what is left.
//! [`correction_two`] then moves every vertex that has too many neighbors on
//! the other side, and [`partition_two`] runs the two on independent random
//! halves of the edge set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{color_edges, Clustering, Graph};
use crate::spectral::{top_eigenspace, trim_graph, EigenOptions, Subspace};

/// Rates and thresholds for the two-block pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBlockConfig {
    pub a: f64,
    pub b: f64,
    /// Expected-degree scale of the graph handed to the spectral step.
    pub d: f64,
    /// Vertices with degree above `trim_factor * d` are trimmed.
    pub trim_factor: f64,
    /// A vertex moves when it has at least this many neighbors on the other side.
    pub correction_threshold: f64,
    /// Passes of correction; one pass is the reference behavior.
    pub correction_rounds: usize,
    #[serde(skip, default)]
    pub eigen: EigenOptions,
}

impl TwoBlockConfig {
    /// Configuration for a spectral step on the full graph: `d = a + b`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let cfg = Self {
            a,
            b,
            d: a + b,
            trim_factor: 20.0,
            correction_threshold: (a + b) / 4.0,
            correction_rounds: 1,
            eigen: EigenOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration for [`partition_two`]: the spectral step sees only the
    /// red half of the edges, so its degree scale is `(a + b) / 2`.
    pub fn for_partition(a: f64, b: f64) -> Result<Self> {
        let mut cfg = Self::new(a, b)?;
        cfg.d = (a + b) / 2.0;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) || self.b < 0.0 || self.a < self.b || self.a <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "need a >= b >= 0 and a > 0, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if !(self.d > 0.0 && self.trim_factor > 0.0) {
            return Err(Error::InvalidParams("d and trim_factor must be positive".into()));
        }
        if !(self.correction_threshold > 0.0) {
            return Err(Error::InvalidParams("correction threshold must be positive".into()));
        }
        Ok(())
    }

    pub fn trim_threshold(&self) -> f64 {
        self.trim_factor * self.d
    }
}

/// Intermediate results of the spectral step.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub clustering: Clustering,
    /// Top-2 eigenspace of the trimmed matrix.
    pub eigenspace: Subspace,
    pub eigenvalues: Vec<f64>,
    /// Unit vector of the eigenspace orthogonal to the projected all-ones vector.
    pub direction: Vec<f64>,
    pub trimmed: Vec<usize>,
}

/// Spectral partition of a graph on `2n` vertices into two classes of `n`.
pub fn spectral_partition_two(g: &Graph, cfg: &TwoBlockConfig) -> Result<Clustering> {
    spectral_split_two(g, cfg).map(|s| s.clustering)
}

/// [`spectral_partition_two`] with its intermediate quantities.
pub fn spectral_split_two(g: &Graph, cfg: &TwoBlockConfig) -> Result<SpectralSplit> {
    cfg.validate()?;
    let total = g.num_vertices();
    if total == 0 || total % 2 != 0 {
        return Err(Error::InvalidGraph(format!(
            "two-block partition needs a positive even vertex count, got {total}"
        )));
    }
    let (matrix, trimmed) = trim_graph(g, cfg.trim_threshold())?;
    let space = top_eigenspace(&matrix, 2, &cfg.eigen)?;
    let (labels, direction) = halve_along_orthogonal_direction(&space.subspace, total / 2);
    let clustering = Clustering::new(labels, 2)?.with_trimmed(trimmed.clone());
    Ok(SpectralSplit {
        clustering,
        eigenspace: space.subspace,
        eigenvalues: space.values,
        direction,
        trimmed,
    })
}

/// Projects the all-ones vector onto the 2-dimensional `space`, takes the
/// unit vector of `space` orthogonal to that projection, and labels the
/// `half` vertices with the largest coordinates 0 and the rest 1 (ties by
/// vertex index).
pub(crate) fn halve_along_orthogonal_direction(space: &Subspace, half: usize) -> (Vec<usize>, Vec<f64>) {
    let n = space.dimension();
    let ones = vec![1.0; n];
    let c = space.coefficients(&ones).expect("dimension matches");
    let projected_norm = (c[0] * c[0] + c[1] * c[1]).sqrt();
    let (alpha, beta) = if projected_norm < 1e-8 * (n as f64).sqrt() {
        (1.0, 0.0)
    } else {
        (c[0] / projected_norm, c[1] / projected_norm)
    };
    // v1 = alpha q1 + beta q2, so v2 = -beta q1 + alpha q2.
    let direction = space.combine(&[-beta, alpha]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&u, &v| direction[v].total_cmp(&direction[u]).then(u.cmp(&v)));
    let mut labels = vec![1; n];
    for &v in &order[..half] {
        labels[v] = 0;
    }
    (labels, direction)
}

/// Moves every vertex with at least `correction_threshold` blue neighbors in
/// the opposite class. All decisions read the input partition.
pub fn correction_two(part: &Clustering, blue: &Graph, cfg: &TwoBlockConfig) -> Result<Clustering> {
    if part.k() != 2 {
        return Err(Error::BlockCountMismatch {
            left: part.k(),
            right: 2,
        });
    }
    if blue.num_vertices() != part.len() {
        return Err(Error::DimensionMismatch {
            expected: part.len(),
            actual: blue.num_vertices(),
        });
    }
    let mut labels = part.labels().to_vec();
    for _ in 0..cfg.correction_rounds.max(1) {
        labels = correction_pass(&labels, blue, cfg.correction_threshold);
    }
    Ok(Clustering::new(labels, 2)?.with_trimmed(part.trimmed().to_vec()))
}

fn correction_pass(labels: &[usize], blue: &Graph, threshold: f64) -> Vec<usize> {
    labels
        .iter()
        .enumerate()
        .map(|(u, &own)| {
            let across = blue.neighbors(u).iter().filter(|&&v| labels[v] != own).count();
            if across as f64 >= threshold {
                1 - own
            } else {
                own
            }
        })
        .collect()
}

/// Colors the edges, runs the spectral step on the red graph and the
/// correction on the blue graph.
pub fn partition_two(g: &Graph, a: f64, b: f64, seed: u64) -> Result<Clustering> {
    partition_two_with(g, &TwoBlockConfig::for_partition(a, b)?, seed)
}

/// [`partition_two`] with explicit thresholds (`cfg.d` applies to the red graph).
pub fn partition_two_with(g: &Graph, cfg: &TwoBlockConfig, seed: u64) -> Result<Clustering> {
    let (red, blue) = color_edges(g, seed);
    let initial = spectral_partition_two(&red, cfg)?;
    correction_two(&initial, &blue, cfg)
}

/// Misclassification bound `2 exp(-0.072 (a-b)^2 / (a+b))` of one correction
/// pass started from a 0.1-correct partition, clamped to `[0, 1]`.
pub fn gamma_bound_two(a: f64, b: f64) -> f64 {
    if a + b <= 0.0 {
        return 1.0;
    }
    (2.0 * (-0.072 * (a - b).powi(2) / (a + b)).exp()).clamp(0.0, 1.0)
}
