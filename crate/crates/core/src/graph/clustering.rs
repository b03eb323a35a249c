use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-vertex block labels in `0..k`, optionally flagging the vertices that
/// degree trimming removed from the spectral step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
    trimmed: Vec<usize>,
}

impl Clustering {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("block count must be positive".into()));
        }
        if let Some((v, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} has label {l}, expected < {k}"
            )));
        }
        Ok(Self {
            labels,
            k,
            trimmed: Vec::new(),
        })
    }

    /// Ground truth with contiguous blocks: vertex `v` is in block `v / block_size`.
    pub fn contiguous(k: usize, block_size: usize) -> Self {
        let labels = (0..k * block_size).map(|v| v / block_size).collect();
        Self {
            labels,
            k,
            trimmed: Vec::new(),
        }
    }

    /// Records the trimmed vertex set (sorted, deduplicated).
    pub fn with_trimmed(mut self, mut trimmed: Vec<usize>) -> Self {
        trimmed.sort_unstable();
        trimmed.dedup();
        trimmed.retain(|&v| v < self.labels.len());
        self.trimmed = trimmed;
        self
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn trimmed(&self) -> &[usize] {
        &self.trimmed
    }

    pub fn is_trimmed(&self, v: usize) -> bool {
        self.trimmed.binary_search(&v).is_ok()
    }

    /// Number of vertices carrying each label.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Vertices of each class, ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.k];
        for (v, &l) in self.labels.iter().enumerate() {
            classes[l].push(v);
        }
        classes
    }

    /// Restriction to `vertices` (in the given order).
    pub fn restrict(&self, vertices: &[usize]) -> Clustering {
        Clustering {
            labels: vertices.iter().map(|&v| self.labels[v]).collect(),
            k: self.k,
            trimmed: Vec::new(),
        }
    }

    /// Applies `perm[old] = new` to every label.
    pub fn relabel(&self, perm: &[usize]) -> Result<Clustering> {
        if perm.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: perm.len(),
            });
        }
        let mut seen = vec![false; self.k];
        for &p in perm {
            if p >= self.k || seen[p] {
                return Err(Error::InvalidArgument("relabeling is not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(Clustering {
            labels: self.labels.iter().map(|&l| perm[l]).collect(),
            k: self.k,
            trimmed: self.trimmed.clone(),
        })
    }
}
