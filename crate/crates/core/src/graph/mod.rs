//! Undirected simple graphs, random models and random splitting.

mod clustering;
pub mod io;
mod model;
mod split;

pub use clustering::Clustering;
pub use model::{sample_censor, sample_sbm, CensorInstance, CensorParams, SbmParams};
pub use split::{color_edges, split_vertices};

use crate::error::{Error, Result};
use crate::spectral::BipartiteSparse;

/// Undirected simple graph stored as sorted adjacency arrays.
///
/// Neighbors of `v` live in `neighbors[offsets[v]..offsets[v + 1]]`, sorted
/// ascending. Every edge appears in both endpoint lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list. Duplicates (in either orientation)
    /// are merged; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_sorted_unique(n, &pairs))
    }

    /// `pairs` must be sorted, deduplicated, with `u < v < n`.
    pub(crate) fn from_sorted_unique(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * pairs.len()];
        // Pairs are sorted by (u, v), so filling in this order leaves every
        // list sorted: for vertex w, neighbors smaller than w arrive as `v`
        // entries of earlier pairs before its own `u` entries.
        for &(u, v) in pairs {
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }
        for &(u, v) in pairs {
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
        }
        Self {
            offsets,
            neighbors,
            edge_count: pairs.len(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_vertices()).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_vertices() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            let nbrs = self.neighbors(u);
            let start = nbrs.partition_point(|&v| v <= u);
            nbrs[start..].iter().map(move |&v| (u, v))
        })
    }

    /// Subgraph induced by `vertices`, re-indexed so that `vertices[i]`
    /// becomes local vertex `i`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let local = self.local_index(vertices);
        let mut pairs = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for &v in self.neighbors(u) {
                if let Some(j) = local[v] {
                    if i < j {
                        pairs.push((i, j));
                    }
                }
            }
        }
        pairs.sort_unstable();
        Graph::from_sorted_unique(vertices.len(), &pairs)
    }

    /// 0/1 bipartite matrix of the edges between `rows` and `cols`
    /// (disjoint vertex lists), indexed by position in those lists.
    pub fn bipartite_between(&self, rows: &[usize], cols: &[usize]) -> BipartiteSparse {
        let col_local = self.local_index(cols);
        let mut entries = Vec::new();
        for (i, &u) in rows.iter().enumerate() {
            for &v in self.neighbors(u) {
                if let Some(j) = col_local[v] {
                    entries.push((i, j));
                }
            }
        }
        BipartiteSparse::from_entries(rows.len(), cols.len(), entries)
            .expect("indices are in range by construction")
    }

    /// Number of edges with both endpoints in the marked set.
    pub fn induced_edge_count(&self, members: &[bool]) -> usize {
        let mut count = 0;
        for u in 0..self.num_vertices() {
            if !members[u] {
                continue;
            }
            count += self
                .neighbors(u)
                .iter()
                .filter(|&&v| v > u && members[v])
                .count();
        }
        count
    }

    fn local_index(&self, vertices: &[usize]) -> Vec<Option<usize>> {
        let mut local = vec![None; self.num_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = Some(i);
        }
        local
    }
}
