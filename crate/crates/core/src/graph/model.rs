use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::{Clustering, Graph};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Planted-partition model: `k` equal blocks of `block_size` vertices, each
/// within-block pair an edge with probability `a / n_ref` and each cross pair
/// with probability `b / n_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub block_size: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub n_ref: f64,
}

impl SbmParams {
    /// Two blocks of `n` vertices each (2n vertices total), rates over `n`.
    pub fn two_block(n: usize, a: f64, b: f64) -> Result<Self> {
        let params = Self {
            block_size: n,
            k: 2,
            a,
            b,
            n_ref: n as f64,
        };
        params.validate()?;
        Ok(params)
    }

    /// `k` blocks partitioning `n` vertices, rates over `n`. Requires `k | n`.
    pub fn k_block(n: usize, k: usize, a: f64, b: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!("k = {k}, need k >= 2")));
        }
        if n % k != 0 {
            return Err(Error::InvalidParams(format!("k = {k} does not divide n = {n}")));
        }
        let params = Self {
            block_size: n / k,
            k,
            a,
            b,
            n_ref: n as f64,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k = {}, need k >= 2", self.k)));
        }
        if !(self.n_ref > 0.0) {
            return Err(Error::InvalidParams("n_ref must be positive".into()));
        }
        if !(self.a.is_finite() && self.b.is_finite()) || self.b < 0.0 || self.a < self.b {
            return Err(Error::InvalidParams(format!(
                "need a >= b >= 0, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if self.within_prob() > 1.0 || self.cross_prob() > 1.0 {
            return Err(Error::InvalidParams(format!(
                "edge probabilities exceed 1: a/n = {}, b/n = {}",
                self.within_prob(),
                self.cross_prob()
            )));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.k * self.block_size
    }

    pub fn within_prob(&self) -> f64 {
        self.a / self.n_ref
    }

    pub fn cross_prob(&self) -> f64 {
        self.b / self.n_ref
    }

    pub fn block_of(&self, v: usize) -> usize {
        v / self.block_size
    }
}

/// Samples a planted-partition graph and its contiguous ground truth.
pub fn sample_sbm(params: &SbmParams, seed: u64) -> Result<(Graph, Clustering)> {
    params.validate()?;
    let mut rng = rng::stream(seed, Stream::Sampling);
    let s = params.block_size;
    let mut pairs = Vec::new();
    for i in 0..params.k {
        for j in i..params.k {
            if i == j {
                let total = (s as u64) * (s as u64).saturating_sub(1) / 2;
                let hits = bernoulli_positions(total, params.within_prob(), &mut rng);
                let base = i * s;
                pairs.extend(
                    TrianglePairs::new(s, hits.into_iter()).map(|(u, v)| (base + u, base + v)),
                );
            } else {
                let total = (s as u64) * (s as u64);
                let hits = bernoulli_positions(total, params.cross_prob(), &mut rng);
                let (bi, bj) = (i * s, j * s);
                pairs.extend(hits.into_iter().map(|t| {
                    let t = t as usize;
                    (bi + t / s, bj + t % s)
                }));
            }
        }
    }
    pairs.sort_unstable();
    let graph = Graph::from_sorted_unique(params.num_vertices(), &pairs);
    Ok((graph, Clustering::contiguous(params.k, s)))
}

/// Ascending indices in `0..total` where independent Bernoulli(p) trials
/// succeed, drawn by geometric skipping.
fn bernoulli_positions<R: Rng>(total: u64, p: f64, rng: &mut R) -> Vec<u64> {
    if total == 0 || p <= 0.0 {
        return Vec::new();
    }
    if p >= 1.0 {
        return (0..total).collect();
    }
    let skip = Geometric::new(p).expect("0 < p < 1");
    let mut hits = Vec::new();
    let mut t = skip.sample(rng);
    while t < total {
        hits.push(t);
        match t.checked_add(1).and_then(|x| x.checked_add(skip.sample(rng))) {
            Some(next) => t = next,
            None => break,
        }
    }
    hits
}

/// Maps ascending linear indices over the pairs `u < v < s` (row-major) to
/// the pairs themselves.
struct TrianglePairs<I> {
    s: usize,
    indices: I,
    row: usize,
    row_start: u64,
}

impl<I: Iterator<Item = u64>> TrianglePairs<I> {
    fn new(s: usize, indices: I) -> Self {
        Self {
            s,
            indices,
            row: 0,
            row_start: 0,
        }
    }
}

impl<I: Iterator<Item = u64>> Iterator for TrianglePairs<I> {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        let t = self.indices.next()?;
        loop {
            let row_len = (self.s - 1 - self.row) as u64;
            if t < self.row_start + row_len {
                let v = self.row + 1 + (t - self.row_start) as usize;
                return Some((self.row, v));
            }
            self.row_start += row_len;
            self.row += 1;
        }
    }
}

/// Censor block model parameters: `2n` vertices, edges from G(2n, p), each
/// observed parity flipped with probability `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensorParams {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
}

impl CensorParams {
    pub fn new(n: usize, p: f64, epsilon: f64) -> Result<Self> {
        let params = Self { n, p, epsilon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParams(format!("p = {} not in (0, 1]", self.p)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParams(format!(
                "epsilon = {} not in (0, 1/2)",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// A sampled censor-model observation together with its hidden labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CensorInstance {
    pub graph: Graph,
    /// Observed parity per edge, aligned with `graph.edges()` order.
    pub edge_labels: Vec<u8>,
    /// Hidden bits (evaluation only): first `n` vertices 0, last `n` 1.
    pub hidden_x: Vec<u8>,
    pub p: f64,
    pub epsilon: f64,
}

impl CensorInstance {
    pub fn new(graph: Graph, edge_labels: Vec<u8>, hidden_x: Vec<u8>, p: f64, epsilon: f64) -> Result<Self> {
        if edge_labels.len() != graph.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: graph.edge_count(),
                actual: edge_labels.len(),
            });
        }
        if hidden_x.len() != graph.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_vertices(),
                actual: hidden_x.len(),
            });
        }
        if edge_labels.iter().chain(&hidden_x).any(|&y| y > 1) {
            return Err(Error::InvalidArgument("labels must be bits".into()));
        }
        Ok(Self {
            graph,
            edge_labels,
            hidden_x,
            p,
            epsilon,
        })
    }

    /// Half the vertex count.
    pub fn half(&self) -> usize {
        self.graph.num_vertices() / 2
    }

    /// Hidden labels as a 2-clustering.
    pub fn truth(&self) -> Clustering {
        let labels = self.hidden_x.iter().map(|&x| x as usize).collect();
        Clustering::new(labels, 2).expect("bits are valid labels")
    }

    /// Edges with their observed parities.
    pub fn labeled_edges(&self) -> impl Iterator<Item = ((usize, usize), u8)> + '_ {
        self.graph.edges().zip(self.edge_labels.iter().copied())
    }
}

/// Samples a censor-model instance on `2n` vertices.
pub fn sample_censor(n: usize, p: f64, epsilon: f64, seed: u64) -> Result<CensorInstance> {
    let params = CensorParams::new(n, p, epsilon)?;
    let total_vertices = 2 * n;
    let mut rng = rng::stream(seed, Stream::Sampling);
    let total = (total_vertices as u64) * (total_vertices as u64).saturating_sub(1) / 2;
    let hits = bernoulli_positions(total, params.p, &mut rng);
    let pairs: Vec<_> = TrianglePairs::new(total_vertices, hits.into_iter()).collect();
    let graph = Graph::from_sorted_unique(total_vertices, &pairs);

    let hidden_x: Vec<u8> = (0..total_vertices).map(|v| u8::from(v >= n)).collect();
    let flip = Bernoulli::new(params.epsilon).expect("epsilon validated");
    let mut noise = rng::stream(seed, Stream::CensorNoise);
    let edge_labels = graph
        .edges()
        .map(|(u, v)| (hidden_x[u] ^ hidden_x[v]) ^ u8::from(flip.sample(&mut noise)))
        .collect();
    CensorInstance::new(graph, edge_labels, hidden_x, params.p, params.epsilon)
}
