use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Clustering, Graph};

/// Edge density of the adjacency matrix after sorting vertices by class,
/// aggregated into `bins x bins` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub bins: usize,
    /// Row-major edge counts; a diagonal cell counts each edge once.
    pub edges: Vec<usize>,
    /// Row-major vertex pairs; diagonal cells exclude self-pairs.
    pub pairs: Vec<usize>,
    /// `edges / pairs`, 0 for cells without pairs.
    pub density: Vec<f64>,
    /// Gray levels: 0 at the largest density, 255 for empty cells.
    pub pixels: Vec<u8>,
}

impl Heatmap {
    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.bins + col]
    }

    /// ASCII PGM (`P2`).
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "P2")?;
        writeln!(out, "{} {}", self.bins, self.bins)?;
        writeln!(out, "255")?;
        for row in self.pixels.chunks(self.bins.max(1)) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub fn density_heatmap(g: &Graph, c: &Clustering, bins: usize) -> Result<Heatmap> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    let n = g.num_vertices();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: c.len(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| c.label(v));
    let mut bin_of = vec![0; n];
    let mut bin_size = vec![0usize; bins];
    for (pos, &v) in order.iter().enumerate() {
        let b = pos * bins / n;
        bin_of[v] = b;
        bin_size[b] += 1;
    }
    let mut edges = vec![0usize; bins * bins];
    for (u, v) in g.edges() {
        let (r, s) = (bin_of[u], bin_of[v]);
        edges[r * bins + s] += 1;
        if r != s {
            edges[s * bins + r] += 1;
        }
    }
    let mut pairs = vec![0usize; bins * bins];
    for r in 0..bins {
        for s in 0..bins {
            pairs[r * bins + s] = if r == s {
                bin_size[r] * bin_size[r].saturating_sub(1) / 2
            } else {
                bin_size[r] * bin_size[s]
            };
        }
    }
    let density: Vec<f64> = edges
        .iter()
        .zip(&pairs)
        .map(|(&e, &p)| if p == 0 { 0.0 } else { e as f64 / p as f64 })
        .collect();
    let max = density.iter().copied().fold(0.0, f64::max);
    let pixels = density
        .iter()
        .map(|&d| if max == 0.0 { 255 } else { (255.0 * (1.0 - d / max)).round() as u8 })
        .collect();
    Ok(Heatmap {
        bins,
        edges,
        pairs,
        density,
        pixels,
    })
}
