//! Plain-text formats.
//!
//! Graph: a header line `N M`, then `M` lines `u v` with `u < v`, 0-based,
//! ascending. Clustering: one label per vertex per line, trimmed vertices
//! suffixed with ` *`. Censor observation: a graph block followed by `M`
//! lines `u v y` in the same edge order.

use std::io::{BufRead, Write};

use super::{Clustering, Graph};
use crate::error::{Error, Result};

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.num_vertices(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_graph<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = Lines::new(input);
    read_graph_block(&mut lines)
}

pub fn write_clustering<W: Write>(c: &Clustering, mut out: W) -> Result<()> {
    for v in 0..c.len() {
        if c.is_trimmed(v) {
            writeln!(out, "{} *", c.label(v))?;
        } else {
            writeln!(out, "{}", c.label(v))?;
        }
    }
    Ok(())
}

/// Reads a clustering. `k` defaults to one more than the largest label.
pub fn read_clustering<R: BufRead>(input: R, k: Option<usize>) -> Result<Clustering> {
    let mut labels = Vec::new();
    let mut trimmed = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let (label_text, flagged) = match text.strip_suffix('*') {
            Some(rest) => (rest.trim_end(), true),
            None => (text, false),
        };
        let label: usize = label_text.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("expected a label, found {text:?}"),
        })?;
        if flagged {
            trimmed.push(labels.len());
        }
        labels.push(label);
    }
    let k = k.unwrap_or_else(|| labels.iter().max().map_or(1, |m| m + 1));
    Ok(Clustering::new(labels, k)?.with_trimmed(trimmed))
}

pub fn write_censor<W: Write>(g: &Graph, edge_labels: &[u8], mut out: W) -> Result<()> {
    if edge_labels.len() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: g.edge_count(),
            actual: edge_labels.len(),
        });
    }
    write_graph(g, &mut out)?;
    for ((u, v), y) in g.edges().zip(edge_labels) {
        writeln!(out, "{u} {v} {y}")?;
    }
    Ok(())
}

/// Reads a censor observation: the graph and the per-edge parities.
pub fn read_censor<R: BufRead>(input: R) -> Result<(Graph, Vec<u8>)> {
    let mut lines = Lines::new(input);
    let g = read_graph_block(&mut lines)?;
    let mut labels = Vec::with_capacity(g.edge_count());
    for (u, v) in g.edges() {
        let (line_no, fields) = lines.expect_fields(3)?;
        let (a, b, y) = (fields[0], fields[1], fields[2]);
        if (a, b) != (u, v) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected labeled edge ({u}, {v}), found ({a}, {b})"),
            });
        }
        if y > 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("edge label must be 0 or 1, found {y}"),
            });
        }
        labels.push(y as u8);
    }
    Ok((g, labels))
}

fn read_graph_block<R: BufRead>(lines: &mut Lines<R>) -> Result<Graph> {
    let (_, header) = lines.expect_fields(2)?;
    let (n, m) = (header[0], header[1]);
    let mut edges = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for _ in 0..m {
        let (line_no, f) = lines.expect_fields(2)?;
        let (u, v) = (f[0], f[1]);
        if u >= v || v >= n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("edge ({u}, {v}) must satisfy u < v < {n}"),
            });
        }
        if prev.is_some_and(|p| p >= (u, v)) {
            return Err(Error::Parse {
                line: line_no,
                message: "edges must be strictly ascending".into(),
            });
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    Ok(Graph::from_sorted_unique(n, &edges))
}

struct Lines<R> {
    input: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    fn new(input: R) -> Self {
        Self {
            input,
            line_no: 0,
            buf: String::new(),
        }
    }

    /// Next non-blank line parsed as exactly `count` unsigned integers.
    fn expect_fields(&mut self, count: usize) -> Result<(usize, Vec<usize>)> {
        loop {
            self.buf.clear();
            let read = self.input.read_line(&mut self.buf)?;
            self.line_no += 1;
            if read == 0 {
                return Err(Error::Parse {
                    line: self.line_no,
                    message: "unexpected end of input".into(),
                });
            }
            let text = self.buf.trim();
            if text.is_empty() {
                continue;
            }
            let fields: std::result::Result<Vec<usize>, _> =
                text.split_ascii_whitespace().map(str::parse).collect();
            return match fields {
                Ok(f) if f.len() == count => Ok((self.line_no, f)),
                _ => Err(Error::Parse {
                    line: self.line_no,
                    message: format!("expected {count} non-negative integers, found {text:?}"),
                }),
            };
        }
    }
}
