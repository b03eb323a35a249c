//! Degree trimming: zero the rows and columns of vertices whose degree
//! exceeds a threshold. Degrees are those of the matrix being trimmed and are
//! all read before anything is removed.

use super::{BipartiteSparse, SparseSym};
use crate::error::{Error, Result};
use crate::graph::Graph;

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("trim threshold must be positive, got {threshold}")))
    }
}

/// Returns the trimmed matrix and the vertices whose degree exceeded
/// `threshold`, ascending.
pub fn trim_high_degree(m: &SparseSym, threshold: f64) -> Result<(SparseSym, Vec<usize>)> {
    check_threshold(threshold)?;
    let remove: Vec<bool> = (0..m.dim()).map(|i| m.degree(i) as f64 > threshold).collect();
    let trimmed = (0..m.dim()).filter(|&i| remove[i]).collect();
    Ok((m.zero_out(&remove), trimmed))
}

/// Adjacency matrix of `g` with high-degree vertices trimmed.
pub fn trim_graph(g: &Graph, threshold: f64) -> Result<(SparseSym, Vec<usize>)> {
    trim_high_degree(&SparseSym::from_graph(g), threshold)
}

/// Trims rows and columns of a bipartite matrix by their own degrees.
/// Returns the matrix and the trimmed rows and columns.
pub fn trim_bipartite(
    b: &BipartiteSparse,
    threshold: f64,
) -> Result<(BipartiteSparse, Vec<usize>, Vec<usize>)> {
    check_threshold(threshold)?;
    let remove_rows: Vec<bool> = (0..b.rows()).map(|i| b.row_degree(i) as f64 > threshold).collect();
    let remove_cols: Vec<bool> = (0..b.cols()).map(|j| b.col_degree(j) as f64 > threshold).collect();
    let rows = (0..b.rows()).filter(|&i| remove_rows[i]).collect();
    let cols = (0..b.cols()).filter(|&j| remove_cols[j]).collect();
    Ok((b.zero_out(&remove_rows, &remove_cols), rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn trims_star_center() {
        let (m, trimmed) = trim_graph(&star(5), 4.0).unwrap();
        assert_eq!(trimmed, vec![0]);
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.zeroed(), &[0]);
    }

    #[test]
    fn threshold_at_max_degree_is_identity() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]).unwrap();
        let a = SparseSym::from_graph(&g);
        let (m, trimmed) = trim_high_degree(&a, g.max_degree() as f64).unwrap();
        assert!(trimmed.is_empty());
        assert_eq!(m, a);
    }

    #[test]
    fn idempotent() {
        let g = Graph::from_edges(7, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (4, 5), (5, 6), (2, 3)]).unwrap();
        let (once, _) = trim_graph(&g, 2.0).unwrap();
        let (twice, again) = trim_high_degree(&once, 2.0).unwrap();
        assert_eq!(once, twice);
        assert!(again.is_empty());
    }

    #[test]
    fn bipartite_rows_and_columns() {
        let b = BipartiteSparse::from_entries(3, 3, [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)]).unwrap();
        let (t, rows, cols) = trim_bipartite(&b, 2.0).unwrap();
        assert_eq!(rows, vec![0]);
        assert_eq!(cols, vec![0]);
        assert_eq!(t.nnz(), 0);
    }

    #[test]
    fn rejects_nonpositive_threshold() {
        assert!(trim_graph(&star(2), 0.0).is_err());
    }
}
