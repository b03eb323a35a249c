use rayon::prelude::*;

use super::SymmetricOperator;
use crate::error::{Error, Result};
use crate::graph::Graph;

const PARALLEL_ROWS: usize = 1 << 14;

/// Symmetric sparse matrix in compressed-row form, both triangles stored.
///
/// `zeroed` lists indices whose rows and columns were cleared by trimming.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    dim: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    zeroed: Vec<usize>,
}

impl SparseSym {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            offsets: vec![0; dim + 1],
            cols: Vec::new(),
            values: Vec::new(),
            zeroed: Vec::new(),
        }
    }

    /// 0/1 adjacency matrix of `g`.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.num_vertices();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(2 * g.edge_count());
        for v in 0..n {
            cols.extend_from_slice(g.neighbors(v));
            offsets.push(cols.len());
        }
        let values = vec![1.0; cols.len()];
        Self {
            dim: n,
            offsets,
            cols,
            values,
            zeroed: Vec::new(),
        }
    }

    /// Builds from `(i, j, value)` triplets, each describing the unordered
    /// pair `{i, j}`; repeated pairs are summed and exact zeros dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries = Vec::new();
        for (i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) out of range for dimension {dim}"
                )));
            }
            entries.push((i, j, v));
            if i != j {
                entries.push((j, i, v));
            }
        }
        entries.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut offsets = vec![0usize; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut rows: Vec<usize> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            if rows.last() == Some(&i) && cols.last() == Some(&j) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(i);
                cols.push(j);
                values.push(v);
            }
        }
        let keep: Vec<bool> = values.iter().map(|&v| v != 0.0).collect();
        let mut k_cols = Vec::new();
        let mut k_vals = Vec::new();
        for idx in 0..rows.len() {
            if keep[idx] {
                offsets[rows[idx] + 1] += 1;
                k_cols.push(cols[idx]);
                k_vals.push(values[idx]);
            }
        }
        for i in 0..dim {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self {
            dim,
            offsets,
            cols: k_cols,
            values: k_vals,
            zeroed: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored nonzeros (each off-diagonal pair counted twice).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[range.clone()], &self.values[range])
    }

    /// Number of nonzero entries in row `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    /// Indices cleared by trimming, ascending.
    pub fn zeroed(&self) -> &[usize] {
        &self.zeroed
    }

    /// Clears rows and columns of the marked indices.
    pub(crate) fn zero_out(&self, remove: &[bool]) -> SparseSym {
        let mut offsets = Vec::with_capacity(self.dim + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.dim {
            if !remove[i] {
                let (c, v) = self.row(i);
                for (&j, &x) in c.iter().zip(v) {
                    if !remove[j] {
                        cols.push(j);
                        values.push(x);
                    }
                }
            }
            offsets.push(cols.len());
        }
        let mut zeroed = self.zeroed.clone();
        zeroed.extend((0..self.dim).filter(|&i| remove[i]));
        zeroed.sort_unstable();
        zeroed.dedup();
        SparseSym {
            dim: self.dim,
            offsets,
            cols,
            values,
            zeroed,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.dim]; self.dim];
        for (i, row) in dense.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                row[j] = x;
            }
        }
        dense
    }

    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (c, v) = self.row(i);
        c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
    }
}

impl SymmetricOperator for SparseSym {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.dim >= PARALLEL_ROWS {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = self.row_dot(i, x));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_dot(i, x);
            }
        }
    }
}

/// Sparse 0/1 matrix with `rows x cols` shape, stored by rows and by columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteSparse {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    row_indices: Vec<usize>,
    col_offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl BipartiteSparse {
    /// Builds from `(row, col)` entries; duplicates are merged.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut e: Vec<(usize, usize)> = entries.into_iter().collect();
        if let Some(&(i, j)) = e.iter().find(|&&(i, j)| i >= rows || j >= cols) {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) out of range for {rows}x{cols}"
            )));
        }
        e.sort_unstable();
        e.dedup();
        let (row_offsets, row_indices) = compress(rows, e.iter().copied());
        let mut t: Vec<(usize, usize)> = e.iter().map(|&(i, j)| (j, i)).collect();
        t.sort_unstable();
        let (col_offsets, col_indices) = compress(cols, t.into_iter());
        Ok(Self {
            rows,
            cols,
            row_offsets,
            row_indices,
            col_offsets,
            col_indices,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_indices.len()
    }

    /// Column indices of the nonzeros in row `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    /// Row indices of the nonzeros in column `j`.
    pub fn col(&self, j: usize) -> &[usize] {
        &self.col_indices[self.col_offsets[j]..self.col_offsets[j + 1]]
    }

    pub fn row_degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn col_degree(&self, j: usize) -> usize {
        self.col_offsets[j + 1] - self.col_offsets[j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).iter().map(move |&j| (i, j)))
    }

    /// `y = B x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().map(|&j| x[j]).sum();
        }
    }

    /// `y = B^T x`.
    pub fn mul_t_vec(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self.col(j).iter().map(|&i| x[i]).sum();
        }
    }

    /// Submatrix keeping the listed columns, re-indexed by position.
    pub fn select_columns(&self, columns: &[usize]) -> BipartiteSparse {
        let entries = columns
            .iter()
            .enumerate()
            .flat_map(|(new_j, &j)| self.col(j).iter().map(move |&i| (i, new_j)));
        BipartiteSparse::from_entries(self.rows, columns.len(), entries.collect::<Vec<_>>())
            .expect("indices are in range by construction")
    }

    /// Clears the marked rows and columns.
    pub(crate) fn zero_out(&self, remove_rows: &[bool], remove_cols: &[bool]) -> BipartiteSparse {
        let entries: Vec<_> = self
            .entries()
            .filter(|&(i, j)| !remove_rows[i] && !remove_cols[j])
            .collect();
        BipartiteSparse::from_entries(self.rows, self.cols, entries)
            .expect("indices are in range by construction")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.cols]; self.rows];
        for (i, j) in self.entries() {
            dense[i][j] = 1.0;
        }
        dense
    }
}

fn compress<I: Iterator<Item = (usize, usize)>>(n: usize, sorted: I) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0usize; n + 1];
    let mut indices = Vec::new();
    for (i, j) in sorted {
        offsets[i + 1] += 1;
        indices.push(j);
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, indices)
}

/// The row Gram operator `B B^T`, applied without forming it.
pub struct RowGram<'a>(pub &'a BipartiteSparse);

impl SymmetricOperator for RowGram<'_> {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; self.0.cols()];
        self.0.mul_t_vec(x, &mut t);
        self.0.mul_vec(&t, y);
    }
}
