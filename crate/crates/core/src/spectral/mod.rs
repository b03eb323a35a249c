//! Sparse symmetric and bipartite linear algebra: degree trimming, top
//! eigen/singular subspaces by subspace iteration, projections, subspace
//! angles and spectral norms.

mod eigen;
mod jacobi;
mod lanczos;
mod sparse;
mod subspace;
mod trim;

pub use eigen::{spectral_norm, top_eigenspace, top_left_singular_space, EigenOptions, EigenOrder, Eigenspace};
pub use jacobi::symmetric_eigen;
pub use sparse::{BipartiteSparse, RowGram, SparseSym};
pub use subspace::{project, subspace_angle, Subspace};
pub use trim::{trim_bipartite, trim_graph, trim_high_degree};

/// A real symmetric linear map applied matrix-free.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// Overwrites `y` with `M x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl<T: SymmetricOperator + ?Sized> SymmetricOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
}
