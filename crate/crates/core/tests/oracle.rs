//! Iterative solvers against dense decompositions.

mod common;

use nalgebra::DMatrix;
use sbm_spectral::spectral::{
    spectral_norm, top_eigenspace, top_left_singular_space, BipartiteSparse, EigenOptions, EigenOrder, RowGram,
    SparseSym,
};
use sbm_spectral::Error;

fn tight() -> EigenOptions {
    EigenOptions::default().with_tol(1e-13)
}

#[test]
fn symmetric_top_three_matches_dense() {
    let (dense, sparse) = common::random_symmetric(50, &mut common::rng(1));
    let got = top_eigenspace(&sparse, 3, &tight()).unwrap();
    let want = common::top_eigvecs(&dense, 3);
    assert!(common::sin_angle(&want, &common::to_matrix(&got.subspace)) < 1e-8);
    let (values, _) = common::sorted_eigen(&dense);
    for (g, w) in got.values.iter().zip(&values) {
        assert!((g - w).abs() < 1e-9 * values[0].abs());
    }
}

#[test]
fn magnitude_order_matches_dense() {
    let (dense, sparse) = common::random_symmetric(40, &mut common::rng(2));
    let got = top_eigenspace(&sparse, 2, &tight().with_order(EigenOrder::Magnitude)).unwrap();
    let (values, vectors) = common::sorted_eigen(&dense);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    let want = DMatrix::from_fn(40, 2, |r, c| vectors[(r, order[c])]);
    assert!(common::sin_angle(&want, &common::to_matrix(&got.subspace)) < 1e-8);
}

#[test]
fn known_singular_values() {
    // Rows 0..3 carry singular values 3, 2, 1 on columns 0..3.
    let mut dense = DMatrix::zeros(6, 4);
    let mut triplets = Vec::new();
    for (i, s) in [3.0, 2.0, 1.0].into_iter().enumerate() {
        dense[(i, i)] = s;
        triplets.push((i, i, s));
    }
    let (_, values) = common::top_left_singular(&dense, 2);
    assert!((values[0] - 3.0).abs() < 1e-12 && (values[1] - 2.0).abs() < 1e-12);
    // Squared singular values are the eigenvalues of B B^T.
    let gram = SparseSym::from_triplets(6, triplets.iter().map(|&(i, j, s)| (i, j, s * s))).unwrap();
    let got = top_eigenspace(&gram, 2, &tight()).unwrap();
    assert!((got.values[0] - 9.0).abs() < 1e-10 && (got.values[1] - 4.0).abs() < 1e-10);
    let want = DMatrix::from_fn(6, 2, |r, c| if r == c { 1.0 } else { 0.0 });
    assert!(common::sin_angle(&want, &common::to_matrix(&got.subspace)) < 1e-10);
}

#[test]
fn sparse_bipartite_singular_space_matches_dense() {
    let (dense, sparse) = common::random_bipartite(40, 30, 0.2, &mut common::rng(3));
    let got = top_left_singular_space(&sparse, 4, &tight()).unwrap();
    let (want, values) = common::top_left_singular(&dense, 4);
    assert!(common::sin_angle(&want, &common::to_matrix(&got.subspace)) < 1e-8);
    for (g, w) in got.values.iter().zip(&values) {
        assert!((g - w).abs() < 1e-8 * values[0]);
    }
}

#[test]
fn spectral_norm_matches_dense() {
    let (dense, sparse) = common::random_symmetric(30, &mut common::rng(4));
    let got = spectral_norm(&sparse, 1e-12).unwrap();
    let want = common::spectral_norm(&dense);
    assert!((got - want).abs() < 1e-10 * want);

    let (dense, sparse) = common::random_bipartite(25, 35, 0.3, &mut common::rng(5));
    let got = spectral_norm(&RowGram(&sparse), 1e-12).unwrap();
    let want = common::spectral_norm(&dense).powi(2);
    assert!((got - want).abs() < 1e-10 * want);
}

#[test]
fn zero_bipartite_is_rank_deficient() {
    let b = BipartiteSparse::from_entries(5, 4, std::iter::empty()).unwrap();
    assert!(matches!(
        top_left_singular_space(&b, 1, &EigenOptions::default()),
        Err(Error::RankDeficient { .. })
    ));
}
