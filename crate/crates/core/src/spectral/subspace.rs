use super::jacobi::symmetric_eigen;
use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Orthonormal basis of a subspace of `R^dimension`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    dimension: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    /// Wraps vectors that are already orthonormal (Gram matrix within 1e-10
    /// of the identity).
    pub fn from_orthonormal(dimension: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        for q in &basis {
            if q.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    actual: q.len(),
                });
            }
        }
        for i in 0..basis.len() {
            for j in 0..=i {
                let g = dot(&basis[i], &basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "basis not orthonormal: <q{i}, q{j}> = {g}"
                    )));
                }
            }
        }
        Ok(Self { dimension, basis })
    }

    /// Orthonormalizes `vectors` (Gram-Schmidt, two passes). Fails if they
    /// are linearly dependent.
    pub fn span(dimension: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
        for mut v in vectors {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    actual: v.len(),
                });
            }
            let original = norm(&v);
            if !orthogonalize_against(&mut v, &basis, original) {
                return Err(Error::InvalidArgument("vectors are linearly dependent".into()));
            }
            basis.push(v);
        }
        Ok(Self { dimension, basis })
    }

    pub(crate) fn from_parts(dimension: usize, basis: Vec<Vec<f64>>) -> Self {
        Self { dimension, basis }
    }

    /// Ambient dimension.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Coordinates `<q_i, v>` of `v` in the basis.
    pub fn coefficients(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: v.len(),
            });
        }
        Ok(self.basis.iter().map(|q| dot(q, v)).collect())
    }

    /// Vector with coordinates `coeffs` in the basis.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for (q, &c) in self.basis.iter().zip(coeffs) {
            axpy(c, q, &mut out);
        }
        out
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rank() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(&self.basis[i], &self.basis[j]) - target).abs());
            }
        }
        worst
    }
}

/// Orthogonal projection `P_W v = sum_i <q_i, v> q_i`.
pub fn project(w: &Subspace, v: &[f64]) -> Result<Vec<f64>> {
    let c = w.coefficients(v)?;
    Ok(w.combine(&c))
}

/// `sin(angle(W1, W2)) = ||P_W1 - P_W2||` for subspaces of equal rank.
///
/// For equal ranks this equals `||(I - P_W1) Q2||`, the largest singular
/// value of the component of W2's basis orthogonal to W1, which is computed
/// on the `rank x rank` Gram matrix of that component.
pub fn subspace_angle(w1: &Subspace, w2: &Subspace) -> Result<f64> {
    if w1.dimension != w2.dimension {
        return Err(Error::DimensionMismatch {
            expected: w1.dimension,
            actual: w2.dimension,
        });
    }
    if w1.rank() != w2.rank() {
        return Err(Error::RankMismatch {
            left: w1.rank(),
            right: w2.rank(),
        });
    }
    let r = w1.rank();
    if r == 0 {
        return Ok(0.0);
    }
    let residual: Vec<Vec<f64>> = w2
        .basis
        .iter()
        .map(|q| {
            let p = project(w1, q).expect("dimensions checked");
            q.iter().zip(&p).map(|(a, b)| a - b).collect()
        })
        .collect();
    let mut gram = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..=i {
            let g = dot(&residual[i], &residual[j]);
            gram[i * r + j] = g;
            gram[j * r + i] = g;
        }
    }
    let (vals, _) = symmetric_eigen(&gram, r);
    let top = vals.into_iter().fold(0.0f64, f64::max);
    Ok(top.max(0.0).sqrt().min(1.0))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Removes the components of `v` along `basis` (two passes) and normalizes.
/// Returns false when what remains is negligible relative to `scale`.
pub(crate) fn orthogonalize_against(v: &mut [f64], basis: &[Vec<f64>], scale: f64) -> bool {
    if scale == 0.0 || !scale.is_finite() {
        return false;
    }
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
    let nv = norm(v);
    if nv <= 1e-10 * scale {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    true
}
