use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{vec_norm, ComplexMatrix, HermitianMatrix, C64};
use super::scalar::ScalarFn;
use crate::{Error, Result};

/// Eigendecomposition `H = V diag(values) V*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eig(h: &HermitianMatrix) -> Result<Eigen> {
    let m = h.as_dmatrix().clone();
    let dim = m.nrows();
    let Some(eig) = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * dim.max(10)) else {
        return Err(Error::NonConvergence { dim, condition: condition_estimate(h) });
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence { dim, condition: condition_estimate(h) });
    }
    Ok(Eigen { values, vectors: ComplexMatrix::wrap(vectors) })
}

fn condition_estimate(h: &HermitianMatrix) -> f64 {
    let m = h.as_dmatrix();
    let frob = m.norm();
    let min_diag = (0..m.nrows()).map(|i| m[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    frob / min_diag.max(f64::EPSILON * frob.max(1.0))
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Column `k` of `V`.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.as_dmatrix().column(k).iter().copied().collect()
    }

    /// `V diag(w) V*` for real weights `w`.
    pub fn reconstruct(&self, weights: &[f64]) -> HermitianMatrix {
        assert_eq!(weights.len(), self.dim());
        let v = self.vectors.as_dmatrix();
        let mut scaled = v.clone();
        for (k, &w) in weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(w);
        }
        HermitianMatrix::symmetrize(ComplexMatrix::wrap(scaled * v.adjoint()))
    }

    /// `f(H)` via `V f(Λ) V*`; fails on the first eigenvalue outside `f`'s domain.
    pub fn apply(&self, f: &ScalarFn) -> Result<HermitianMatrix> {
        let weights = self.map_values(f)?;
        Ok(self.reconstruct(&weights))
    }

    pub fn map_values(&self, f: &ScalarFn) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|&lambda| f.eval(lambda).ok_or(Error::Domain { eigenvalue: lambda }))
            .collect()
    }

    /// `V* A V`: an operator expressed in this eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = self.vectors.as_dmatrix();
        ComplexMatrix::wrap(v.adjoint() * a.as_dmatrix() * v)
    }
}

/// `f(H) = V f(Λ) V*`.
pub fn apply_scalar_function(h: &HermitianMatrix, f: &ScalarFn) -> Result<HermitianMatrix> {
    hermitian_eig(h)?.apply(f)
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.as_dmatrix().clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    dmatrix_norm(a.as_dmatrix())
}

pub(crate) fn dmatrix_norm(m: &DMatrix<C64>) -> f64 {
    if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    match m.shape() {
        (1, _) | (_, 1) => m.norm(),
        _ => m.clone().singular_values().max(),
    }
}

/// Minimal eigenvalue and a unit eigenvector for it.
pub fn smallest_eigpair(h: &HermitianMatrix) -> Result<(f64, Vec<C64>)> {
    let eig = hermitian_eig(h)?;
    let mut v = eig.vector(0);
    let norm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    Ok((eig.min(), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::scalar::Domain;
    use crate::ensemble::random_hermitian;

    fn diag(values: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(values).unwrap()
    }

    #[test]
    fn diagonal_input_sorts_with_permutation_vectors() {
        let e = hermitian_eig(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        for (col, row) in [(0, 1), (1, 2), (2, 0)] {
            assert!((e.vectors.get(row, col).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eig(&HermitianMatrix::identity(4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let h = random_hermitian(8, 1.0, 3);
        let e = hermitian_eig(&h).unwrap();
        let rebuilt = e.reconstruct(&e.values);
        assert!(operator_norm(&(h.as_complex() - rebuilt.as_complex())) <= 1e-10);
        let v = e.vectors.as_dmatrix();
        let gram = v.adjoint() * v - DMatrix::<C64>::identity(8, 8);
        assert!(gram.norm() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        assert!((operator_norm(diag(&[-2.0, 1.0]).as_complex()) - 2.0).abs() < 1e-14);
        let nil = ComplexMatrix::from_row_major(2, 2, vec![C64::new(0.0, 0.0), C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!((operator_norm(&nil) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_function_examples() {
        let h = diag(&[0.0, 3.0]);
        let same = apply_scalar_function(&h, &ScalarFn::identity()).unwrap();
        assert!(operator_norm(&(same.as_complex() - h.as_complex())) < 1e-15);
        let f = ScalarFn::new(Domain::greater_than(-1.0), |t| 1.0 / (1.0 + t));
        let r = apply_scalar_function(&h, &f).unwrap();
        assert!((r.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((r.get(1, 1).re - 0.25).abs() < 1e-15);
        let g = ScalarFn::total(|t| t / (1.0 + t * t));
        let e = hermitian_eig(&apply_scalar_function(&random_hermitian(16, 3.0, 5), &g).unwrap()).unwrap();
        assert!(e.min() >= -0.5 - 1e-12 && e.max() <= 0.5 + 1e-12);
    }

    #[test]
    fn domain_error_names_eigenvalue() {
        let h = diag(&[-2.0, 1.0]);
        let f = ScalarFn::new(Domain::at_least(0.0), f64::sqrt);
        match apply_scalar_function(&h, &f) {
            Err(Error::Domain { eigenvalue }) => assert_eq!(eigenvalue, -2.0),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn smallest_pair_examples() {
        let (mu, v) = smallest_eigpair(&diag(&[5.0, 2.0, 9.0])).unwrap();
        assert_eq!(mu, 2.0);
        assert!((v[1].norm() - 1.0).abs() < 1e-15);
        let (mu, v) = smallest_eigpair(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(mu, 1.0);
        assert!((vec_norm(&v) - 1.0).abs() < 1e-12);
    }
}
