use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::numkernel::{hermitian_eig, ComplexMatrix, HermitianMatrix, C64};
use crate::{Error, Result};

/// `L = (1 + T T*)^{-1/2} T`.
pub fn bounded_l(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    let e = hermitian_eig(&HermitianMatrix::symmetrize(t * &t.adjoint()))?;
    let w: Vec<f64> = e.values.iter().map(|&x| 1.0 / (1.0 + x.max(0.0)).sqrt()).collect();
    Ok(e.reconstruct(&w).as_complex() * t)
}

/// `|I - L L* - (I + T T*)^{-1}|` for `L = bounded_l(T)`.
pub fn bounded_l_defect(t: &ComplexMatrix) -> Result<f64> {
    let l = bounded_l(t)?;
    let e = hermitian_eig(&HermitianMatrix::symmetrize(t * &t.adjoint()))?;
    let w: Vec<f64> = e.values.iter().map(|&x| 1.0 / (1.0 + x.max(0.0))).collect();
    let lhs = &ComplexMatrix::identity(t.rows()) - &(&l * &l.adjoint());
    Ok(crate::numkernel::operator_norm(&(&lhs - e.reconstruct(&w).as_complex())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexStatus {
    Trusted,
    Inconclusive,
}

/// Kernel and cokernel counts of a truncated operator.
///
/// Near-null singular vectors are split by where they live: vectors
/// concentrated on the trailing `edge_width` coordinates are truncation
/// artifacts and are not counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    /// `kernel_dim - cokernel_dim`, absent when inconclusive.
    pub index: Option<i64>,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    /// Smallest kept singular value over the largest discarded one.
    pub singular_gap: f64,
    pub status: IndexStatus,
    pub near_null_right: usize,
    pub near_null_left: usize,
    pub edge_width: usize,
    pub threshold_ratio: f64,
}

/// Index with the trailing quarter of the basis treated as the truncation edge.
pub fn fredholm_index(t: &ComplexMatrix, threshold_ratio: f64) -> Result<IndexReport> {
    let edge = (t.rows() / 4).max(1);
    fredholm_index_with_edge(t, threshold_ratio, edge)
}

/// Index with an explicit edge width; `edge_width = 0` counts every near-null
/// vector, which for a square matrix always yields index 0.
pub fn fredholm_index_with_edge(t: &ComplexMatrix, threshold_ratio: f64, edge_width: usize) -> Result<IndexReport> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    if !(threshold_ratio > 1.0 && threshold_ratio.is_finite()) {
        return Err(Error::invalid(format!("threshold ratio must exceed 1, got {threshold_ratio}")));
    }
    let n = t.rows();
    if edge_width >= n {
        return Err(Error::invalid(format!("edge width {edge_width} leaves no interior in dimension {n}")));
    }
    let svd = t.as_dmatrix().clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V*");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let cut = smax / threshold_ratio;
    let null: Vec<usize> = (0..n).filter(|&k| sigma[k] < cut).collect();
    let kept_min = (0..n).filter(|&k| sigma[k] >= cut).map(|k| sigma[k]).fold(f64::INFINITY, f64::min);
    let discarded_max = null.iter().map(|&k| sigma[k]).fold(0.0, f64::max);
    let floor = smax * f64::EPSILON * n as f64;
    let singular_gap = if smax == 0.0 {
        0.0
    } else if null.is_empty() {
        f64::INFINITY
    } else {
        kept_min / discarded_max.max(floor)
    };

    let right = DMatrix::from_fn(n, null.len(), |i, c| v_t[(null[c], i)].conj());
    let left = DMatrix::from_fn(n, null.len(), |i, c| u[(i, null[c])]);
    let interior = n - edge_width;
    let (kernel_dim, amb_r) = localized_count(&right, interior);
    let (cokernel_dim, amb_l) = localized_count(&left, interior);
    let trusted = singular_gap >= 10.0 && !amb_r && !amb_l;
    Ok(IndexReport {
        index: trusted.then(|| kernel_dim as i64 - cokernel_dim as i64),
        kernel_dim,
        cokernel_dim,
        singular_gap,
        status: if trusted { IndexStatus::Trusted } else { IndexStatus::Inconclusive },
        near_null_right: null.len(),
        near_null_left: null.len(),
        edge_width,
        threshold_ratio,
    })
}

/// Number of directions of `span(basis)` carried by the leading `interior`
/// coordinates (singular values of the projected basis above `1/sqrt(2)`),
/// and whether any singular value sits in the ambiguous band `(0.1, 0.9)`.
fn localized_count(basis: &DMatrix<C64>, interior: usize) -> (usize, bool) {
    if basis.ncols() == 0 {
        return (0, false);
    }
    let projected = basis.rows(0, interior).into_owned();
    let s = projected.singular_values();
    let count = s.iter().filter(|&&x| x > std::f64::consts::FRAC_1_SQRT_2).count();
    let ambiguous = s.iter().any(|&x| x > 0.1 && x < 0.9);
    (count, ambiguous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{gaussian_matrix, rng};
    use crate::models::t_hbar_operator;
    use crate::numkernel::{operator_norm, singular_values};

    #[test]
    fn zero_operator_transform() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(operator_norm(&bounded_l(&z).unwrap()), 0.0);
        assert!(bounded_l_defect(&z).unwrap() < 1e-15);
    }

    #[test]
    fn l_identity_and_singular_values() {
        let t = t_hbar_operator(64, 0.1).unwrap();
        assert!(bounded_l_defect(&t).unwrap() <= 1e-10);
        let g = gaussian_matrix(10, 10, &mut rng(4)).scale(C64::new(3.0, 0.0));
        let l = bounded_l(&g).unwrap();
        assert!(operator_norm(&l) <= 1.0);
        for (sl, st) in singular_values(&l).iter().zip(singular_values(&g)) {
            assert!((sl - st / (1.0 + st * st).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn index_signs() {
        for (hbar, want) in [(0.1, 1), (-0.1, -1)] {
            let r = fredholm_index(&t_hbar_operator(64, hbar).unwrap(), 1e6).unwrap();
            assert_eq!(r.index, Some(want), "{r:?}");
            assert!(r.singular_gap >= 10.0);
        }
    }

    #[test]
    fn invertible_has_index_zero() {
        let g = gaussian_matrix(24, 24, &mut rng(9));
        let g = &g + &ComplexMatrix::identity(24).scale(C64::new(6.0, 0.0));
        let r = fredholm_index_with_edge(&g, 1e3, 0).unwrap();
        assert_eq!(r.index, Some(0));
        assert_eq!(r.near_null_right, 0);
    }

    #[test]
    fn zero_matrix_is_inconclusive() {
        let r = fredholm_index(&ComplexMatrix::zeros(8, 8), 1e3).unwrap();
        assert_eq!(r.status, IndexStatus::Inconclusive);
        assert_eq!(r.index, None);
    }
}
