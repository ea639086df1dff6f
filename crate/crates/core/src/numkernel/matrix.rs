use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tolerance::tolerances;
use crate::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix(DMatrix<C64>);

/// Wire format shared by every matrix in the repository.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let entries = repr.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_row_major(repr.rows, repr.cols, entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        let (rows, cols) = m.0.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m.0[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixRepr { rows, cols, entries }
    }
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount { rows, cols, count: entries.len() });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by arithmetic on already-validated inputs.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert!(m.nrows() > 0 && m.ncols() > 0);
        Self(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows.max(1), cols.max(1)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim.max(1), dim.max(1)))
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// `max |A - A*|` entrywise; zero for Hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Leading `k x k` block (the compression onto the first `k` basis vectors).
    pub fn compress(&self, k: usize) -> Result<Self> {
        let k_max = self.rows().min(self.cols());
        if k == 0 || k > k_max {
            return Err(Error::invalid(format!("compression size {k} outside 1..={k_max}")));
        }
        Ok(Self(self.0.view((0, 0), (k, k)).into_owned()))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(Error::DimensionMismatch { expected: self.cols(), actual: v.len() });
        }
        let out = &self.0 * nalgebra::DVector::from_column_slice(v);
        Ok(out.iter().copied().collect())
    }

    fn check_same_shape(&self, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "matrix shape mismatch");
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs);
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs);
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product shape mismatch");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// A complex Hermitian matrix, stored symmetrized as `(H + H*)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianMatrix(ComplexMatrix);

impl TryFrom<ComplexMatrix> for HermitianMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianMatrix::new(m)
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}

impl HermitianMatrix {
    /// Validates Hermitian symmetry against `hermitian_tol` (relative to the
    /// largest entry) and stores the symmetrized matrix.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let deviation = m.hermitian_deviation();
        let tolerance = tolerances().hermitian_tol * m.max_abs().max(1.0);
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without validation; for matrices Hermitian by construction
    /// whose asymmetry is pure rounding.
    pub(crate) fn symmetrize(m: ComplexMatrix) -> Self {
        let mut inner = m.0;
        let n = inner.nrows();
        for i in 0..n {
            inner[(i, i)].im = 0.0;
            for j in (i + 1)..n {
                let avg = (inner[(i, j)] + inner[(j, i)].conj()) * 0.5;
                inner[(i, j)] = avg;
                inner[(j, i)] = avg.conj();
            }
        }
        Self(ComplexMatrix(inner))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Result<Self> {
        let diag: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        Ok(Self(ComplexMatrix::diagonal(&diag)?))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.0
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0 .0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0.get(row, col)
    }

    pub fn compress(&self, k: usize) -> Result<Self> {
        Ok(Self(self.0.compress(k)?))
    }

    /// `H - c I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.0 .0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= C64::new(c, 0.0);
        }
        Self(ComplexMatrix(m))
    }

    /// `H^2`, symmetrized.
    pub fn square(&self) -> Self {
        Self::symmetrize(&self.0 * &self.0)
    }

    /// Real linear combination of Hermitian matrices of the same size.
    pub fn real_combination(terms: &[(f64, &HermitianMatrix)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::invalid("empty combination"))?;
        let dim = first.1.dim();
        let mut acc = DMatrix::<C64>::zeros(dim, dim);
        for (c, h) in terms {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: h.dim() });
            }
            acc += h.as_dmatrix() * C64::new(*c, 0.0);
        }
        Ok(Self(ComplexMatrix(acc)))
    }

    /// `Re <H v, v>`.
    pub fn expectation(&self, v: &[C64]) -> Result<f64> {
        let hv = self.0.mul_vec(v)?;
        Ok(v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Checks `|v| = 1` within `tol`.
pub(crate) fn require_unit(v: &[C64], tol: f64) -> Result<()> {
    let norm = vec_norm(v);
    if (norm - 1.0).abs() > tol || !norm.is_finite() {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_wire_format() {
        let m = ComplexMatrix::from_row_major(1, 2, vec![C64::new(0.1, -2.0), C64::new(1e-300, 3.5)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[[0.1,-2.0],[1e-300,3.5]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_entry_count_and_non_finite() {
        let bad = r#"{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
        assert!(matches!(
            ComplexMatrix::from_row_major(1, 1, vec![C64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(ComplexMatrix::from_row_major(0, 3, vec![]), Err(Error::EmptyMatrix { .. })));
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![C64::new(1.0, 1e-14), C64::new(0.0, 1.0), C64::new(0.0, -1.0 - 1e-14), C64::new(2.0, 0.0)],
        )
        .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.as_complex().hermitian_deviation(), 0.0);
        assert_eq!(h.get(0, 0).im, 0.0);
    }

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), ZERO, C64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(HermitianMatrix::new(rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn compression_takes_leading_block() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((3 * i + j) as f64, 0.0)).unwrap();
        let c = m.compress(2).unwrap();
        assert_eq!(c.shape(), (2, 2));
        assert_eq!(c.get(1, 1), C64::new(4.0, 0.0));
        assert!(m.compress(4).is_err());
    }
}
