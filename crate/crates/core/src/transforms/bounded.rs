use nalgebra::DMatrix;
use serde::Serialize;

use crate::numkernel::{dmatrix_norm, hermitian_eig, tolerances, ComplexMatrix, Eigen, HermitianMatrix, C64};
use crate::tuples::{matrix_commutator, sum_of_squares, OperatorTuple};
use crate::{Error, Result};

/// Spectral data of `d = sum_j h_j^2` from which every resolvent-type
/// function of `d` is read off.
#[derive(Debug, Clone)]
pub(crate) struct DCalculus {
    eig: Eigen,
}

impl DCalculus {
    pub(crate) fn new(t: &OperatorTuple) -> Result<Self> {
        let mut eig = hermitian_eig(&sum_of_squares(t))?;
        let scale = eig.max().abs().max(1.0);
        for v in eig.values.iter_mut() {
            if *v < -tolerances().eig_tol * scale {
                return Err(Error::Domain { eigenvalue: *v });
            }
            *v = v.max(0.0);
        }
        Ok(Self { eig })
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.eig.values
    }

    pub(crate) fn weights(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.eig.values.iter().map(|&x| f(x)).collect()
    }

    pub(crate) fn function(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        self.eig.reconstruct(&self.weights(f))
    }

    /// `V* A V`.
    pub(crate) fn to_basis(&self, a: &ComplexMatrix) -> DMatrix<C64> {
        self.eig.to_eigenbasis(a).into_dmatrix()
    }
}

fn scale_rows(m: &DMatrix<C64>, w: &[f64]) -> DMatrix<C64> {
    let mut out = m.clone();
    for (i, &s) in w.iter().enumerate() {
        out.row_mut(i).scale_mut(s);
    }
    out
}

fn scale_cols(m: &DMatrix<C64>, w: &[f64]) -> DMatrix<C64> {
    let mut out = m.clone();
    for (j, &s) in w.iter().enumerate() {
        out.column_mut(j).scale_mut(s);
    }
    out
}

/// `(a, b_1, ..., b_n)` with `a = (d - 1)(1 + d)^{-1}` and `b_j = 2 h_j (1 + d)^{-1}`.
#[derive(Debug, Clone)]
pub struct BoundedTransform {
    pub a: HermitianMatrix,
    pub b: Vec<ComplexMatrix>,
    pub source: OperatorTuple,
}

pub fn bounded_transform(t: &OperatorTuple) -> Result<BoundedTransform> {
    let calc = DCalculus::new(t)?;
    let a = calc.function(|x| (x - 1.0) / (x + 1.0));
    let resolvent = calc.function(|x| 1.0 / (1.0 + x)).into_complex();
    let two = C64::new(2.0, 0.0);
    let b = t.ops().iter().map(|h| (h.as_complex() * &resolvent).scale(two)).collect();
    Ok(BoundedTransform { a, b, source: t.clone() })
}

impl BoundedTransform {
    /// `|sum_j b_j* b_j + a^2 - I|`.
    pub fn identity_residual(&self) -> f64 {
        let a = self.a.as_dmatrix();
        let mut acc = a * a;
        for b in &self.b {
            acc += b.as_dmatrix().adjoint() * b.as_dmatrix();
        }
        for i in 0..acc.nrows() {
            acc[(i, i)] -= C64::new(1.0, 0.0);
        }
        dmatrix_norm(&acc)
    }

    /// `max_j |b_j - b_j*|`; zero for commuting tuples.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.b.iter().map(|b| dmatrix_norm(&(b.as_dmatrix() - b.as_dmatrix().adjoint()))).fold(0.0, f64::max)
    }

    pub fn a_norm(&self) -> f64 {
        dmatrix_norm(self.a.as_dmatrix())
    }
}

/// `h_j (1 + d)^{-1}` for every `j`.
pub fn tilde_transform(t: &OperatorTuple) -> Result<Vec<ComplexMatrix>> {
    let calc = DCalculus::new(t)?;
    let resolvent = calc.function(|x| 1.0 / (1.0 + x)).into_complex();
    Ok(t.ops().iter().map(|h| h.as_complex() * &resolvent).collect())
}

/// `(1 + d)^{-1/2} h_j (1 + d)^{-1/2}` for every `j`.
pub fn bar_transform(t: &OperatorTuple) -> Result<Vec<HermitianMatrix>> {
    let calc = DCalculus::new(t)?;
    Ok(bar_from(&calc, t))
}

pub(crate) fn bar_from(calc: &DCalculus, t: &OperatorTuple) -> Vec<HermitianMatrix> {
    let r = calc.function(|x| 1.0 / (1.0 + x).sqrt()).into_complex();
    t.ops().iter().map(|h| HermitianMatrix::symmetrize(&(&r * h.as_complex()) * &r)).collect()
}

/// Piecewise-linear cutoff: 1 on `[-M, M]`, 0 outside `[-M-1, M+1]`, linear between.
pub fn cutoff_fn(m: f64, s: f64) -> f64 {
    let s = s.abs();
    if s <= m {
        1.0
    } else if s >= m + 1.0 {
        0.0
    } else {
        m + 1.0 - s
    }
}

/// `e_M(d^{1/2})` for a positive semidefinite `d`.
pub fn cutoff(d: &HermitianMatrix, m: f64) -> Result<HermitianMatrix> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid(format!("cutoff radius must be positive, got {m}")));
    }
    let eig = hermitian_eig(d)?;
    let floor = -tolerances().eig_tol * eig.max().abs().max(1.0);
    let weights = eig
        .values
        .iter()
        .map(|&x| if x < floor { Err(Error::Domain { eigenvalue: x }) } else { Ok(cutoff_fn(m, x.max(0.0).sqrt())) })
        .collect::<Result<Vec<_>>>()?;
    Ok(eig.reconstruct(&weights))
}

/// The norms bounded by one unconditional estimate each (maxima over `j`).
///
/// Bounds: `resolvent_d`, the four resolvent products and `two_bar` are at
/// most 1; `cutoff_h` is at most `cutoff_m`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormBounds {
    /// `|d (1 + d)^{-1}|`
    pub resolvent_d: f64,
    /// `|h_j (1 + d)^{-1/2}|`
    pub h_sqrt_right: f64,
    /// `|(1 + d)^{-1/2} h_j|`
    pub h_sqrt_left: f64,
    /// `||h_j| (1 + d)^{-1/2}|`
    pub abs_h_sqrt: f64,
    /// `|h_j (1 + d)^{-1}|`
    pub h_resolvent_right: f64,
    /// `|(1 + d)^{-1} h_j|`
    pub h_resolvent_left: f64,
    /// `|e_M(d^{1/2}) h_j|`
    pub cutoff_h: f64,
    pub cutoff_m: f64,
    /// `|2 (1 + d)^{-1/2} h_j (1 + d)^{-1/2}|`
    pub two_bar: f64,
}

impl NormBounds {
    /// Smallest `bound - value` over all entries.
    pub fn worst_margin(&self) -> f64 {
        [
            1.0 - self.resolvent_d,
            1.0 - self.h_sqrt_right,
            1.0 - self.h_sqrt_left,
            1.0 - self.abs_h_sqrt,
            1.0 - self.h_resolvent_right,
            1.0 - self.h_resolvent_left,
            self.cutoff_m - self.cutoff_h,
            1.0 - self.two_bar,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates every [`NormBounds`] entry in the eigenbasis of `d`.
pub fn norm_bounds(t: &OperatorTuple, m: f64) -> Result<NormBounds> {
    let calc = DCalculus::new(t)?;
    let inv_sqrt = calc.weights(|x| 1.0 / (1.0 + x).sqrt());
    let inv = calc.weights(|x| 1.0 / (1.0 + x));
    let cut = calc.weights(|x| cutoff_fn(m, x.sqrt()));
    let resolvent_d = calc.values().iter().map(|&x| x / (1.0 + x)).fold(0.0, f64::max);
    let mut nb = NormBounds {
        resolvent_d,
        h_sqrt_right: 0.0,
        h_sqrt_left: 0.0,
        abs_h_sqrt: 0.0,
        h_resolvent_right: 0.0,
        h_resolvent_left: 0.0,
        cutoff_h: 0.0,
        cutoff_m: m,
        two_bar: 0.0,
    };
    for h in t.ops() {
        let hb = calc.to_basis(h.as_complex());
        let abs_h = hermitian_eig(h)?;
        let abs_h = abs_h.reconstruct(&abs_h.values.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let abs_b = calc.to_basis(abs_h.as_complex());
        nb.h_sqrt_right = nb.h_sqrt_right.max(dmatrix_norm(&scale_cols(&hb, &inv_sqrt)));
        nb.h_sqrt_left = nb.h_sqrt_left.max(dmatrix_norm(&scale_rows(&hb, &inv_sqrt)));
        nb.abs_h_sqrt = nb.abs_h_sqrt.max(dmatrix_norm(&scale_cols(&abs_b, &inv_sqrt)));
        nb.h_resolvent_right = nb.h_resolvent_right.max(dmatrix_norm(&scale_cols(&hb, &inv)));
        nb.h_resolvent_left = nb.h_resolvent_left.max(dmatrix_norm(&scale_rows(&hb, &inv)));
        nb.cutoff_h = nb.cutoff_h.max(dmatrix_norm(&scale_rows(&hb, &cut)));
        let bar = scale_cols(&scale_rows(&hb, &inv_sqrt), &inv_sqrt);
        nb.two_bar = nb.two_bar.max(2.0 * dmatrix_norm(&bar));
    }
    Ok(nb)
}

/// Commutator-transfer quantities of a tuple, each a maximum over indices.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransferReport {
    /// `max |[h_i, h_j]|`
    pub max_commutator: f64,
    /// `|[a, b_j]|`
    pub a_b: f64,
    /// `|b_j - b_j*|`
    pub b_defect: f64,
    /// `|[b_i, b_j]|`
    pub b_b: f64,
    /// `|h_j (1+d)^{-1} - (1+d)^{-1/2} h_j (1+d)^{-1/2}|`
    pub tilde_bar: f64,
    /// `|[h_j, (1+d)^{-1}]|`
    pub h_resolvent: f64,
    /// `|[h_j, (1+d)^{-1/2}]|`
    pub h_sqrt_resolvent: f64,
}

impl TransferReport {
    /// Smallest margin against the conclusions for tolerance `eta`:
    /// `eta` for the first three, `eta / 3` for the rest.
    pub fn worst_margin(&self, eta: f64) -> f64 {
        [
            eta - self.a_b,
            eta - self.b_defect,
            eta - self.b_b,
            eta / 3.0 - self.tilde_bar,
            eta / 3.0 - self.h_resolvent,
            eta / 3.0 - self.h_sqrt_resolvent,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

pub fn commutator_transfer(t: &OperatorTuple) -> Result<TransferReport> {
    let calc = DCalculus::new(t)?;
    let bt = bounded_transform(t)?;
    let resolvent = calc.function(|x| 1.0 / (1.0 + x)).into_complex();
    let sqrt_res = calc.function(|x| 1.0 / (1.0 + x).sqrt()).into_complex();
    let tilde = tilde_transform(t)?;
    let bar = bar_from(&calc, t);
    let n = t.n();
    let mut r = TransferReport {
        max_commutator: crate::tuples::commutator_report(t).max_delta,
        a_b: 0.0,
        b_defect: bt.self_adjoint_defect(),
        b_b: 0.0,
        tilde_bar: 0.0,
        h_resolvent: 0.0,
        h_sqrt_resolvent: 0.0,
    };
    let norm = |m: &ComplexMatrix| dmatrix_norm(m.as_dmatrix());
    for j in 0..n {
        let h = t.ops()[j].as_complex();
        r.a_b = r.a_b.max(norm(&matrix_commutator(bt.a.as_complex(), &bt.b[j])));
        r.tilde_bar = r.tilde_bar.max(norm(&(&tilde[j] - bar[j].as_complex())));
        r.h_resolvent = r.h_resolvent.max(norm(&matrix_commutator(h, &resolvent)));
        r.h_sqrt_resolvent = r.h_sqrt_resolvent.max(norm(&matrix_commutator(h, &sqrt_res)));
        for i in (j + 1)..n {
            r.b_b = r.b_b.max(norm(&matrix_commutator(&bt.b[i], &bt.b[j])));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::operator_norm;
    use crate::tuples::{random_almost_commuting, random_tuple};

    fn scalar(x: f64) -> OperatorTuple {
        OperatorTuple::new("scalar", vec![HermitianMatrix::from_real_diagonal(&[x]).unwrap()], None).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let bt = bounded_transform(&scalar(1.0)).unwrap();
        assert!(bt.a.get(0, 0).norm() < 1e-15);
        assert!((bt.b[0].get(0, 0).re - 1.0).abs() < 1e-15);
        let bt = bounded_transform(&scalar(0.0)).unwrap();
        assert_eq!(bt.a.get(0, 0).re, -1.0);
        assert_eq!(bt.b[0].get(0, 0).norm(), 0.0);
        assert!((tilde_transform(&scalar(1.0)).unwrap()[0].get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((bar_transform(&scalar(1.0)).unwrap()[0].get(0, 0).re - 0.5).abs() < 1e-15);
        for x in [-7.0, -0.3, 0.2, 3.0] {
            let v = bar_transform(&scalar(x)).unwrap()[0].get(0, 0).re;
            assert!((v - x / (1.0 + x * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_holds_on_random_tuples() {
        for seed in 0..5 {
            let t = random_tuple(3, 32, 3.0, seed).unwrap();
            let bt = bounded_transform(&t).unwrap();
            assert!(bt.identity_residual() <= 1e-10);
            assert!(bt.a_norm() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn commuting_tuple_has_hermitian_tilde() {
        let t = random_almost_commuting(3, 12, 0.0, 4).unwrap();
        for m in tilde_transform(&t).unwrap() {
            assert_eq!(m.hermitian_deviation(), 0.0);
        }
        let r = commutator_transfer(&t).unwrap();
        assert_eq!(r.max_commutator, 0.0);
        assert!(r.a_b < 1e-15 && r.b_b < 1e-15 && r.b_defect < 1e-15);
    }

    #[test]
    fn cutoff_plateaus_and_ramp() {
        let m = 1.3;
        let d = HermitianMatrix::from_real_diagonal(&[0.0, m * m, (m + 2.0) * (m + 2.0), (m + 0.5) * (m + 0.5)]).unwrap();
        let e = cutoff(&d, m).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| e.get(i, i).re).collect();
        for (got, want) in diag.iter().zip([1.0, 1.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{diag:?}");
        }
        assert!(cutoff(&d, 0.0).is_err());
    }

    #[test]
    fn cutoff_nesting() {
        let t = random_tuple(2, 20, 2.0, 8).unwrap();
        let d = sum_of_squares(&t);
        let e1 = cutoff(&d, 1.2).unwrap();
        let e2 = cutoff(&d, 2.2).unwrap();
        let prod = e2.as_complex() * e1.as_complex();
        assert!(operator_norm(&(&prod - e1.as_complex())) < 1e-10);
    }

    #[test]
    fn norm_bounds_hold_for_large_entries() {
        let t = random_tuple(4, 24, 1e4, 2).unwrap();
        let nb = norm_bounds(&t, 1.5).unwrap();
        assert!(nb.worst_margin() >= -1e-10, "{nb:?}");
    }
}
