//! Finite truncations of n-tuples of self-adjoint operators, commutator
//! diagnostics and the seeded almost-commuting ensemble.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{random_hermitian_with, rng};
use crate::numkernel::{operator_norm, ComplexMatrix, HermitianMatrix, C64};
use crate::{Error, Result};

/// `n` Hermitian matrices of a common size standing for `(h_1, ..., h_n)`.
///
/// `interior_dim`, when set, marks the leading coordinates on which a
/// truncated model reproduces the untruncated operator identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TupleRepr", into = "TupleRepr")]
pub struct OperatorTuple {
    label: String,
    ops: Vec<HermitianMatrix>,
    interior_dim: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleRepr {
    label: String,
    n: usize,
    dim: usize,
    interior_dim: Option<usize>,
    ops: Vec<HermitianMatrix>,
}

impl TryFrom<TupleRepr> for OperatorTuple {
    type Error = Error;

    fn try_from(r: TupleRepr) -> Result<Self> {
        if r.ops.len() != r.n {
            return Err(Error::Load(format!("tuple declares n = {} but holds {} operators", r.n, r.ops.len())));
        }
        let t = OperatorTuple::new(r.label, r.ops, r.interior_dim)?;
        if t.dim() != r.dim {
            return Err(Error::Load(format!("tuple declares dim = {} but operators are {}x{}", r.dim, t.dim(), t.dim())));
        }
        Ok(t)
    }
}

impl From<OperatorTuple> for TupleRepr {
    fn from(t: OperatorTuple) -> Self {
        TupleRepr { n: t.n(), dim: t.dim(), label: t.label, interior_dim: t.interior_dim, ops: t.ops }
    }
}

impl OperatorTuple {
    pub fn new(label: impl Into<String>, ops: Vec<HermitianMatrix>, interior_dim: Option<usize>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::invalid("a tuple needs at least one operator"))?;
        let dim = first.dim();
        if let Some(bad) = ops.iter().find(|h| h.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, actual: bad.dim() });
        }
        if let Some(k) = interior_dim {
            if k == 0 || k > dim {
                return Err(Error::invalid(format!("interior_dim {k} outside 1..={dim}")));
            }
        }
        Ok(Self { label: label.into(), ops, interior_dim })
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ops(&self) -> &[HermitianMatrix] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> Result<&HermitianMatrix> {
        self.ops.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.n() })
    }

    pub fn interior_dim(&self) -> Option<usize> {
        self.interior_dim
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Largest operator norm among the members.
    pub fn max_norm(&self) -> f64 {
        self.ops.iter().map(|h| operator_norm(h.as_complex())).fold(0.0, f64::max)
    }
}

/// `[h_i, h_j] = h_i h_j - h_j h_i`.
pub fn commutator(t: &OperatorTuple, i: usize, j: usize) -> Result<ComplexMatrix> {
    let (hi, hj) = (t.op(i)?, t.op(j)?);
    if i == j {
        return Ok(ComplexMatrix::zeros(t.dim(), t.dim()));
    }
    Ok(matrix_commutator(hi.as_complex(), hj.as_complex()))
}

pub(crate) fn matrix_commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// Pairwise commutator norms `|[h_i, h_j]|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub pairwise_norms: Vec<Vec<f64>>,
    pub max_delta: f64,
    pub restricted_to_interior: bool,
}

/// Commutator norms on the full truncation.
pub fn commutator_report(t: &OperatorTuple) -> CommutatorReport {
    build_report(t, None)
}

/// Commutator norms on the compression to the leading `interior_dim`
/// coordinates; falls back to the full truncation when no interior is set.
pub fn commutator_report_interior(t: &OperatorTuple) -> CommutatorReport {
    build_report(t, t.interior_dim())
}

fn build_report(t: &OperatorTuple, interior: Option<usize>) -> CommutatorReport {
    let n = t.n();
    let mut norms = vec![vec![0.0; n]; n];
    let mut max_delta = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = matrix_commutator(t.ops[i].as_complex(), t.ops[j].as_complex());
            let c = match interior {
                Some(k) => c.compress(k).expect("interior_dim validated at construction"),
                None => c,
            };
            let v = operator_norm(&c);
            norms[i][j] = v;
            norms[j][i] = v;
            max_delta = max_delta.max(v);
        }
    }
    CommutatorReport { pairwise_norms: norms, max_delta, restricted_to_interior: interior.is_some() }
}

/// `d = sum_j h_j^2`.
pub fn sum_of_squares(t: &OperatorTuple) -> HermitianMatrix {
    let mut acc = t.ops[0].square().into_complex();
    for h in &t.ops[1..] {
        acc = &acc + h.square().as_complex();
    }
    HermitianMatrix::symmetrize(acc)
}

/// Seeded ensemble `D + c E`: `D` a commuting diagonal tuple with entries
/// uniform in `[-1, 1]`, `E` unit-norm Hermitian perturbations, and `c` chosen
/// so that every pairwise commutator norm is at most `delta` and `|h_i| <= 2`.
pub fn random_almost_commuting(n: usize, dim: usize, delta: f64, seed: u64) -> Result<OperatorTuple> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("delta must be a finite nonnegative number, got {delta}")));
    }
    if n == 0 || dim == 0 {
        return Err(Error::invalid("tuple length and dimension must be positive"));
    }
    let mut rng = rng(seed);
    let diagonals: Vec<Vec<f64>> =
        (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
    let perturbations: Vec<ComplexMatrix> = (0..n)
        .map(|_| {
            let e = random_hermitian_with(dim, 1.0, &mut rng).into_complex();
            let norm = operator_norm(&e);
            if norm > 0.0 { e.scale(C64::new(1.0 / norm, 0.0)) } else { e }
        })
        .collect();
    let diag_mats: Vec<ComplexMatrix> = diagonals
        .iter()
        .map(|d| HermitianMatrix::from_real_diagonal(d).map(HermitianMatrix::into_complex))
        .collect::<Result<_>>()?;

    let label = format!("random_almost_commuting(n={n},dim={dim},delta={delta},seed={seed})");
    if delta == 0.0 || n == 1 {
        let scale = if n == 1 { 1.0 } else { 0.0 };
        return assemble(&label, &diag_mats, &perturbations, scale);
    }

    // |[h_i, h_j]| <= c * linear + c^2 * quadratic for h = D + c E.
    let mut linear = 0.0_f64;
    let mut quadratic = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let lin = &matrix_commutator(&diag_mats[i], &perturbations[j])
                + &matrix_commutator(&perturbations[i], &diag_mats[j]);
            linear = linear.max(operator_norm(&lin));
            quadratic = quadratic.max(operator_norm(&matrix_commutator(&perturbations[i], &perturbations[j])));
        }
    }
    let disc = (linear * linear + 4.0 * quadratic * delta).sqrt();
    let mut scale = if linear + disc > 0.0 { 2.0 * delta / (linear + disc) } else { 1.0 };
    scale = scale.min(1.0);

    // The triangle bound is loose; a few secant steps move the realized
    // maximum toward `delta` while keeping it below.
    let measure = |c: f64| -> Result<f64> {
        Ok(commutator_report(&assemble(&label, &diag_mats, &perturbations, c)?).max_delta)
    };
    let mut realized = measure(scale)?;
    for _ in 0..3 {
        if realized <= 0.0 {
            break;
        }
        let trial = (scale * delta / realized * 0.999).min(1.0);
        if trial <= scale {
            break;
        }
        let m = measure(trial)?;
        if m <= delta {
            scale = trial;
            realized = m;
        } else {
            break;
        }
    }
    assemble(&label, &diag_mats, &perturbations, scale)
}

fn assemble(label: &str, diag: &[ComplexMatrix], pert: &[ComplexMatrix], scale: f64) -> Result<OperatorTuple> {
    let ops = diag
        .iter()
        .zip(pert)
        .map(|(d, e)| HermitianMatrix::symmetrize(d + &e.scale(C64::new(scale, 0.0))))
        .collect();
    OperatorTuple::new(label, ops, None)
}

/// Seeded tuple of independent Hermitian matrices with norms about `2 * scale`.
pub fn random_tuple(n: usize, dim: usize, scale: f64, seed: u64) -> Result<OperatorTuple> {
    if n == 0 || dim == 0 {
        return Err(Error::invalid("tuple length and dimension must be positive"));
    }
    let mut rng = rng(seed);
    let ops = (0..n).map(|_| random_hermitian_with(dim, scale, &mut rng)).collect();
    OperatorTuple::new(format!("random_tuple(n={n},dim={dim},scale={scale},seed={seed})"), ops, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::hermitian_eig;

    fn pauli() -> (HermitianMatrix, HermitianMatrix, HermitianMatrix) {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let sx = HermitianMatrix::new(ComplexMatrix::from_row_major(2, 2, vec![z, o, o, z]).unwrap()).unwrap();
        let sy = HermitianMatrix::new(ComplexMatrix::from_row_major(2, 2, vec![z, -i, i, z]).unwrap()).unwrap();
        let sz = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap();
        (sx, sy, sz)
    }

    fn diag_tuple(rows: &[&[f64]]) -> OperatorTuple {
        let ops = rows.iter().map(|r| HermitianMatrix::from_real_diagonal(r).unwrap()).collect();
        OperatorTuple::new("diag", ops, None).unwrap()
    }

    #[test]
    fn commuting_diagonal_pair_has_zero_commutator() {
        let t = diag_tuple(&[&[1.0, 2.0, 3.0], &[-1.0, 0.5, 4.0]]);
        assert_eq!(operator_norm(&commutator(&t, 0, 1).unwrap()), 0.0);
        assert_eq!(commutator_report(&t).max_delta, 0.0);
    }

    #[test]
    fn pauli_commutator_is_two_i_sigma_z() {
        let (sx, sy, sz) = pauli();
        let t = OperatorTuple::new("pauli", vec![sx, sy], None).unwrap();
        let c = commutator(&t, 0, 1).unwrap();
        let expected = sz.as_complex().scale(C64::new(0.0, 2.0));
        assert!(operator_norm(&(&c - &expected)) < 1e-15);
        let d = sum_of_squares(&t);
        assert!(operator_norm(&(d.as_complex() - &HermitianMatrix::identity(2).as_complex().scale(C64::new(2.0, 0.0)))) < 1e-15);
    }

    #[test]
    fn commutator_index_errors_and_antisymmetry() {
        let t = random_tuple(3, 5, 1.0, 1).unwrap();
        assert!(matches!(commutator(&t, 0, 3), Err(Error::IndexOutOfRange { index: 3, len: 3 })));
        assert_eq!(operator_norm(&commutator(&t, 1, 1).unwrap()), 0.0);
        let c01 = commutator(&t, 0, 1).unwrap();
        let c10 = commutator(&t, 1, 0).unwrap();
        assert!(operator_norm(&(&c01 + &c10)) < 1e-12);
        assert!(operator_norm(&(&c01 + &c01.adjoint())) < 1e-12);
        let r = commutator_report(&t);
        for i in 0..3 {
            assert_eq!(r.pairwise_norms[i][i], 0.0);
            for j in 0..3 {
                assert_eq!(r.pairwise_norms[i][j], r.pairwise_norms[j][i]);
            }
        }
    }

    #[test]
    fn sum_of_squares_single_op() {
        let t = diag_tuple(&[&[1.0, -2.0]]);
        let d = sum_of_squares(&t);
        assert_eq!(d.get(0, 0).re, 1.0);
        assert_eq!(d.get(1, 1).re, 4.0);
    }

    #[test]
    fn generator_contract() {
        let t = random_almost_commuting(2, 16, 0.05, 7).unwrap();
        let r = commutator_report(&t);
        assert!(r.max_delta <= 0.05, "max_delta {}", r.max_delta);
        assert!(r.max_delta > 0.02, "secant refinement should approach the target, got {}", r.max_delta);
        assert!(t.max_norm() <= 2.0 + 1e-12);
        let again = random_almost_commuting(2, 16, 0.05, 7).unwrap();
        assert_eq!(t, again);
        assert!(random_almost_commuting(2, 4, -1.0, 0).is_err());
    }

    #[test]
    fn zero_delta_is_exactly_diagonal() {
        let t = random_almost_commuting(3, 10, 0.0, 11).unwrap();
        for h in t.ops() {
            for i in 0..10 {
                for j in 0..10 {
                    if i != j {
                        assert_eq!(h.get(i, j), C64::new(0.0, 0.0));
                    }
                }
            }
        }
        assert_eq!(commutator_report(&t).max_delta, 0.0);
    }

    #[test]
    fn interior_report_compresses() {
        let (sx, sy, _) = pauli();
        let t = OperatorTuple::new("p", vec![sx, sy], Some(1)).unwrap();
        let r = commutator_report_interior(&t);
        assert!(r.restricted_to_interior);
        assert!((r.max_delta - 2.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = random_tuple(2, 3, 1.0, 9).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"n\":2") && s.contains("\"dim\":3"));
        let back: OperatorTuple = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = s.replace("\"n\":2", "\"n\":3");
        assert!(serde_json::from_str::<OperatorTuple>(&bad).is_err());
    }

    #[test]
    fn sum_of_squares_is_psd() {
        for seed in 0..5 {
            let t = random_tuple(3, 12, 2.0, seed).unwrap();
            let e = hermitian_eig(&sum_of_squares(&t)).unwrap();
            assert!(e.min() >= -1e-10);
        }
    }
}
