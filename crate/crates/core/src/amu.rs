//! Approximate joint eigenvectors: the best unit vector for a point `lambda`,
//! the self-centered membership test, and scans over synthetic spectra.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numkernel::{require_unit, smallest_eigpair, tolerances, HermitianMatrix, C64};
use crate::spectrum::SyntheticSpectrum;
use crate::tuples::OperatorTuple;
use crate::{Error, Result};

/// A unit vector `v` for the point `lambda` with the residuals `|(h_i - lambda_i) v|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmuWitness {
    pub lambda: Vec<f64>,
    pub vector: Vec<C64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `|<h_i v, v> - lambda_i|`
    pub expectation_gap: Vec<f64>,
    /// Smallest eigenvalue of the residual operator.
    pub min_eigenvalue: f64,
}

fn check_lambda(t: &OperatorTuple, lambda: &[f64]) -> Result<()> {
    if lambda.len() != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), actual: lambda.len() });
    }
    if lambda.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("lambda must be finite"));
    }
    Ok(())
}

/// `Q(lambda) = sum_i (h_i - lambda_i)^2`.
pub fn residual_operator(t: &OperatorTuple, lambda: &[f64]) -> Result<HermitianMatrix> {
    check_lambda(t, lambda)?;
    let mut acc = t.ops()[0].shift(lambda[0]).square().into_complex();
    for (h, &l) in t.ops().iter().zip(lambda).skip(1) {
        acc = &acc + h.shift(l).square().as_complex();
    }
    Ok(HermitianMatrix::symmetrize(acc))
}

/// Residuals of a given unit vector at `lambda`.
pub fn witness_for_vector(t: &OperatorTuple, lambda: &[f64], v: Vec<C64>) -> Result<AmuWitness> {
    check_lambda(t, lambda)?;
    if v.len() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), actual: v.len() });
    }
    require_unit(&v, 1e-10)?;
    let mut residuals = Vec::with_capacity(t.n());
    let mut gaps = Vec::with_capacity(t.n());
    for (h, &l) in t.ops().iter().zip(lambda) {
        let hv = h.as_complex().mul_vec(&v)?;
        let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * l).norm_sqr()).sum::<f64>().sqrt();
        let e: f64 = v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum();
        residuals.push(r);
        gaps.push((e - l).abs());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let min_eigenvalue = residuals.iter().map(|r| r * r).sum();
    Ok(AmuWitness { lambda: lambda.to_vec(), vector: v, residuals, max_residual, expectation_gap: gaps, min_eigenvalue })
}

/// The unit vector minimizing `sum_i |(h_i - lambda_i) v|^2`: a bottom
/// eigenvector of `Q(lambda)`.
pub fn find_amu_state(t: &OperatorTuple, lambda: &[f64]) -> Result<AmuWitness> {
    let q = residual_operator(t, lambda)?;
    let (mu, v) = smallest_eigpair(&q)?;
    let mut w = witness_for_vector(t, lambda, v)?;
    w.min_eigenvalue = mu;
    Ok(w)
}

/// Whether `|(h_j - <h_j v, v>) v| < sigma` for every `j`.
pub fn is_amu_member(t: &OperatorTuple, v: &[C64], sigma: f64) -> Result<bool> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {sigma}")));
    }
    if v.len() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), actual: v.len() });
    }
    require_unit(v, 1e-10)?;
    let centers = t.ops().iter().map(|h| h.expectation(v)).collect::<Result<Vec<_>>>()?;
    let w = witness_for_vector(t, &centers, v.to_vec())?;
    Ok(w.max_residual < sigma)
}

/// Witnesses at every accepted center of a synthetic spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmuScan {
    pub epsilon: f64,
    pub witnesses: Vec<AmuWitness>,
    /// Positions in `witnesses` whose `max_residual >= epsilon`.
    pub failures: Vec<usize>,
    pub worst_residual: f64,
}

impl AmuScan {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One row per center: coordinates, residuals, max residual and verdict.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.witnesses.first().map_or(0, |x| x.lambda.len());
        let mut header: Vec<String> = (1..=n).map(|i| format!("lambda{i}")).collect();
        header.extend((1..=n).map(|i| format!("residual{i}")));
        header.extend(["max_residual".to_string(), "pass".to_string()]);
        w.write_record(&header)?;
        for x in &self.witnesses {
            let mut row: Vec<String> = x.lambda.iter().map(f64::to_string).collect();
            row.extend(x.residuals.iter().map(f64::to_string));
            row.push(x.max_residual.to_string());
            row.push((x.max_residual < self.epsilon).to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `find_amu_state` at every accepted center, flagging those with
/// `max_residual >= epsilon`.
pub fn scan_amu(t: &OperatorTuple, s: &SyntheticSpectrum, epsilon: f64) -> Result<AmuScan> {
    if s.grid.n != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), actual: s.grid.n });
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be finite and nonnegative, got {epsilon}")));
    }
    let witnesses = s
        .accepted
        .par_iter()
        .map(|c| find_amu_state(t, &c.center))
        .collect::<Result<Vec<_>>>()?;
    let failures = witnesses.iter().enumerate().filter(|(_, w)| w.max_residual >= epsilon).map(|(i, _)| i).collect();
    let worst_residual = witnesses.iter().map(|w| w.max_residual).fold(0.0, f64::max);
    Ok(AmuScan { epsilon, witnesses, failures, worst_residual })
}

/// `sqrt(max(mu, 0)) + eig_tol`: the bound on `max_residual` implied by the
/// bottom eigenvalue `mu` of `Q(lambda)`.
pub fn residual_bound(min_eigenvalue: f64) -> f64 {
    min_eigenvalue.max(0.0).sqrt() + tolerances().eig_tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{angular_momentum_block, commuting_diagonal_model, hermite_position_momentum};
    use crate::spectrum::euclidean_synthetic_spectrum;

    #[test]
    fn scalar_residual_operator() {
        let t = commuting_diagonal_model(&[vec![2.5]], 1).unwrap();
        let q = residual_operator(&t, &[1.0]).unwrap();
        assert!((q.get(0, 0).re - 2.25).abs() < 1e-15);
    }

    #[test]
    fn joint_eigenvalue_gives_zero_residual() {
        let pts = vec![vec![0.1, 0.2], vec![-0.5, 0.7], vec![0.9, -0.3]];
        let t = commuting_diagonal_model(&pts, 7).unwrap();
        let w = find_amu_state(&t, &pts[1]).unwrap();
        assert!(w.max_residual <= 1e-8);
        for (g, r) in w.expectation_gap.iter().zip(&w.residuals) {
            assert!(*g <= r + 1e-12);
        }
    }

    #[test]
    fn spin_half_up_state() {
        let t = angular_momentum_block(0.5, 1.0).unwrap();
        let w = find_amu_state(&t, &[0.0, 0.0, 0.5]).unwrap();
        assert!((w.residuals[0] - 0.5).abs() < 1e-12);
        assert!((w.residuals[1] - 0.5).abs() < 1e-12);
        assert!(w.residuals[2].abs() < 1e-12);
        assert!((w.vector[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_ground_state_bound() {
        let t = hermite_position_momentum(32, 0.01).unwrap();
        let q = residual_operator(&t, &[0.0, 0.0]).unwrap();
        let (mu, _) = smallest_eigpair(&q).unwrap();
        assert!((mu - 0.01).abs() < 1e-12);
        let w = find_amu_state(&t, &[0.0, 0.0]).unwrap();
        assert!(w.max_residual <= residual_bound(w.min_eigenvalue));
    }

    #[test]
    fn membership() {
        let t = commuting_diagonal_model(&[vec![0.0], vec![2.0]], 2).unwrap();
        let e0 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(is_amu_member(&t, &e0, 1e-9).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let spread = vec![C64::new(h, 0.0), C64::new(h, 0.0)];
        assert!(!is_amu_member(&t, &spread, 0.1).unwrap());
        assert!(is_amu_member(&t, &[C64::new(2.0, 0.0), C64::new(0.0, 0.0)], 0.1).is_err());
    }

    #[test]
    fn scan_over_commuting_fixture() {
        let t = commuting_diagonal_model(&[vec![0.3, -0.2], vec![-0.6, 0.5]], 4).unwrap();
        let eta = 0.2;
        let s = euclidean_synthetic_spectrum(&t, 1.5, eta).unwrap();
        let scan = scan_amu(&t, &s, 0.3).unwrap();
        assert_eq!(scan.witnesses.len(), s.len());
        // theta >= 1 - eta in one coordinate allows distance eta (3 + eta) / 4
        for w in &scan.witnesses {
            assert!(w.max_residual <= eta * (3.0 + eta) / 4.0 + 1e-8);
        }
        let all_fail = scan_amu(&t, &s, 0.0).unwrap();
        assert_eq!(all_fail.failures.len(), s.len());
    }
}
