use nalgebra::DMatrix;

use crate::numkernel::{apply_scalar_function, dmatrix_norm, hermitian_eig, operator_norm, Eigen, HermitianMatrix, ScalarFn, C64};
use crate::{Error, Result};

/// Plateau bump: 1 within `3 eta / 4` of `center`, 0 beyond `eta`, linear between.
pub fn theta_value(center: f64, eta: f64, t: f64) -> f64 {
    let r = (t - center).abs();
    if r <= 0.75 * eta {
        1.0
    } else if r >= eta {
        0.0
    } else {
        4.0 * (eta - r) / eta
    }
}

pub fn theta(center: f64, eta: f64) -> Result<ScalarFn> {
    if !(eta > 0.0 && eta.is_finite()) || !center.is_finite() {
        return Err(Error::invalid(format!("theta needs eta > 0 and a finite center, got eta = {eta}")));
    }
    Ok(ScalarFn::total(move |t| theta_value(center, eta, t)))
}

/// Eigendecompositions of an ordered list of Hermitian factors, with the
/// overlaps `V_i* V_{i+1}` between consecutive eigenbases.
///
/// For weights `w_i = theta(lambda_i)` the product
/// `theta(f_1) ... theta(f_n) = V_1 W_1 L_1 W_2 ... W_n V_n*` has the same
/// norm as `W_1 L_1 W_2 ... W_n` restricted to the eigenvalues where each
/// `w_i` is nonzero; evaluation at a grid point is exact and touches only
/// those blocks.
#[derive(Debug, Clone)]
pub struct FactorStack {
    eigs: Vec<Eigen>,
    links: Vec<DMatrix<C64>>,
}

impl FactorStack {
    pub fn new(factors: &[HermitianMatrix]) -> Result<Self> {
        let first = factors.first().ok_or_else(|| Error::invalid("need at least one factor"))?;
        if let Some(bad) = factors.iter().find(|f| f.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), actual: bad.dim() });
        }
        let eigs = factors.iter().map(hermitian_eig).collect::<Result<Vec<_>>>()?;
        let links = eigs
            .windows(2)
            .map(|w| w[0].vectors.as_dmatrix().adjoint() * w[1].vectors.as_dmatrix())
            .collect();
        Ok(Self { eigs, links })
    }

    pub fn len(&self) -> usize {
        self.eigs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigs.is_empty()
    }

    pub fn eigen(&self, i: usize) -> &Eigen {
        &self.eigs[i]
    }

    /// `|theta_{xi_1,eta}(f_1) ... theta_{xi_n,eta}(f_n)|`.
    pub fn norm(&self, xi: &[f64], eta: f64) -> f64 {
        self.norm_above(xi, eta, f64::NEG_INFINITY).unwrap_or(0.0)
    }

    /// The product norm when it can reach `threshold`; `None` once the bound
    /// `prod_i max w_i` already rules it out.
    pub fn norm_above(&self, xi: &[f64], eta: f64, threshold: f64) -> Option<f64> {
        assert_eq!(xi.len(), self.len(), "point dimension must match the number of factors");
        let mut selections = Vec::with_capacity(self.len());
        let mut bound = 1.0_f64;
        for (e, &c) in self.eigs.iter().zip(xi) {
            let sel: Vec<(usize, f64)> = e
                .values
                .iter()
                .enumerate()
                .filter_map(|(k, &l)| {
                    let w = theta_value(c, eta, l);
                    (w > 0.0).then_some((k, w))
                })
                .collect();
            let top = sel.iter().map(|p| p.1).fold(0.0, f64::max);
            bound *= top;
            if sel.is_empty() || bound < threshold {
                return if threshold > 0.0 { None } else { Some(0.0) };
            }
            selections.push(sel);
        }
        let first = &selections[0];
        let mut acc = DMatrix::<C64>::from_fn(first.len(), first.len(), |r, c| {
            if r == c { C64::new(first[r].1, 0.0) } else { C64::new(0.0, 0.0) }
        });
        for (i, sel) in selections.iter().enumerate().skip(1) {
            let prev = &selections[i - 1];
            let link = &self.links[i - 1];
            let block = DMatrix::from_fn(prev.len(), sel.len(), |r, c| link[(prev[r].0, sel[c].0)] * sel[c].1);
            acc = acc * block;
        }
        let v = dmatrix_norm(&acc);
        (v >= threshold).then_some(v)
    }
}

/// `|theta_{xi_1,eta}(h_1) ... theta_{xi_n,eta}(h_n)|`, factors in ascending index order.
pub fn theta_product_norm(ops: &[HermitianMatrix], xi: &[f64], eta: f64) -> Result<f64> {
    check_point(ops.len(), xi, eta)?;
    Ok(FactorStack::new(ops)?.norm(xi, eta))
}

/// The same product formed densely from `n` functional-calculus matrices.
pub fn theta_product_norm_dense(ops: &[HermitianMatrix], xi: &[f64], eta: f64) -> Result<f64> {
    check_point(ops.len(), xi, eta)?;
    let mut acc = apply_scalar_function(&ops[0], &theta(xi[0], eta)?)?.into_complex();
    for (h, &c) in ops.iter().zip(xi).skip(1) {
        acc = &acc * apply_scalar_function(h, &theta(c, eta)?)?.as_complex();
    }
    Ok(operator_norm(&acc))
}

pub(crate) fn check_point(n: usize, xi: &[f64], eta: f64) -> Result<()> {
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: xi.len() });
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid(format!("eta must be positive, got {eta}")));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("point coordinates must be finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::{random_almost_commuting, random_tuple};

    #[test]
    fn bump_values() {
        let eta = 0.4;
        assert_eq!(theta_value(0.0, eta, 0.0), 1.0);
        assert!((theta_value(0.0, eta, 7.0 * eta / 8.0) - 0.5).abs() < 1e-15);
        assert_eq!(theta_value(0.0, eta, eta), 0.0);
        assert_eq!(theta_value(0.0, eta, -0.75 * eta), 1.0);
        assert!(theta(0.0, 0.0).is_err());
    }

    #[test]
    fn compressed_matches_dense() {
        for seed in 0..6 {
            let t = random_almost_commuting(3, 24, 0.05, seed).unwrap();
            let stack = FactorStack::new(t.ops()).unwrap();
            for (k, xi) in [[0.1, -0.2, 0.3], [0.0, 0.0, 0.0], [0.5, 0.5, -0.5], [-0.3, 0.8, 0.1]].iter().enumerate() {
                let eta = 0.3 + 0.1 * k as f64;
                let fast = stack.norm(xi, eta);
                let dense = theta_product_norm_dense(t.ops(), xi, eta).unwrap();
                assert!((fast - dense).abs() < 1e-10, "seed {seed}: {fast} vs {dense}");
            }
        }
        let t = random_tuple(2, 16, 1.0, 3).unwrap();
        let fast = theta_product_norm(t.ops(), &[0.2, -0.1], 0.5).unwrap();
        let dense = theta_product_norm_dense(t.ops(), &[0.2, -0.1], 0.5).unwrap();
        assert!((fast - dense).abs() < 1e-10);
    }

    #[test]
    fn commuting_extremes() {
        let h1 = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let h2 = HermitianMatrix::from_real_diagonal(&[0.5, -1.0]).unwrap();
        let ops = [h1, h2];
        assert_eq!(theta_product_norm(&ops, &[1.0, -1.0], 0.2).unwrap(), 1.0);
        assert_eq!(theta_product_norm(&ops, &[1.0, 0.5], 0.2).unwrap(), 0.0);
        assert!(theta_product_norm(&ops, &[1.0], 0.2).is_err());
    }
}
