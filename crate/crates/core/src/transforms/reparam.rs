use serde::Serialize;

use crate::numkernel::{hermitian_eig, operator_norm, tolerances, ComplexMatrix, HermitianMatrix, ScalarFn};
use crate::tuples::{matrix_commutator, OperatorTuple};
use crate::{Error, Result};

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::invalid(format!("reparametrization parameter must lie in (0, 1], got {s}")));
    }
    Ok(())
}

/// `x / (1 + s x^2)`.
pub fn reparam_scalar(s: f64, x: f64) -> f64 {
    x / (1.0 + s * x * x)
}

/// `H_i = h_i (1 + s h_i^2)^{-1}`, each through the spectral calculus of `h_i` alone.
pub fn resolvent_reparam(t: &OperatorTuple, s: f64) -> Result<OperatorTuple> {
    Ok(reparam_parts(t, s)?.0)
}

/// `H_i` together with the resolvents `(1 + s h_i^2)^{-1}`.
pub(crate) fn reparam_parts(t: &OperatorTuple, s: f64) -> Result<(OperatorTuple, Vec<HermitianMatrix>)> {
    check_s(s)?;
    let mut ops = Vec::with_capacity(t.n());
    let mut resolvents = Vec::with_capacity(t.n());
    for h in t.ops() {
        let e = hermitian_eig(h)?;
        let g: Vec<f64> = e.values.iter().map(|&x| reparam_scalar(s, x)).collect();
        let r: Vec<f64> = e.values.iter().map(|&x| 1.0 / (1.0 + s * x * x)).collect();
        ops.push(e.reconstruct(&g));
        resolvents.push(e.reconstruct(&r));
    }
    let label = format!("{} reparametrized at s={s}", t.label());
    Ok((OperatorTuple::new(label, ops, t.interior_dim())?, resolvents))
}

/// Commutators after reparametrization, maxima over index pairs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReparamReport {
    pub s: f64,
    /// `max |[H_i, H_j]|`
    pub reparam_commutator: f64,
    /// `max |[H_i, (1 + s h_j^2)^{-1}]|`
    pub resolvent_commutator: f64,
    /// `max |H_i|`, at most `1 / (2 sqrt(s))`
    pub max_norm: f64,
}

impl ReparamReport {
    /// Smallest margin against `4 delta`, `4 delta sqrt(s)` and `1/(2 sqrt(s))`.
    pub fn worst_margin(&self, delta: f64) -> f64 {
        let root = self.s.sqrt();
        (4.0 * delta - self.reparam_commutator)
            .min(4.0 * delta * root - self.resolvent_commutator)
            .min(0.5 / root * (1.0 + tolerances().eig_tol) - self.max_norm)
    }
}

pub fn reparam_report(t: &OperatorTuple, s: f64) -> Result<ReparamReport> {
    let (big_h, res) = reparam_parts(t, s)?;
    let mut rep = ReparamReport { s, reparam_commutator: 0.0, resolvent_commutator: 0.0, max_norm: big_h.max_norm() };
    let n = t.n();
    for i in 0..n {
        let hi = big_h.ops()[i].as_complex();
        for j in 0..n {
            if i == j {
                continue;
            }
            if i < j {
                let c = matrix_commutator(hi, big_h.ops()[j].as_complex());
                rep.reparam_commutator = rep.reparam_commutator.max(operator_norm(&c));
            }
            let c = matrix_commutator(hi, res[j].as_complex());
            rep.resolvent_commutator = rep.resolvent_commutator.max(operator_norm(&c));
        }
    }
    Ok(rep)
}

/// Left inverse of `g(x) = x / (1 + s x^2)` on `[g(-M-1), g(M+1)]`, extended by
/// constants outside that interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMap {
    m: f64,
    s: f64,
    top: f64,
}

/// Builds the map `phi` for support bound `M` and ramp parameter `s`.
///
/// Requires `0 < s < 1/(M+2)^2`, so that `g` increases on `[-M-1, M+1]`.
pub fn build_phi(m: f64, s: f64) -> Result<PhiMap> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid(format!("support bound must be positive, got {m}")));
    }
    let limit = 1.0 / ((m + 2.0) * (m + 2.0));
    if !(s > 0.0 && s < limit) {
        return Err(Error::invalid(format!("ramp {s} must lie in (0, {limit}) for M = {m}")));
    }
    Ok(PhiMap { m, s, top: reparam_scalar(s, m + 1.0) })
}

impl PhiMap {
    pub fn support_bound(&self) -> f64 {
        self.m
    }

    pub fn ramp(&self) -> f64 {
        self.s
    }

    pub fn eval(&self, y: f64) -> f64 {
        let y = y.clamp(-self.top, self.top);
        2.0 * y / (1.0 + (1.0 - 4.0 * self.s * y * y).max(0.0).sqrt())
    }

    pub fn as_scalar_fn(&self) -> ScalarFn {
        let phi = *self;
        ScalarFn::total(move |y| phi.eval(y))
    }

    /// Radius within which `f(phi(g(x))) = f(x)` for every `f` supported in
    /// `[-M, M]`. Beyond `1/(s M)` the decreasing branch of `g` falls back
    /// below `g(M)` and `phi` maps such points inside the support.
    pub fn faithful_radius(&self) -> f64 {
        1.0 / (self.s * self.m)
    }
}

/// `lambda_min((b_1 ... b_n)^{1/n} - a)`; nonnegative when the order
/// inequality holds.
pub fn product_inequality_margin(a: &HermitianMatrix, bs: &[HermitianMatrix]) -> Result<f64> {
    let first = bs.first().ok_or_else(|| Error::invalid("need at least one upper bound"))?;
    let mut prod: ComplexMatrix = first.as_complex().clone();
    for b in &bs[1..] {
        if b.dim() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
        }
        prod = &prod * b.as_complex();
    }
    let prod = HermitianMatrix::new(prod)?;
    let e = hermitian_eig(&prod)?;
    let floor = -tolerances().eig_tol * e.max().abs().max(1.0);
    let k = bs.len() as f64;
    let roots = e
        .values
        .iter()
        .map(|&x| if x < floor { Err(Error::Domain { eigenvalue: x }) } else { Ok(x.max(0.0).powf(1.0 / k)) })
        .collect::<Result<Vec<_>>>()?;
    let root = e.reconstruct(&roots);
    let diff = HermitianMatrix::real_combination(&[(1.0, &root), (-1.0, a)])?;
    Ok(hermitian_eig(&diff)?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::apply_scalar_function;

    #[test]
    fn scalar_reparam() {
        let t = OperatorTuple::new("s", vec![HermitianMatrix::from_real_diagonal(&[2.0]).unwrap()], None).unwrap();
        let h = resolvent_reparam(&t, 1.0).unwrap();
        assert!((h.ops()[0].get(0, 0).re - 0.4).abs() < 1e-15);
        assert!(resolvent_reparam(&t, 0.0).is_err());
        assert!(resolvent_reparam(&t, 1.5).is_err());
    }

    #[test]
    fn phi_inverts_g() {
        let (m, s) = (1.0, 0.1);
        let phi = build_phi(m, s).unwrap();
        for k in 0..=1000 {
            let x = -(m + 1.0) + 2.0 * (m + 1.0) * k as f64 / 1000.0;
            assert!((phi.eval(reparam_scalar(s, x)) - x).abs() < 1e-12);
        }
        assert_eq!(phi.eval(10.0), phi.eval(phi.top));
        assert!((phi.eval(10.0) - (m + 1.0)).abs() < 1e-12);
        assert!(build_phi(1.0, 1.0 / 9.0).is_err());
    }

    #[test]
    fn hat_function_transfer_is_exact_on_diagonal() {
        let (m, s) = (1.0, 0.1);
        let phi = build_phi(m, s).unwrap();
        let hat = ScalarFn::total(|x| (1.0 - x.abs()).max(0.0));
        let h = HermitianMatrix::from_real_diagonal(&[0.0, 0.5, 5.0]).unwrap();
        assert!(5.0 <= phi.faithful_radius());
        let t = OperatorTuple::new("d", vec![h.clone()], None).unwrap();
        let big = resolvent_reparam(&t, s).unwrap();
        let lhs = apply_scalar_function(&big.ops()[0], &hat.compose(&phi.as_scalar_fn())).unwrap();
        let rhs = apply_scalar_function(&h, &hat).unwrap();
        assert!(operator_norm(&(lhs.as_complex() - rhs.as_complex())) < 1e-12);
    }

    #[test]
    fn beyond_faithful_radius_the_transfer_breaks() {
        let (m, s) = (1.0, 0.1);
        let phi = build_phi(m, s).unwrap();
        let x = 20.0;
        assert!(x > phi.faithful_radius());
        let back = phi.eval(reparam_scalar(s, x));
        assert!(back.abs() < m);
    }

    #[test]
    fn product_inequality_diagonal() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let b1 = HermitianMatrix::from_real_diagonal(&[1.0, 8.0]).unwrap();
        let b2 = HermitianMatrix::from_real_diagonal(&[4.0, 2.0]).unwrap();
        let margin = product_inequality_margin(&a, &[b1, b2]).unwrap();
        assert!((margin - 1.0).abs() < 1e-12);
    }
}
