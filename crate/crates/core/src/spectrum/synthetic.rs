use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{make_grid, GridSpec};
use super::theta::{check_point, theta_value, FactorStack};
use crate::numkernel::{hermitian_eig, require_unit, vec_norm, HermitianMatrix, C64};
use crate::transforms::{bar_from, stereographic_forward, stereographic_inverse, DCalculus, SpherePoint};
use crate::tuples::OperatorTuple;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Euclidean,
    Spherical,
}

/// One accepted grid point.
///
/// `center` is the Euclidean center; for the spherical variant it is the
/// stereographic pull-back of `sphere_center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptedCenter {
    pub index: usize,
    pub center: Vec<f64>,
    pub norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_center: Option<Vec<f64>>,
}

/// Union of closed `eta`-balls about the accepted centers. For the spherical
/// variant the balls live on the sphere, in the ambient metric of `R^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct SyntheticSpectrum {
    pub variant: Variant,
    pub grid: GridSpec,
    pub accepted: Vec<AcceptedCenter>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumRepr {
    variant: Variant,
    n: usize,
    #[serde(rename = "M")]
    m: f64,
    eta: f64,
    radius: f64,
    grid_points: usize,
    accepted: Vec<AcceptedCenter>,
}

impl From<SyntheticSpectrum> for SpectrumRepr {
    fn from(s: SyntheticSpectrum) -> Self {
        SpectrumRepr {
            variant: s.variant,
            n: s.grid.n,
            m: s.grid.m,
            eta: s.grid.eta,
            radius: s.grid.eta,
            grid_points: s.grid.len(),
            accepted: s.accepted,
        }
    }
}

impl TryFrom<SpectrumRepr> for SyntheticSpectrum {
    type Error = Error;

    fn try_from(r: SpectrumRepr) -> Result<Self> {
        let grid = make_grid(r.n, r.m, r.eta)?;
        if grid.len() != r.grid_points || r.radius != r.eta {
            return Err(Error::Load("spectrum file does not match its grid parameters".into()));
        }
        for c in &r.accepted {
            let ok = grid.points.get(c.index).is_some_and(|p| {
                p.len() == c.center.len() && p.iter().zip(&c.center).all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a.abs()))
            });
            if !ok || !(c.norm >= 1.0 - r.eta) {
                return Err(Error::Load(format!("accepted center {} is inconsistent with the grid", c.index)));
            }
        }
        Ok(SyntheticSpectrum { variant: r.variant, grid, accepted: r.accepted })
    }
}

impl SyntheticSpectrum {
    pub fn eta(&self) -> f64 {
        self.grid.eta
    }

    pub fn m(&self) -> f64 {
        self.grid.m
    }

    pub fn radius(&self) -> f64 {
        self.grid.eta
    }

    pub fn is_empty(&self) -> bool {
        self.accepted.is_empty()
    }

    pub fn len(&self) -> usize {
        self.accepted.len()
    }

    pub fn centers(&self) -> impl Iterator<Item = &[f64]> {
        self.accepted.iter().map(|c| c.center.as_slice())
    }

    /// Writes one row per accepted center.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.grid.n;
        let mut header = vec!["index".to_string(), "norm".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        if self.variant == Variant::Spherical {
            header.push("r".into());
            header.extend((1..=n).map(|i| format!("s{i}")));
        }
        w.write_record(&header)?;
        for c in &self.accepted {
            let mut row = vec![c.index.to_string(), c.norm.to_string()];
            row.extend(c.center.iter().map(f64::to_string));
            if let Some(s) = &c.sphere_center {
                row.extend(s.iter().map(f64::to_string));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_params(t: &OperatorTuple, m: f64, eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::invalid(format!("M must exceed 1, got {m}")));
    }
    if t.n() == 0 {
        return Err(Error::invalid("empty tuple"));
    }
    Ok(())
}

/// Euclidean synthetic spectrum: grid points `xi` with
/// `|theta_{xi_1}(h_1) ... theta_{xi_n}(h_n)| >= 1 - eta`.
pub fn euclidean_synthetic_spectrum(t: &OperatorTuple, m: f64, eta: f64) -> Result<SyntheticSpectrum> {
    check_params(t, m, eta)?;
    euclidean_on_grid(t, make_grid(t.n(), m, eta)?)
}

/// Euclidean synthetic spectrum on a caller-supplied grid (its `eta` is used).
pub fn euclidean_on_grid(t: &OperatorTuple, grid: GridSpec) -> Result<SyntheticSpectrum> {
    if grid.n != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), actual: grid.n });
    }
    let stack = FactorStack::new(t.ops())?;
    let eta = grid.eta;
    let accepted = scan(&grid.points, |xi| stack.norm_above(xi, eta, 1.0 - eta))
        .into_iter()
        .map(|(index, norm)| AcceptedCenter { index, center: grid.points[index].clone(), norm, sphere_center: None })
        .collect();
    Ok(SyntheticSpectrum { variant: Variant::Euclidean, grid, accepted })
}

fn scan(points: &[Vec<f64>], eval: impl Fn(&[f64]) -> Option<f64> + Sync) -> Vec<(usize, f64)> {
    points
        .par_iter()
        .enumerate()
        .filter_map(|(i, p)| eval(p).map(|v| (i, v)))
        .collect()
}

/// The factors `(a, 2 h_bar_1, ..., 2 h_bar_n)` of the spherical bump product.
pub fn sphere_factors(t: &OperatorTuple) -> Result<Vec<HermitianMatrix>> {
    let calc = DCalculus::new(t)?;
    let mut factors = vec![calc.function(|x| (x - 1.0) / (x + 1.0))];
    factors.extend(bar_from(&calc, t).into_iter().map(|b| HermitianMatrix::symmetrize(b.into_complex().scale(C64::new(2.0, 0.0)))));
    Ok(factors)
}

/// Spherical synthetic spectrum: centers `Phi(xi)` for `xi` in the grid,
/// tested on `(a, 2 h_bar_1, ..., 2 h_bar_n)` and pulled back.
pub fn spherical_synthetic_spectrum(t: &OperatorTuple, m: f64, eta: f64) -> Result<SyntheticSpectrum> {
    check_params(t, m, eta)?;
    spherical_on_grid(t, make_grid(t.n(), m, eta)?)
}

pub fn spherical_on_grid(t: &OperatorTuple, grid: GridSpec) -> Result<SyntheticSpectrum> {
    if grid.n != t.n() {
        return Err(Error::DimensionMismatch { expected: t.n(), actual: grid.n });
    }
    let stack = FactorStack::new(&sphere_factors(t)?)?;
    let eta = grid.eta;
    let sphere: Vec<Vec<f64>> = grid
        .points
        .iter()
        .map(|p| stereographic_forward(p).map(|s| s.coords().to_vec()))
        .collect::<Result<_>>()?;
    let mut accepted = Vec::new();
    for (index, norm) in scan(&sphere, |zeta| stack.norm_above(zeta, eta, 1.0 - eta)) {
        let s = SpherePoint::new(sphere[index].clone())?;
        let center = stereographic_inverse(&s)?;
        accepted.push(AcceptedCenter { index, center, norm, sphere_center: Some(sphere[index].clone()) });
    }
    Ok(SyntheticSpectrum { variant: Variant::Spherical, grid, accepted })
}

/// Outcome of the single-vector test `Re <Theta x, x> > 1 - eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessOutcome {
    pub passes: bool,
    pub value: f64,
}

/// `Re <theta_{xi_1}(h_1) ... theta_{xi_n}(h_n) x, x>` against `1 - eta`.
pub fn witness_test(t: &OperatorTuple, xi: &[f64], eta: f64, x: &[C64]) -> Result<WitnessOutcome> {
    check_point(t.n(), xi, eta)?;
    if x.len() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), actual: x.len() });
    }
    require_unit(x, 1e-10)?;
    let mut y = x.to_vec();
    for (h, &c) in t.ops().iter().zip(xi).rev() {
        let e = hermitian_eig(h)?;
        let weights: Vec<f64> = e.values.iter().map(|&l| theta_value(c, eta, l)).collect();
        y = e.reconstruct(&weights).as_complex().mul_vec(&y)?;
    }
    let value: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
    debug_assert!(vec_norm(&y).is_finite());
    Ok(WitnessOutcome { passes: value > 1.0 - eta, value })
}

/// Spread of the bump-product norm over factor orderings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSensitivity {
    pub ascending: f64,
    pub min: f64,
    pub max: f64,
    pub orders_tried: usize,
}

/// Evaluates the product norm under every ordering for `n <= 4`, and under
/// cyclic shifts and their reversals beyond that.
pub fn order_sensitivity(t: &OperatorTuple, xi: &[f64], eta: f64) -> Result<OrderSensitivity> {
    check_point(t.n(), xi, eta)?;
    let n = t.n();
    let orders = if n <= 4 { permutations(n) } else { cyclic_orders(n) };
    let mut out = OrderSensitivity { ascending: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY, orders_tried: 0 };
    for order in &orders {
        let ops: Vec<HermitianMatrix> = order.iter().map(|&i| t.ops()[i].clone()).collect();
        let pt: Vec<f64> = order.iter().map(|&i| xi[i]).collect();
        let v = FactorStack::new(&ops)?.norm(&pt, eta);
        if order.iter().enumerate().all(|(k, &i)| k == i) {
            out.ascending = v;
        }
        out.min = out.min.min(v);
        out.max = out.max.max(v);
        out.orders_tried += 1;
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn cyclic_orders(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for shift in 0..n {
        let fwd: Vec<usize> = (0..n).map(|k| (k + shift) % n).collect();
        let mut rev = fwd.clone();
        rev.reverse();
        out.push(fwd);
        out.push(rev);
    }
    out
}
