use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{gaussian_matrix, rng};
use crate::models::{bounded_l, hermite_position_momentum};
use crate::numkernel::{apply_scalar_function, operator_norm, tolerances, ComplexMatrix, HermitianMatrix, ScalarFn, C64};
use crate::spectrum::{euclidean_synthetic_spectrum, spherical_synthetic_spectrum, SyntheticSpectrum};
use crate::transforms::{
    commutator_transfer, euclidean_distance, modulus_f, modulus_g, norm_bounds, reparam_report, stereographic_forward,
};
use crate::tuples::{random_almost_commuting, random_tuple, OperatorTuple};
use crate::Result;

/// Outcome of one named check over an ensemble.
///
/// `worst_margin` is the smallest `bound - observed` over all instances;
/// the check passes iff it is positive and no instance failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub worst_margin: f64,
    pub failures: Vec<u64>,
    pub elapsed_ms: u64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.worst_margin > 0.0
    }

    /// Merges several results into one under a new name; diagnostics are
    /// prefixed by the part names.
    pub fn combine(name: &str, parts: Vec<CheckResult>) -> CheckResult {
        let mut out = CheckResult {
            name: name.to_string(),
            instances: 0,
            worst_margin: f64::INFINITY,
            failures: Vec::new(),
            elapsed_ms: 0,
            diagnostics: BTreeMap::new(),
        };
        for p in parts {
            out.instances += p.instances;
            out.worst_margin = out.worst_margin.min(p.worst_margin);
            out.elapsed_ms += p.elapsed_ms;
            for s in p.failures {
                if !out.failures.contains(&s) {
                    out.failures.push(s);
                }
            }
            for (k, v) in p.diagnostics {
                out.diagnostics.insert(format!("{}.{k}", p.name), v);
            }
        }
        out
    }
}

/// Per-instance margins keyed by a reproducing seed.
pub(crate) struct Tally {
    name: String,
    start: Instant,
    instances: usize,
    worst: f64,
    failures: Vec<u64>,
    pub(crate) diagnostics: BTreeMap<String, f64>,
}

impl Tally {
    pub(crate) fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            start: Instant::now(),
            instances: 0,
            worst: f64::INFINITY,
            failures: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    pub(crate) fn record(&mut self, seed: u64, margin: f64) {
        self.instances += 1;
        self.worst = self.worst.min(margin);
        if !(margin > 0.0) && !self.failures.contains(&seed) {
            self.failures.push(seed);
        }
    }

    pub(crate) fn max_diag(&mut self, key: &str, v: f64) {
        let e = self.diagnostics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(v);
    }

    pub(crate) fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            instances: self.instances,
            worst_margin: if self.instances == 0 { f64::NEG_INFINITY } else { self.worst },
            failures: self.failures,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
            diagnostics: self.diagnostics,
        }
    }
}

/// Runs `f` for every seed (in parallel) and returns results in seed order.
pub(crate) fn per_seed<T: Send>(seeds: &[u64], f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<(u64, T)>> {
    seeds.par_iter().map(|&s| f(s).map(|v| (s, v))).collect()
}

pub(crate) fn seed_range(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| base.wrapping_add(k)).collect()
}

/// Shape of the `i`-th member of the standard random ensemble.
pub(crate) fn ensemble_shape(i: usize, dims: &[usize]) -> (usize, usize, f64) {
    const SCALES: [f64; 4] = [0.5, 1.0, 3.0, 10.0];
    (1 + i % 4, dims[i % dims.len()], SCALES[(i / 4) % SCALES.len()])
}

/// Unconditional norm bounds on the bounded-transform ingredients, over a
/// random ensemble, a scalar sweep `t in [-100, 100]` and a tuple with
/// entries of order `1e4`. Margins include the `eig_tol` slack.
pub fn check_linqx(ensemble_size: usize, dims: &[usize], seed: u64) -> Result<CheckResult> {
    let mut tally = Tally::new("norm_bounds");
    let slack = tolerances().eig_tol;
    let m = 1.5;
    let seeds = seed_range(seed, ensemble_size);
    let results = per_seed(&seeds, |s| {
        let (n, dim, scale) = ensemble_shape((s - seed) as usize, dims);
        norm_bounds(&random_tuple(n, dim, scale, s)?, m)
    })?;
    for (s, nb) in results {
        tally.record(s, nb.worst_margin() + slack);
        tally.max_diag("two_bar", nb.two_bar);
        tally.max_diag("h_sqrt_right", nb.h_sqrt_right);
        tally.max_diag("cutoff_h_over_m", nb.cutoff_h / m);
    }
    for k in 0..=400 {
        let t = -100.0 + 0.5 * k as f64;
        let tuple = OperatorTuple::new("scalar", vec![HermitianMatrix::from_real_diagonal(&[t])?], None)?;
        let nb = norm_bounds(&tuple, m)?;
        tally.record(seed, nb.worst_margin() + slack);
    }
    let big = random_tuple(3, 24, 1e4, seed ^ 0x5eed)?;
    let nb = norm_bounds(&big, m)?;
    tally.record(seed ^ 0x5eed, nb.worst_margin() + slack);
    tally.diagnostics.insert("adversarial_margin".into(), nb.worst_margin());
    Ok(tally.finish())
}

/// Commutator transfer to the bounded transform at `delta = 0.9 eta / 6n`.
pub fn check_commutator_transfer(eta: f64, n: usize, dim: usize, seeds: usize, seed: u64) -> Result<CheckResult> {
    check_transfer_at(eta, 0.9 * eta / (6.0 * n as f64), n, dim, seeds, seed)
}

pub(crate) fn check_transfer_at(eta: f64, delta: f64, n: usize, dim: usize, seeds: usize, seed: u64) -> Result<CheckResult> {
    let mut tally = Tally::new(&format!("commutator_transfer(eta={eta},n={n})"));
    let hypothesis = eta / (6.0 * n as f64);
    let results = per_seed(&seed_range(seed, seeds), |s| commutator_transfer(&random_almost_commuting(n, dim, delta, s)?))?;
    for (s, r) in results {
        let margin = r.worst_margin(eta).min(hypothesis - r.max_commutator);
        tally.record(s, margin);
        tally.max_diag("a_b_over_eta", r.a_b / eta);
        tally.max_diag("b_defect_over_eta", r.b_defect / eta);
        tally.max_diag("b_b_over_eta", r.b_b / eta);
        tally.max_diag("tilde_bar_over_eta_third", 3.0 * r.tilde_bar / eta);
    }
    Ok(tally.finish())
}

/// Commutators after the resolvent reparametrization at each `s`.
pub fn check_reparam(delta: f64, s_values: &[f64], n: usize, dim: usize, seeds: usize, seed: u64) -> Result<CheckResult> {
    let mut tally = Tally::new(&format!("resolvent_reparam(delta={delta})"));
    let results = per_seed(&seed_range(seed, seeds), |sd| {
        let t = random_almost_commuting(n, dim, delta, sd)?;
        s_values.iter().map(|&s| reparam_report(&t, s)).collect::<Result<Vec<_>>>()
    })?;
    for (sd, reports) in results {
        for r in reports {
            let margin = if delta == 0.0 {
                let exact = 1e-12 - r.reparam_commutator.max(r.resolvent_commutator);
                exact.min(0.5 / r.s.sqrt() * (1.0 + tolerances().eig_tol) - r.max_norm)
            } else {
                r.worst_margin(delta)
            };
            tally.record(sd, margin);
            if delta > 0.0 {
                tally.max_diag(&format!("commutator_ratio_s={}", r.s), r.reparam_commutator / (4.0 * delta));
                tally.max_diag(&format!("resolvent_ratio_s={}", r.s), r.resolvent_commutator / (4.0 * delta * r.s.sqrt()));
            }
        }
    }
    Ok(tally.finish())
}

/// Hat function with the given center and half-width.
pub fn hat(center: f64, half_width: f64) -> ScalarFn {
    ScalarFn::total(move |x| (1.0 - (x - center).abs() / half_width).max(0.0))
}

fn worst_function_commutator(t: &OperatorTuple, fs: &[ScalarFn]) -> Result<f64> {
    let mut images: Vec<Vec<HermitianMatrix>> = Vec::new();
    for h in t.ops() {
        images.push(fs.iter().map(|f| apply_scalar_function(h, f)).collect::<Result<_>>()?);
    }
    let mut worst = 0.0_f64;
    for i in 0..t.n() {
        for j in 0..t.n() {
            if i == j {
                continue;
            }
            for fi in &images[i] {
                for gj in &images[j] {
                    let c = &(fi.as_complex() * gj.as_complex()) - &(gj.as_complex() * fi.as_complex());
                    worst = worst.max(operator_norm(&c));
                }
            }
        }
    }
    Ok(worst)
}

/// Empirical limit statement: over the sweep (largest `delta` first) the
/// worst `|[f(h_i), g(h_j)]|` is nonincreasing and ends below `1e-2`.
///
/// Margins: `worst(previous) - worst(current) + 1e-12` for each step and
/// `1e-2 - worst(last)`.
pub fn check_functional_transfer(f_set: &[ScalarFn], delta_sweep: &[f64], n: usize, dim: usize, seeds: usize, seed: u64) -> Result<CheckResult> {
    let mut tally = Tally::new("functional_transfer");
    let seed_list = seed_range(seed, seeds);
    let mut worst_by_delta = Vec::with_capacity(delta_sweep.len());
    for &delta in delta_sweep {
        let per = per_seed(&seed_list, |s| worst_function_commutator(&random_almost_commuting(n, dim, delta, s)?, f_set))?;
        let worst = per.iter().map(|p| p.1).fold(0.0, f64::max);
        tally.diagnostics.insert(format!("worst_at_delta={delta:e}"), worst);
        worst_by_delta.push((delta, worst, per));
    }
    for w in worst_by_delta.windows(2) {
        tally.record(seed, w[0].1 - w[1].1 + 1e-12);
    }
    if let Some(last) = worst_by_delta.last() {
        for (s, v) in &last.2 {
            tally.record(*s, 1e-2 - v);
        }
    }
    for (k, hbar) in [0.1, 0.03, 0.01].into_iter().enumerate() {
        let t = hermite_position_momentum(64, hbar)?;
        let v = worst_function_commutator(&t, f_set)?;
        tally.diagnostics.insert(format!("hermite_{k}_hbar={hbar}"), v);
    }
    Ok(tally.finish())
}

/// `|L(T) - L(T + E)| < 2 delta` for `|E| < delta`, `L(T) = (1 + T T*)^{-1/2} T`.
pub fn check_transform_lipschitz(delta: f64, dim: usize, seeds: usize, seed: u64) -> Result<CheckResult> {
    let mut tally = Tally::new(&format!("transform_lipschitz(delta={delta})"));
    let results = per_seed(&seed_range(seed, seeds), |s| {
        let mut r = rng(s);
        let scale = [0.3, 1.0, 5.0][(s % 3) as usize];
        let t = gaussian_matrix(dim, dim, &mut r).scale(C64::new(scale, 0.0));
        let e = gaussian_matrix(dim, dim, &mut r);
        let size: f64 = r.random_range(0.1..0.99);
        let e = e.scale(C64::new(size * delta / operator_norm(&e), 0.0));
        let diff = operator_norm(&(&bounded_l(&t)? - &bounded_l(&(&t + &e))?));
        Ok(diff)
    })?;
    for (s, diff) in results {
        tally.record(s, 2.0 * delta - diff);
        tally.max_diag("worst_ratio", diff / delta);
    }
    let z = ComplexMatrix::zeros(dim, dim);
    let same = operator_norm(&(&bounded_l(&z)? - &bounded_l(&z)?));
    tally.diagnostics.insert("zero_perturbation_difference".into(), same);
    Ok(tally.finish())
}

/// `sigma = max(eta, F_M(eta) + sigma_1)` with `sigma_1 = min(eta/4, F_M(eta)/4)`.
pub fn inclusion_sigma(m: f64, eta: f64) -> Result<f64> {
    let f = modulus_f(m, eta)?;
    Ok(eta.max(f + (eta / 4.0).min(f / 4.0)))
}

/// `gamma = max(delta, G_M(delta) + delta_1)` with `delta_1 = min(delta/4, G_M(delta)/4)`.
pub fn inclusion_gamma(m: f64, delta: f64) -> Result<f64> {
    let g = modulus_g(m, delta)?;
    Ok(delta.max(g + (delta / 4.0).min(g / 4.0)))
}

/// Margins of the two center-by-center inclusions for one tuple:
/// spherical(eta) inside euclidean(sigma), euclidean(delta) inside spherical(gamma).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionOutcome {
    pub sigma: f64,
    pub gamma: f64,
    pub spherical_eta: usize,
    pub euclidean_sigma: usize,
    pub euclidean_delta: usize,
    pub spherical_gamma: usize,
    /// `sigma - max_c min_e |c - e|`, infinite when the left side is empty.
    pub first_margin: f64,
    /// `gamma - max_e min_c |Phi(e) - c|` in the ambient metric.
    pub second_margin: f64,
}

pub fn inclusion_margins(t: &OperatorTuple, m: f64, eta: f64, delta: f64) -> Result<InclusionOutcome> {
    let sigma = inclusion_sigma(m, eta)?;
    let gamma = inclusion_gamma(m, delta)?;
    if sigma >= 1.0 || gamma >= 1.0 {
        return Err(crate::Error::invalid(format!(
            "inclusion radii must stay below 1 (sigma = {sigma}, gamma = {gamma}); decrease eta or delta"
        )));
    }
    let s_eta = spherical_synthetic_spectrum(t, m, eta)?;
    let e_sigma = euclidean_synthetic_spectrum(t, m, sigma)?;
    let e_delta = euclidean_synthetic_spectrum(t, m, delta)?;
    let s_gamma = spherical_synthetic_spectrum(t, m, gamma)?;
    let first = worst_cover(s_eta.centers().map(<[f64]>::to_vec), &e_sigma.centers().map(<[f64]>::to_vec).collect::<Vec<_>>());
    let sphere_targets: Vec<Vec<f64>> = s_gamma.accepted.iter().filter_map(|c| c.sphere_center.clone()).collect();
    let pushed = e_delta.centers().map(|c| stereographic_forward(c).map(|p| p.coords().to_vec())).collect::<Result<Vec<_>>>()?;
    let second = worst_cover(pushed.into_iter(), &sphere_targets);
    Ok(InclusionOutcome {
        sigma,
        gamma,
        spherical_eta: s_eta.len(),
        euclidean_sigma: e_sigma.len(),
        euclidean_delta: e_delta.len(),
        spherical_gamma: s_gamma.len(),
        first_margin: sigma - first,
        second_margin: gamma - second,
    })
}

/// `max_c min_t |c - t|`; zero when there is nothing to cover.
fn worst_cover(points: impl Iterator<Item = Vec<f64>>, targets: &[Vec<f64>]) -> f64 {
    points
        .map(|p| targets.iter().map(|t| euclidean_distance(&p, t)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Both inclusions for every tuple in the set.
pub fn check_spectrum_inclusions(tuples: &[OperatorTuple], m: f64, eta: f64, delta: f64) -> Result<CheckResult> {
    let mut tally = Tally::new(&format!("spectrum_inclusions(M={m},eta={eta},delta={delta})"));
    tally.diagnostics.insert("sigma".into(), inclusion_sigma(m, eta)?);
    tally.diagnostics.insert("gamma".into(), inclusion_gamma(m, delta)?);
    for (k, t) in tuples.iter().enumerate() {
        let o = inclusion_margins(t, m, eta, delta)?;
        tally.record(k as u64, o.first_margin.min(o.second_margin));
        tally.diagnostics.insert(format!("tuple{k}.first_margin"), o.first_margin);
        tally.diagnostics.insert(format!("tuple{k}.second_margin"), o.second_margin);
        tally.diagnostics.insert(format!("tuple{k}.spherical_eta_centers"), o.spherical_eta as f64);
        tally.diagnostics.insert(format!("tuple{k}.euclidean_delta_centers"), o.euclidean_delta as f64);
    }
    Ok(tally.finish())
}

/// Nearest accepted center to `x`, or infinity for an empty spectrum.
pub fn distance_to_spectrum(s: &SyntheticSpectrum, x: &[f64]) -> f64 {
    s.centers().map(|c| euclidean_distance(c, x)).fold(f64::INFINITY, f64::min)
}
