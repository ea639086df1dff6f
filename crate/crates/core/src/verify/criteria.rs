use rand::Rng;

use super::checks::{
    check_commutator_transfer, check_linqx, check_reparam, check_spectrum_inclusions, check_transform_lipschitz, ensemble_shape,
    per_seed, seed_range, CheckResult, Tally,
};
use crate::amu::scan_amu;
use crate::ensemble::rng;
use crate::models::{angular_momentum_block, commuting_diagonal_model, fredholm_index, hermite_position_momentum, t_hbar_operator};
use crate::numkernel::{hermitian_eig, operator_norm, ComplexMatrix, C64};
use crate::spectrum::{euclidean_synthetic_spectrum, make_grid, spherical_synthetic_spectrum, theta_value};
use crate::transforms::{bounded_transform, norm_bounds, tilde_transform};
use crate::tuples::{commutator, commutator_report, commutator_report_interior, random_almost_commuting, random_tuple, sum_of_squares, OperatorTuple};
use crate::Result;

/// Inputs shared by every criterion.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub seed: u64,
    /// Extra tuples appended to the random ensembles of criteria 1 and 2.
    pub extra_tuples: Vec<OperatorTuple>,
}

/// One acceptance criterion.
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: fn(&Context) -> Result<CheckResult>,
}

pub const CRITERIA: [Criterion; 13] = [
    Criterion { id: 1, name: "bounded_transform_identity", run: criterion_1 },
    Criterion { id: 2, name: "norm_bounds", run: criterion_2 },
    Criterion { id: 3, name: "commutator_transfer", run: criterion_3 },
    Criterion { id: 4, name: "resolvent_reparam", run: criterion_4 },
    Criterion { id: 5, name: "transform_lipschitz", run: criterion_5 },
    Criterion { id: 6, name: "oscillator_spectrum", run: criterion_6 },
    Criterion { id: 7, name: "interior_commutator", run: criterion_7 },
    Criterion { id: 8, name: "fredholm_index", run: criterion_8 },
    Criterion { id: 9, name: "synthetic_spectrum_oracle", run: criterion_9 },
    Criterion { id: 10, name: "hermite_amu_witnesses", run: criterion_10 },
    Criterion { id: 11, name: "spin_block_witnesses", run: criterion_11 },
    Criterion { id: 12, name: "spectrum_inclusions", run: criterion_12 },
    Criterion { id: 13, name: "amu_residual_trend", run: criterion_13 },
];

const ENSEMBLE_DIMS: [usize; 5] = [8, 16, 32, 64, 128];

fn ensemble(ctx: &Context, size: usize) -> Result<Vec<(u64, OperatorTuple)>> {
    per_seed(&seed_range(ctx.seed, size), |s| {
        let (n, dim, scale) = ensemble_shape((s - ctx.seed) as usize, &ENSEMBLE_DIMS);
        random_tuple(n, dim, scale, s)
    })
}

/// `|sum b_j* b_j + a^2 - I| <= 1e-10` on 100 random tuples plus the extra tuples.
pub fn criterion_1(ctx: &Context) -> Result<CheckResult> {
    let mut tally = Tally::new("bounded_transform_identity");
    let mut members = ensemble(ctx, 100)?;
    members.extend(ctx.extra_tuples.iter().cloned().enumerate().map(|(k, t)| (k as u64, t)));
    let residuals = members
        .iter()
        .map(|(s, t)| Ok((*s, bounded_transform(t)?.identity_residual())))
        .collect::<Result<Vec<_>>>()?;
    for (s, r) in residuals {
        tally.record(s, 1e-10 - r);
        tally.max_diag("worst_residual", r);
    }
    Ok(tally.finish())
}

/// All norm bounds with margin `>= -eig_tol` on the same ensemble plus scalar sweeps.
pub fn criterion_2(ctx: &Context) -> Result<CheckResult> {
    let main = check_linqx(100, &ENSEMBLE_DIMS, ctx.seed)?;
    let mut tally = Tally::new("extra_tuples");
    let slack = crate::numkernel::tolerances().eig_tol;
    for (k, t) in ctx.extra_tuples.iter().enumerate() {
        tally.record(k as u64, norm_bounds(t, 1.5)?.worst_margin() + slack);
    }
    let mut parts = vec![main];
    if !ctx.extra_tuples.is_empty() {
        parts.push(tally.finish());
    }
    Ok(CheckResult::combine("norm_bounds", parts))
}

/// Transfer conclusions at `delta = 0.9 eta / 6n`, `eta in {0.3, 0.1, 0.03}`, 30 seeds each.
pub fn criterion_3(ctx: &Context) -> Result<CheckResult> {
    let mut parts = Vec::new();
    for eta in [0.3, 0.1, 0.03] {
        for n in [2, 3] {
            parts.push(check_commutator_transfer(eta, n, 32, 30, ctx.seed)?);
        }
    }
    Ok(CheckResult::combine("commutator_transfer", parts))
}

/// `|[H_i, H_j]| < 4 delta` and `|[H_i, (1 + s h_j^2)^{-1}]| < 4 delta sqrt(s)`.
pub fn criterion_4(ctx: &Context) -> Result<CheckResult> {
    let s_values = [1.0, 0.1, 0.01];
    let parts = vec![
        check_reparam(0.01, &s_values, 3, 32, 30, ctx.seed)?,
        check_reparam(0.05, &s_values, 2, 32, 30, ctx.seed)?,
        check_reparam(0.0, &s_values, 2, 16, 5, ctx.seed)?,
    ];
    Ok(CheckResult::combine("resolvent_reparam", parts))
}

/// `|L(T) - L(T + E)| < 2 delta`, 50 instances at dim 64.
pub fn criterion_5(ctx: &Context) -> Result<CheckResult> {
    check_transform_lipschitz(0.1, 64, 50, ctx.seed)
}

/// Lowest 20 eigenvalues of `d` for the Hermite pair (N = 256, hbar = 0.01)
/// equal `(2k + 1) hbar` within `1e-6` relative.
pub fn criterion_6(_: &Context) -> Result<CheckResult> {
    let hbar = 0.01;
    let mut tally = Tally::new("oscillator_spectrum");
    let e = hermitian_eig(&sum_of_squares(&hermite_position_momentum(256, hbar)?))?;
    let worst = (0..20)
        .map(|k| {
            let want = (2 * k + 1) as f64 * hbar;
            (e.values[k] - want).abs() / want
        })
        .fold(0.0, f64::max);
    tally.record(0, 1e-6 - worst);
    tally.diagnostics.insert("worst_relative_error".into(), worst);
    Ok(tally.finish())
}

/// `|P [S_1, S_hbar] P - i hbar I| <= 1e-12` on the interior block, N in {64, 256}.
pub fn criterion_7(_: &Context) -> Result<CheckResult> {
    let hbar = 0.01;
    let mut tally = Tally::new("interior_commutator");
    for n in [64usize, 256] {
        let t = hermite_position_momentum(n, hbar)?;
        let k = t.interior_dim().unwrap_or(n);
        let c = commutator(&t, 0, 1)?.compress(k)?;
        let defect = operator_norm(&(&c - &ComplexMatrix::identity(k).scale(C64::new(0.0, hbar))));
        tally.record(n as u64, 1e-12 - defect);
        tally.diagnostics.insert(format!("defect_N={n}"), defect);
        tally.diagnostics.insert(format!("interior_norm_N={n}"), commutator_report_interior(&t).max_delta);
        tally.diagnostics.insert(format!("full_norm_N={n}"), commutator_report(&t).max_delta);
    }
    Ok(tally.finish())
}

/// Index `sign(hbar)` with `singular_gap >= 10` for `hbar in {+-0.1, +-0.01}`, N in {64, 128, 256}.
/// Margin per case: `singular_gap / 10 - 1`, or `-1` when the index is wrong or absent.
pub fn criterion_8(_: &Context) -> Result<CheckResult> {
    let mut tally = Tally::new("fredholm_index");
    for hbar in [0.1, 0.01, -0.1, -0.01] {
        for n in [64usize, 128, 256] {
            let r = fredholm_index(&t_hbar_operator(n, hbar)?, 1e6)?;
            let want = if hbar > 0.0 { 1 } else { -1 };
            let margin = if r.index == Some(want) { (r.singular_gap / 10.0 - 1.0).min(1.0) } else { -1.0 };
            tally.record(n as u64, margin);
            tally.diagnostics.insert(format!("index_hbar={hbar}_N={n}"), r.index.map_or(f64::NAN, |i| i as f64));
        }
    }
    Ok(tally.finish())
}

/// Random commuting diagonal fixture for oracle comparison: `(points, dim, M, eta)`.
pub fn commuting_fixture(seed: u64) -> (Vec<Vec<f64>>, usize, f64, f64) {
    let mut r = rng(seed);
    let n = 1 + (seed % 3) as usize;
    let dim = r.random_range(4..=64usize);
    let count = r.random_range(1..=dim.min(12));
    let (m, eta) = if n == 3 {
        (r.random_range(1.2..2.0), r.random_range(0.3..0.9))
    } else {
        (r.random_range(1.2..2.5), r.random_range(0.1..0.9))
    };
    let points = (0..count).map(|_| (0..n).map(|_| r.random_range(-1.5..1.5)).collect()).collect();
    (points, dim, m, eta)
}

/// Accepted grid indices predicted from the joint eigenvalues alone.
pub fn commuting_oracle(points: &[Vec<f64>], m: f64, eta: f64) -> Result<Vec<usize>> {
    let grid = make_grid(points[0].len(), m, eta)?;
    Ok(grid
        .points
        .iter()
        .enumerate()
        .filter(|(_, xi)| {
            let best = points
                .iter()
                .map(|p| xi.iter().zip(p).map(|(&c, &x)| theta_value(c, eta, x)).product::<f64>())
                .fold(0.0, f64::max);
            best >= 1.0 - eta
        })
        .map(|(i, _)| i)
        .collect())
}

/// Accepted sets on 20 commuting diagonal tuples equal the joint-eigenvalue oracle.
pub fn criterion_9(ctx: &Context) -> Result<CheckResult> {
    let mut tally = Tally::new("synthetic_spectrum_oracle");
    let results = per_seed(&seed_range(ctx.seed, 20), |s| {
        let (points, dim, m, eta) = commuting_fixture(s);
        let t = commuting_diagonal_model(&points, dim)?;
        let got: Vec<usize> = euclidean_synthetic_spectrum(&t, m, eta)?.accepted.iter().map(|c| c.index).collect();
        let want = commuting_oracle(&points, m, eta)?;
        let mismatches = want.iter().filter(|i| !got.contains(i)).count() + got.iter().filter(|i| !want.contains(i)).count();
        Ok((mismatches, want.len()))
    })?;
    for (s, (mismatches, accepted)) in results {
        tally.record(s, if mismatches == 0 { 1.0 } else { -(mismatches as f64) });
        tally.max_diag("max_accepted", accepted as f64);
    }
    Ok(tally.finish())
}

/// Hermite pair (N = 256, hbar = 0.01, M = 2, eta = 0.2): nonempty spectrum,
/// every accepted center passes `epsilon = 0.3`, residuals within 20% of `sqrt(hbar/2)`.
pub fn criterion_10(_: &Context) -> Result<CheckResult> {
    let (hbar, m, eta, eps) = (0.01, 2.0, 0.2, 0.3);
    let mut tally = Tally::new("hermite_amu_witnesses");
    let t = hermite_position_momentum(256, hbar)?;
    let s = euclidean_synthetic_spectrum(&t, m, eta)?;
    let scan = scan_amu(&t, &s, eps)?;
    let target = (hbar / 2.0).sqrt();
    tally.record(0, if s.is_empty() { -1.0 } else { 1.0 });
    for w in &scan.witnesses {
        let rel = w.residuals.iter().map(|r| (r / target - 1.0).abs()).fold(0.0, f64::max);
        tally.record(0, (eps - w.max_residual).min(0.2 - rel));
        tally.max_diag("worst_relative_deviation", rel);
    }
    tally.diagnostics.insert("accepted".into(), s.len() as f64);
    tally.diagnostics.insert("worst_residual".into(), scan.worst_residual);
    Ok(tally.finish())
}

/// Spin blocks `j in {1/2, 1, 3/2}` at hbar = 0.01: relations, tilde commutators
/// at most `|hbar|`, nonempty spherical spectrum, witnesses at `epsilon = 0.3`.
pub fn criterion_11(_: &Context) -> Result<CheckResult> {
    let (hbar, m, eta, eps) = (0.01, 1.5, 0.2, 0.3);
    let mut tally = Tally::new("spin_block_witnesses");
    for (k, j) in [0.5, 1.0, 1.5].into_iter().enumerate() {
        let id = k as u64;
        let t = angular_momentum_block(j, hbar)?;
        let mut relation = 0.0_f64;
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let want = t.ops()[c].as_complex().scale(C64::new(0.0, hbar));
            relation = relation.max(operator_norm(&(&commutator(&t, a, b)? - &want)));
        }
        tally.record(id, 1e-12 - relation);
        let tilde = tilde_transform(&t)?;
        let mut worst = 0.0_f64;
        for a in 0..3 {
            for b in (a + 1)..3 {
                let c = &(&tilde[a] * &tilde[b]) - &(&tilde[b] * &tilde[a]);
                worst = worst.max(operator_norm(&c));
            }
        }
        tally.record(id, hbar.abs() - worst);
        let s = spherical_synthetic_spectrum(&t, m, eta)?;
        tally.record(id, if s.is_empty() { -1.0 } else { 1.0 });
        let scan = scan_amu(&t, &s, eps)?;
        tally.record(id, eps - scan.worst_residual);
        tally.diagnostics.insert(format!("j={j}.relation_defect"), relation);
        tally.diagnostics.insert(format!("j={j}.tilde_commutator"), worst);
        tally.diagnostics.insert(format!("j={j}.accepted"), s.len() as f64);
        tally.diagnostics.insert(format!("j={j}.worst_residual"), scan.worst_residual);
    }
    Ok(tally.finish())
}

/// Fixed commuting fixtures for the inclusion criterion.
pub fn inclusion_fixtures() -> Result<Vec<OperatorTuple>> {
    Ok(vec![
        commuting_diagonal_model(&[vec![0.3, -0.2], vec![-0.6, 0.5]], 4)?,
        commuting_diagonal_model(&[vec![0.0, 0.0], vec![1.0, 0.4], vec![-0.8, -0.9]], 6)?,
        commuting_diagonal_model(&[vec![0.5], vec![-1.0]], 3)?,
    ])
}

/// Both inclusions with the sigma and gamma radii: commuting fixtures at
/// (eta, delta) = (0.1, 0.05) and the Hermite pair (N = 128, hbar = 0.01) at
/// (0.1, 0.15), where its delta-spectrum is nonempty.
pub fn criterion_12(_: &Context) -> Result<CheckResult> {
    let m = 1.5;
    let parts = vec![
        check_spectrum_inclusions(&inclusion_fixtures()?, m, 0.1, 0.05)?,
        check_spectrum_inclusions(&[hermite_position_momentum(128, 0.01)?], m, 0.1, 0.15)?,
    ];
    Ok(CheckResult::combine("spectrum_inclusions", parts))
}

/// Worst AMU residual over accepted centers (M = 2, eta = 0.25) for
/// `delta in {0.1, 0.03, 0.01, 0.003}`, n = 3, dim = 48, 20 seeds; each step
/// may rise by at most 10%. Empirical trend, not a bound.
pub fn criterion_13(ctx: &Context) -> Result<CheckResult> {
    let (m, eta) = (2.0, 0.25);
    let mut tally = Tally::new("amu_residual_trend");
    let seeds = seed_range(ctx.seed, 20);
    let mut worst = Vec::new();
    for delta in [0.1, 0.03, 0.01, 0.003] {
        let per = per_seed(&seeds, |s| {
            let t = random_almost_commuting(3, 48, delta, s)?;
            let spec = euclidean_synthetic_spectrum(&t, m, eta)?;
            Ok(scan_amu(&t, &spec, f64::MAX)?.worst_residual)
        })?;
        let w = per.iter().map(|p| p.1).fold(0.0, f64::max);
        tally.diagnostics.insert(format!("worst_at_delta={delta}"), w);
        worst.push(w);
    }
    for (k, pair) in worst.windows(2).enumerate() {
        tally.record(k as u64, 1.1 * pair[0] - pair[1]);
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_on_fixture() {
        for s in 0..3 {
            let (points, dim, m, eta) = commuting_fixture(s);
            let t = commuting_diagonal_model(&points, dim).unwrap();
            let got: Vec<usize> = euclidean_synthetic_spectrum(&t, m, eta).unwrap().accepted.iter().map(|c| c.index).collect();
            assert_eq!(got, commuting_oracle(&points, m, eta).unwrap());
        }
    }

    #[test]
    fn ids_are_sequential() {
        for (k, c) in CRITERIA.iter().enumerate() {
            assert_eq!(c.id as usize, k + 1);
        }
    }
}
