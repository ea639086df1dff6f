use crate::numkernel::{ComplexMatrix, HermitianMatrix, C64};
use crate::tuples::OperatorTuple;
use crate::{Error, Result};

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar.is_finite() && hbar != 0.0) {
        return Err(Error::invalid(format!("hbar must be finite and nonzero, got {hbar}")));
    }
    Ok(())
}

/// Position `S_1 = sqrt(|hbar|/2)(a + a*)` and momentum
/// `S_hbar = -i sign(hbar) sqrt(|hbar|/2)(a - a*)` in the first `n`
/// oscillator eigenfunctions. Any `n >= 2` is accepted; identities hold on
/// the leading `n - 1` coordinates.
pub fn position_momentum_matrices(n: usize, hbar: f64) -> Result<(HermitianMatrix, HermitianMatrix)> {
    check_hbar(hbar)?;
    if n < 2 {
        return Err(Error::invalid(format!("truncation size must be at least 2, got {n}")));
    }
    let scale = (hbar.abs() / 2.0).sqrt();
    let sign = hbar.signum();
    let band = |k: usize| scale * ((k + 1) as f64).sqrt();
    let x = ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new(band(i), 0.0)
        } else if i == j + 1 {
            C64::new(band(j), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    let p = ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new(0.0, -sign * band(i))
        } else if i == j + 1 {
            C64::new(0.0, sign * band(j))
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    Ok((HermitianMatrix::new(x)?, HermitianMatrix::new(p)?))
}

/// The pair `(S_1, S_hbar)` as a tuple with `interior_dim = n - 1`; requires `n >= 8`.
pub fn hermite_position_momentum(n: usize, hbar: f64) -> Result<OperatorTuple> {
    if n < 8 {
        return Err(Error::invalid(format!("hermite truncation needs N >= 8, got {n}")));
    }
    let (x, p) = position_momentum_matrices(n, hbar)?;
    OperatorTuple::new(format!("hermite_xp(N={n},hbar={hbar})"), vec![x, p], Some(n - 1))
}

/// `T_hbar = S_1 + i S_hbar`: `sqrt(2|hbar|) a` for `hbar > 0`, `sqrt(2|hbar|) a*` for `hbar < 0`.
pub fn t_hbar_operator(n: usize, hbar: f64) -> Result<ComplexMatrix> {
    let (x, p) = position_momentum_matrices(n, hbar)?;
    Ok(x.as_complex() + &p.as_complex().scale(C64::new(0.0, 1.0)))
}

/// Displaced ground state with `<S_1> = lambda1`, `<S_hbar> = lambda2`, normalized
/// in the first `n` oscillator states.
pub fn coherent_state(n: usize, hbar: f64, lambda1: f64, lambda2: f64) -> Result<Vec<C64>> {
    check_hbar(hbar)?;
    if n == 0 || !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::invalid("coherent_state needs n > 0 and a finite center"));
    }
    let alpha = C64::new(lambda1, hbar.signum() * lambda2) / (2.0 * hbar.abs()).sqrt();
    let r = alpha.norm();
    let theta = alpha.arg();
    let mean = r * r;
    // log |c_k| = -|alpha|^2/2 + k log|alpha| - log(k!)/2
    let log_mod = |k: usize, log_fact: f64| -> f64 {
        if r == 0.0 {
            if k == 0 { 0.0 } else { f64::NEG_INFINITY }
        } else {
            -mean / 2.0 + k as f64 * r.ln() - log_fact / 2.0
        }
    };
    let mut log_fact = 0.0;
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            log_fact += (k as f64).ln();
        }
        let m = log_mod(k, log_fact).exp();
        v.push(C64::from_polar(m, k as f64 * theta));
    }
    let mut tail = 0.0;
    let mut k = n;
    loop {
        log_fact += (k as f64).ln();
        let w = (2.0 * log_mod(k, log_fact)).exp();
        tail += w;
        if (k as f64 > mean && w < 1e-20 * tail.max(1e-300)) || w == 0.0 || k > n + 100_000 {
            break;
        }
        k += 1;
    }
    if tail > 1e-8 {
        return Err(Error::TailTooHeavy { tail, n });
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    Ok(v)
}
