use rand::Rng;
use serde::Serialize;

use crate::ensemble::rng;
use crate::transforms::euclidean_distance;
use crate::{Error, Result};

/// Finite `eta`-dense subset of the closed `M`-ball in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: f64,
    pub eta: f64,
    pub points: Vec<Vec<f64>>,
}

/// Cubic lattice of pitch `eta / sqrt(n)`, symmetric about the origin, cut to
/// the closed `M`-ball. Points come in lexicographic order.
///
/// Density: for `x` in the ball, the lattice point nearest to
/// `x - (eta/2) x/|x|` lies in the ball and within `eta` of `x`.
pub fn make_grid(n: usize, m: f64, eta: f64) -> Result<GridSpec> {
    if n == 0 {
        return Err(Error::invalid("grid dimension must be positive"));
    }
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::invalid(format!("grid radius M must exceed 1, got {m}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid(format!("grid density eta must be positive, got {eta}")));
    }
    let pitch = eta / (n as f64).sqrt();
    let per_axis = ((2.0 * m / pitch) - 1e-9).ceil() as usize + 1;
    let offset = (per_axis as f64 - 1.0) / 2.0;
    let axis: Vec<f64> = (0..per_axis).map(|i| (i as f64 - offset) * pitch).collect();
    let total = (per_axis as f64).powi(n as i32);
    if total > 5e7 {
        return Err(Error::invalid(format!("grid with {per_axis}^{n} lattice points is too large")));
    }
    let m2 = m * m * (1.0 + 1e-12);
    let mut points = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= m2 {
            points.push(p);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(GridSpec { n, m, eta, points });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nearest_distance(&self, x: &[f64]) -> f64 {
        self.points.iter().map(|p| euclidean_distance(p, x)).fold(f64::INFINITY, f64::min)
    }

    /// `max(distance to the grid) - eta` over `samples` uniform points of the
    /// ball; nonpositive for an `eta`-dense grid.
    pub fn density_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = rng(seed);
        let mut worst = f64::NEG_INFINITY;
        let mut drawn = 0;
        while drawn < samples {
            let x: Vec<f64> = (0..self.n).map(|_| rng.random_range(-self.m..=self.m)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() > self.m * self.m {
                continue;
            }
            drawn += 1;
            worst = worst.max(self.nearest_distance(&x) - self.eta);
        }
        worst
    }

    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == x)
    }
}
