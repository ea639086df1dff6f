use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point `(r, x_1, ..., x_n)` of the unit sphere in `R^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        SpherePoint::new(coords)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

impl SpherePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid("a sphere point needs at least two coordinates"));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self { coords })
    }

    pub fn north_pole(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The height coordinate `r`.
    pub fn r(&self) -> f64 {
        self.coords[0]
    }

    /// Dimension `n` of the sphere.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        euclidean_distance(&self.coords, &other.coords)
    }
}

pub(crate) fn euclidean_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `Phi(t) = ((|t|^2 - 1)/(|t|^2 + 1), 2 t_1/(|t|^2 + 1), ...)`.
pub fn stereographic_forward(p: &[f64]) -> Result<SpherePoint> {
    if p.is_empty() || p.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("stereographic_forward needs a nonempty finite point"));
    }
    let s: f64 = p.iter().map(|x| x * x).sum();
    let mut coords = Vec::with_capacity(p.len() + 1);
    coords.push((s - 1.0) / (s + 1.0));
    coords.extend(p.iter().map(|x| 2.0 * x / (s + 1.0)));
    Ok(SpherePoint { coords })
}

/// Stereographic projection from the north pole: `x / (1 - r)`.
pub fn stereographic_inverse(q: &SpherePoint) -> Result<Vec<f64>> {
    let r = q.r();
    let xs = &q.coords[1..];
    let sx: f64 = xs.iter().map(|x| x * x).sum();
    // 1 - r = |x|^2 / (1 + r) avoids cancellation in the northern hemisphere.
    let gap = if r > 0.0 { sx / (1.0 + r) } else { 1.0 - r };
    if gap <= 0.0 {
        return Err(Error::NorthPole);
    }
    Ok(xs.iter().map(|x| x / gap).collect())
}

/// Linear majorant of the inverse-map distortion on the image of the `M`-ball:
/// `F_M(t) = ((M^2 + 1)^2 / 2) t` on `[0, 2]`.
pub fn modulus_f(m: f64, t: f64) -> Result<f64> {
    check_modulus_args(m, t, 2.0)?;
    Ok((m * m + 1.0).powi(2) / 2.0 * t)
}

/// Linear majorant of the forward-map distortion on the `M`-ball:
/// `G_M(t) = (2 + 2M) t` on `[0, 2M]`.
pub fn modulus_g(m: f64, t: f64) -> Result<f64> {
    check_modulus_args(m, t, 2.0 * m)?;
    Ok((2.0 + 2.0 * m) * t)
}

fn check_modulus_args(m: f64, t: f64, t_max: f64) -> Result<()> {
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::invalid(format!("modulus requires M > 1, got {m}")));
    }
    if !(0.0..=t_max).contains(&t) {
        return Err(Error::invalid(format!("modulus argument {t} outside [0, {t_max}]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_and_equator() {
        let s = stereographic_forward(&[0.0, 0.0]).unwrap();
        assert_eq!(s.coords(), &[-1.0, 0.0, 0.0]);
        let e = stereographic_forward(&[0.6, 0.8]).unwrap();
        assert!(e.r().abs() < 1e-15);
        assert!(matches!(stereographic_inverse(&SpherePoint::north_pole(2)), Err(Error::NorthPole)));
    }

    #[test]
    fn round_trip_far_point() {
        let p = [9.0, -4.0, 1.5];
        let back = stereographic_inverse(&stereographic_forward(&p).unwrap()).unwrap();
        for (a, b) in p.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn moduli_ranges() {
        assert_eq!(modulus_f(1.5, 0.0).unwrap(), 0.0);
        assert_eq!(modulus_g(1.5, 0.0).unwrap(), 0.0);
        assert!(modulus_f(1.5, 2.1).is_err());
        assert!(modulus_g(1.5, 3.1).is_err());
        assert!(modulus_f(1.0, 0.5).is_err());
    }

    #[test]
    fn sphere_point_validation() {
        assert!(SpherePoint::new(vec![0.5, 0.5]).is_err());
        let p: SpherePoint = serde_json::from_str("[0.6, 0.8]").unwrap();
        assert_eq!(p.n(), 1);
    }
}
