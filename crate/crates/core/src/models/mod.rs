//! Finite truncations of the quantum-mechanical examples: position and
//! momentum in the oscillator basis, the ladder-type operator and its index,
//! spin blocks, and commuting diagonal fixtures.

mod angular;
mod hermite;
mod index;

use serde::{Deserialize, Serialize};

pub use angular::{angular_momentum_block, casimir, spin_multiplicity};
pub use hermite::{coherent_state, hermite_position_momentum, position_momentum_matrices, t_hbar_operator};
pub use index::{bounded_l, bounded_l_defect, fredholm_index, fredholm_index_with_edge, IndexReport, IndexStatus};

use crate::numkernel::HermitianMatrix;
use crate::tuples::OperatorTuple;
use crate::{Error, Result};

/// Diagonal tuple whose joint eigenvalues are `points`, cycled to fill `dim`.
pub fn commuting_diagonal_model(points: &[Vec<f64>], dim: usize) -> Result<OperatorTuple> {
    let first = points.first().ok_or_else(|| Error::invalid("need at least one joint eigenvalue"))?;
    let n = first.len();
    if n == 0 || points.iter().any(|p| p.len() != n) {
        return Err(Error::invalid("joint eigenvalues must share a positive dimension"));
    }
    if dim < points.len() {
        return Err(Error::invalid(format!("dim {dim} is smaller than the {} points", points.len())));
    }
    let ops = (0..n)
        .map(|i| HermitianMatrix::from_real_diagonal(&(0..dim).map(|k| points[k % points.len()][i]).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    OperatorTuple::new(format!("commuting_diagonal(points={},dim={dim})", points.len()), ops, None)
}

/// Parameters that rebuild a named model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDescriptor {
    HermiteXp {
        #[serde(rename = "N")]
        n: usize,
        hbar: f64,
    },
    AngularMomentum {
        j: f64,
        hbar: f64,
    },
    CommutingDiagonal {
        points: Vec<Vec<f64>>,
        dim: usize,
    },
}

impl ModelDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelDescriptor::HermiteXp { n, hbar } => {
                if *n < 8 {
                    return Err(Error::invalid(format!("hermite truncation needs N >= 8, got {n}")));
                }
                if !(hbar.is_finite() && *hbar != 0.0) {
                    return Err(Error::invalid(format!("hbar must be finite and nonzero, got {hbar}")));
                }
                Ok(())
            }
            ModelDescriptor::AngularMomentum { j, hbar } => {
                spin_multiplicity(*j)?;
                if !(hbar.is_finite() && *hbar != 0.0) {
                    return Err(Error::invalid(format!("hbar must be finite and nonzero, got {hbar}")));
                }
                Ok(())
            }
            ModelDescriptor::CommutingDiagonal { points, dim } => {
                if points.is_empty() || *dim < points.len() {
                    return Err(Error::invalid("commuting_diagonal needs 1 <= #points <= dim"));
                }
                if points.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("commuting_diagonal points must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn build(&self) -> Result<OperatorTuple> {
        self.validate()?;
        match self {
            ModelDescriptor::HermiteXp { n, hbar } => hermite_position_momentum(*n, *hbar),
            ModelDescriptor::AngularMomentum { j, hbar } => angular_momentum_block(*j, *hbar),
            ModelDescriptor::CommutingDiagonal { points, dim } => commuting_diagonal_model(points, *dim),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_json() {
        let d: ModelDescriptor = serde_json::from_str(r#"{"kind":"hermite_xp","N":16,"hbar":0.01}"#).unwrap();
        assert_eq!(d.build().unwrap().n(), 2);
        let d: ModelDescriptor = serde_json::from_str(r#"{"kind":"angular_momentum","j":1,"hbar":0.1}"#).unwrap();
        assert_eq!(d.build().unwrap().dim(), 3);
        let bad: ModelDescriptor = serde_json::from_str(r#"{"kind":"angular_momentum","j":0.3,"hbar":0.1}"#).unwrap();
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<ModelDescriptor>(r#"{"kind":"other"}"#).is_err());
    }

    #[test]
    fn diagonal_model_pads_by_repetition() {
        let t = commuting_diagonal_model(&[vec![1.0, 2.0], vec![-1.0, 0.5]], 5).unwrap();
        let first: Vec<f64> = (0..5).map(|k| t.ops()[0].get(k, k).re).collect();
        assert_eq!(first, vec![1.0, -1.0, 1.0, -1.0, 1.0]);
        assert!(commuting_diagonal_model(&[vec![1.0]], 0).is_err());
    }
}
