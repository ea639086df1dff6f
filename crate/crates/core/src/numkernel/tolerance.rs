use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
///
/// `hermitian_tol` bounds the max-entry deviation `|H - H*|` (relative to
/// `max(1, |H|_max)`) accepted when constructing a [`HermitianMatrix`].
/// `eig_tol` is the relative slack used for eigen-residuals and for the
/// one-sided norm inequalities checked throughout the crate.
///
/// [`HermitianMatrix`]: super::HermitianMatrix
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub hermitian_tol: f64,
    pub eig_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-12,
            eig_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [("hermitian_tol", self.hermitian_tol), ("eig_tol", self.eig_tol)] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(crate::Error::invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

static ACTIVE: OnceLock<Tolerances> = OnceLock::new();

/// The process-wide tolerances. Defaults apply unless [`install`] ran first.
pub fn tolerances() -> Tolerances {
    *ACTIVE.get_or_init(Tolerances::default)
}

/// Fixes the process-wide tolerances. Succeeds only once, and only before any
/// computation has read them.
pub fn install(tol: Tolerances) -> crate::Result<()> {
    tol.validate()?;
    ACTIVE
        .set(tol)
        .map_err(|_| crate::Error::invalid("tolerances were already fixed for this process"))
}
