//! Dense complex linear algebra: Hermitian eigendecomposition, singular
//! values, operator norms and functional calculus.

mod eig;
mod matrix;
mod scalar;
mod tolerance;

pub use eig::{apply_scalar_function, hermitian_eig, operator_norm, singular_values, smallest_eigpair, Eigen};
pub(crate) use eig::dmatrix_norm;
pub use matrix::{ComplexMatrix, HermitianMatrix, C64};
pub(crate) use matrix::{require_unit, vec_norm};
pub use scalar::{Bound, Domain, ScalarFn};
pub use tolerance::{install as install_tolerances, tolerances, Tolerances};
