//! Synthetic spectra: plateau bumps, eta-dense grids, the Euclidean and
//! spherical bump-product tests, and the single-vector witness test.

mod grid;
mod synthetic;
mod theta;

pub use grid::{make_grid, GridSpec};
pub use synthetic::{
    euclidean_on_grid, euclidean_synthetic_spectrum, order_sensitivity, sphere_factors, spherical_on_grid,
    spherical_synthetic_spectrum, witness_test, AcceptedCenter, OrderSensitivity, SyntheticSpectrum, Variant,
    WitnessOutcome,
};
pub use theta::{theta, theta_product_norm, theta_product_norm_dense, theta_value, FactorStack};
