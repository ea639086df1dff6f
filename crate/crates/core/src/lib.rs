//! Finite-dimensional laboratory for almost-commuting tuples of self-adjoint
//! operators: bounded transforms, synthetic spectra, approximate joint
//! eigenvectors and model truncations.

mod error;

pub mod amu;
pub mod ensemble;
pub mod models;
pub mod numkernel;
pub mod spectrum;
pub mod transforms;
pub mod tuples;
pub mod verify;

pub use error::{Error, Result};
