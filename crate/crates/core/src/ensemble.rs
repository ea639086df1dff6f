//! Seeded random matrices used by generators, checks and tests.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkernel::{ComplexMatrix, HermitianMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussians (`E|z|^2 = 1`).
pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    });
    ComplexMatrix::wrap(m)
}

/// GUE-like Hermitian matrix with operator norm roughly `2 * scale`.
pub fn random_hermitian_with<R: Rng>(dim: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let sym = (&g + &g.adjoint()).scale(C64::new(scale / (2.0 * dim as f64).sqrt(), 0.0));
    HermitianMatrix::symmetrize(sym)
}

pub fn random_hermitian(dim: usize, scale: f64, seed: u64) -> HermitianMatrix {
    random_hermitian_with(dim, scale, &mut rng(seed))
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
    }
    ComplexMatrix::wrap(q)
}
