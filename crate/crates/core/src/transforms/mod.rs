//! Operator and coordinate transforms: the bounded transform onto the sphere,
//! resolvent conjugates, spectral cutoffs, stereographic maps and the
//! resolvent reparametrization.

mod bounded;
mod reparam;
mod stereo;

pub(crate) use bounded::{bar_from, DCalculus};
pub use bounded::{
    bar_transform, bounded_transform, commutator_transfer, cutoff, cutoff_fn, norm_bounds, tilde_transform,
    BoundedTransform, NormBounds, TransferReport,
};
pub use reparam::{
    build_phi, product_inequality_margin, reparam_report, reparam_scalar, resolvent_reparam, PhiMap, ReparamReport,
};
pub(crate) use stereo::euclidean_distance;
pub use stereo::{modulus_f, modulus_g, stereographic_forward, stereographic_inverse, SpherePoint};
