use amulab::ensemble::random_hermitian;
use amulab::numkernel::{apply_scalar_function, hermitian_eig, operator_norm, Domain, ScalarFn};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operator_norm_is_spectral_radius(dim in 1usize..24, scale in 0.01f64..100.0, seed in any::<u64>()) {
        let h = random_hermitian(dim, scale, seed);
        let e = hermitian_eig(&h).unwrap();
        let radius = e.min().abs().max(e.max().abs());
        let norm = operator_norm(h.as_complex());
        prop_assert!((norm - radius).abs() <= 1e-10 * (1.0 + radius), "{norm} vs {radius}");
    }

    #[test]
    fn function_composition(dim in 1usize..20, seed in any::<u64>()) {
        let h = random_hermitian(dim, 1.0, seed);
        let g = ScalarFn::total(|x| x * x);
        let f = ScalarFn::new(Domain::at_least(0.0), |x| (1.0 + x).sqrt());
        let direct = apply_scalar_function(&h, &f.compose(&g)).unwrap();
        let nested = apply_scalar_function(&apply_scalar_function(&h, &g).unwrap(), &f).unwrap();
        prop_assert!(operator_norm(&(direct.as_complex() - nested.as_complex())) <= 1e-9);
    }

    #[test]
    fn eigen_reconstruction(dim in 1usize..64, scale in 0.1f64..1e3, seed in any::<u64>()) {
        let h = random_hermitian(dim, scale, seed);
        let e = hermitian_eig(&h).unwrap();
        let back = e.reconstruct(&e.values);
        let err = operator_norm(&(h.as_complex() - back.as_complex()));
        prop_assert!(err <= 1e-10 * (1.0 + operator_norm(h.as_complex())));
    }
}

#[test]
fn eigen_reconstruction_at_dim_512() {
    let h = random_hermitian(512, 1.0, 11);
    let e = hermitian_eig(&h).unwrap();
    let back = e.reconstruct(&e.values);
    let err = operator_norm(&(h.as_complex() - back.as_complex()));
    assert!(err <= 1e-10 * (1.0 + operator_norm(h.as_complex())), "{err}");
}

#[test]
fn domain_violation_is_reported() {
    let h = random_hermitian(6, 1.0, 2);
    let f = ScalarFn::new(Domain::greater_than(10.0), f64::ln);
    assert!(apply_scalar_function(&h, &f).is_err());
}
