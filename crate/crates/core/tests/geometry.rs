use num_complex::Complex64;
use proptest::prelude::*;

use lagflop::hkquotient::{
    blowdown, calabi_check, conormal_transport, flop, level_residual, moment_maps, phase_aligned_distance,
    random_level_point, NumericConfig, Side,
};
use lagflop::legendre::{involution_check, legendre_invert, legendre_map, GradientMap, NewtonConfig};
use lagflop::numeric::{complex_gaussian, sample_rng};
use lagflop::HomogeneousPolynomial;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flop_is_a_level_preserving_involution(n in 1usize..=4, seed in any::<u64>(), idx in 0u64..1000) {
        let p = random_level_point(n, seed, idx);
        prop_assert_eq!(p.side, Side::M);
        prop_assert!(level_residual(&p) < 1e-10);
        let q = flop(&p).unwrap();
        prop_assert_eq!(q.side, Side::MPrime);
        prop_assert!(level_residual(&q) < 1e-10);
        let back = flop(&q).unwrap();
        prop_assert!(phase_aligned_distance(&p, &back) < 1e-10);
        prop_assert!((blowdown(&p) - blowdown(&q)).norm() < 1e-10);
    }

    #[test]
    fn complex_moment_vanishes_on_level(n in 1usize..=3, seed in any::<u64>()) {
        let p = random_level_point(n, seed, 0);
        let (mu_j, mu_c) = moment_maps(&p.x, &p.xi).unwrap();
        prop_assert!(mu_c.norm() < 1e-10);
        prop_assert!((mu_j - Complex64::new(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn newton_inverts_the_gradient(seed in any::<u64>()) {
        let f = HomogeneousPolynomial::parse("x0^3 + x1^3 + x2^3 - x0*x1*x2", 3).unwrap();
        let x = complex_gaussian(&mut sample_rng(seed, 0), 3, 1.0);
        let forward = legendre_map(&f, &x).unwrap();
        let cfg = NewtonConfig { seed, ..NewtonConfig::default() };
        let inv = legendre_invert(&f, &forward.xi, &cfg).unwrap();
        let g = GradientMap::new(&f).unwrap();
        let image = g.gradient(&inv.x);
        let err: f64 = image.iter().zip(&forward.xi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9 * (1.0 + forward.xi.iter().map(|z| z.norm()).fold(0.0, f64::max)));
    }

    #[test]
    fn legendre_relation_at_random_points(seed in any::<u64>()) {
        let f = HomogeneousPolynomial::parse("x0^4 + 2*x1^4 + x0*x1^3", 2).unwrap();
        let x = complex_gaussian(&mut sample_rng(seed, 1), 2, 1.0);
        let p = legendre_map(&f, &x).unwrap();
        let gap = (p.f_dual_value - 3.0 * p.f_value).norm();
        prop_assert!(gap <= 1e-9 * (1.0 + p.f_value.norm()));
    }
}

#[test]
fn gradient_maps_compose_to_identity() {
    for (text, n) in [("x0*x2 - x1^2", 3), ("x0^3 + x1^3 + x2^3", 3), ("x0^2 + x1^2 + x2^2 + x3^2", 4)] {
        let f = HomogeneousPolynomial::parse(text, n).unwrap();
        let r = involution_check(&f, 20, &NewtonConfig::default()).unwrap();
        assert!(r.primal_residual < 1e-6, "{text}: {r:?}");
        assert!(r.dual_residual < 1e-6, "{text}: {r:?}");
    }
}

#[test]
fn calabi_determinant_is_constant_for_n3() {
    let cfg = NumericConfig { samples: 10, ..NumericConfig::default() };
    let r = calabi_check(3, &cfg).unwrap();
    assert!(r.min_eigenvalue > 0.0);
    assert!(r.det_spread < 1e-5, "{}", r.det_spread);
}

#[test]
fn conormal_transport_higher_dimension() {
    let f = HomogeneousPolynomial::parse("x0^3 + x1^3 + x2^3 + x3^3", 4).unwrap();
    let r = conormal_transport(&f, 10, &NumericConfig::default()).unwrap();
    assert!(r.max_residual < 1e-8, "{}", r.max_residual);
}

#[test]
fn conormal_transport_cubic_curve() {
    let f = HomogeneousPolynomial::parse("x0^3 + x1^3 + x2^3", 3).unwrap();
    let r = conormal_transport(&f, 10, &NumericConfig::default()).unwrap();
    assert!(r.dual_poly.is_some());
    assert!(r.max_residual < 1e-8, "{}", r.max_residual);
}
