use num_traits::One;
use proptest::prelude::*;

use lagflop::dualcurve::{dual_polynomial, pluecker, PlueckerTriple};
use lagflop::exactpoly::{gcd, parse_multipoly, resultant, squarefree_part, MultiPoly};
use lagflop::{HomogeneousPolynomial, Q};

fn poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -4i64..=4), 0..5).prop_map(move |terms| {
        MultiPoly::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, Q::from_integer(c.into()))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(3), b in poly(3), c in poly(3)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn display_parses_back(a in poly(3)) {
        let text = a.to_string();
        prop_assert_eq!(parse_multipoly(&text, 3).unwrap(), a);
    }

    #[test]
    fn gcd_divides_and_recovers_common_factor(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let g = gcd(&(&a * &c), &(&b * &c));
        prop_assert!((&a * &c).div_exact(&g).is_some());
        prop_assert!((&b * &c).div_exact(&g).is_some());
        prop_assert!(g.div_exact(&squarefree_part(&c)).is_some() || c.is_constant());
    }

    #[test]
    fn resultant_vanishes_on_common_root(a in poly(2), b in poly(2), r in -3i64..=3) {
        // Both share the factor (x0 - r) in x0.
        let root = &MultiPoly::var(2, 0) - &MultiPoly::constant(2, Q::from_integer(r.into()));
        let f = &a * &root;
        let g = &b * &root;
        prop_assume!(f.degree_in(0).unwrap_or(0) > 0 && g.degree_in(0).unwrap_or(0) > 0);
        prop_assert!(resultant(&f, &g, 0).unwrap().is_zero());
    }

    #[test]
    fn pluecker_is_an_involution(d in 2u32..9, delta in 0u32..4, kappa in 0u32..4) {
        let t = PlueckerTriple::new(d, delta, kappa);
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let (dd, kd) = pluecker(t).unwrap();
        prop_assume!(dd >= 2 && kd >= 0);
        // Nodes of the dual from the inverse degree formula.
        let twice = dd * (dd - 1) - 3 * kd - d as i64;
        prop_assume!(twice >= 0 && twice % 2 == 0);
        let back = PlueckerTriple::new(dd as u32, (twice / 2) as u32, kd as u32).and_then(pluecker);
        prop_assert_eq!(back, Ok((d as i64, kappa as i64)));
    }
}

#[test]
fn dual_of_smooth_conics_is_a_conic() {
    for text in ["x0^2 + x1^2 + x2^2", "x0*x1 + x2^2", "x0^2 - 3*x1*x2 + 2*x2^2"] {
        let f = HomogeneousPolynomial::parse(text, 3).unwrap();
        let r = dual_polynomial(&f).unwrap();
        assert_eq!(r.dual_degree, 2, "{text}");
        assert!(r.membership_residual < 1e-8);
    }
}

#[test]
fn dual_of_fermat_cubic_has_degree_six() {
    let f = HomogeneousPolynomial::parse("x0^3 + x1^3 + x2^3", 3).unwrap();
    let r = dual_polynomial(&f).unwrap();
    assert_eq!(r.dual_degree, 6);
    assert!(r.membership_residual < 1e-8);
}

#[test]
fn nodal_cubic_matches_pluecker() {
    let f = HomogeneousPolynomial::parse("x1^2*x2 - x0^3 - x0^2*x2", 3).unwrap();
    let r = dual_polynomial(&f).unwrap();
    let (expected, _) = pluecker(PlueckerTriple::new(3, 1, 0).unwrap()).unwrap();
    assert_eq!(r.dual_degree as i64, expected);
}

#[test]
fn constants_behave() {
    let one = MultiPoly::one(2);
    assert!(one.constant_value().unwrap().is_one());
    assert!(MultiPoly::zero(2).is_zero());
}
