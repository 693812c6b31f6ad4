use proptest::prelude::*;
use rand::Rng;

use lagflop::charclass::{
    a_hat_square_identity, chern_of_e_plus_edual, genus_of_e_plus_edual, genus_series, sqrt_series, total_chern,
    FormalClassSeries, GenusKind,
};
use lagflop::lagclass::{
    k3_reflection, mukai_pluecker_check, picard_lefschetz, pluecker_type_check, product_report, random_table,
    reflection_report, transform_center, GramLattice, MukaiCenterData, TableInput,
};
use lagflop::numeric::sample_rng;
use lagflop::verify::reference_lattices;
use lagflop::Q;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normalized_transform_preserves_products(seed in any::<u64>(), n in 1u32..=5, k in 1usize..=5) {
        let t = random_table(&mut sample_rng(seed, 0), n, k, 30);
        let r = product_report(&t);
        prop_assert!(r.holds(), "{:?}", r.failures);
    }

    #[test]
    fn mukai_data_agrees_with_table(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 1);
        let n = rng.random_range(1..=4);
        let t = random_table(&mut rng, n, 3, 10);
        let d = MukaiCenterData::from_flop_table(&t);
        for a in t.labels() {
            for b in t.labels() {
                let m = mukai_pluecker_check(&d, a, b).unwrap();
                prop_assert_eq!((m.lhs, m.rhs), pluecker_type_check(&t, a, b).unwrap());
            }
        }
    }

    #[test]
    fn reflection_is_an_involutive_isometry(which in 0usize..3, v in prop::collection::vec(-5i64..=5, 22), w in prop::collection::vec(-5i64..=5, 22)) {
        let (_, lattice, p) = reference_lattices().swap_remove(which);
        let r = lattice.rank();
        let (v, w) = (&v[..r], &w[..r]);
        let sv = picard_lefschetz(&lattice, &p, v).unwrap();
        let sw = picard_lefschetz(&lattice, &p, w).unwrap();
        prop_assert_eq!(lattice.dot(&sv, &sw).unwrap(), lattice.dot(v, w).unwrap());
        prop_assert_eq!(picard_lefschetz(&lattice, &p, &sv).unwrap(), v.to_vec());
    }

    #[test]
    fn series_products_are_associative(seed in any::<u64>()) {
        let ring = FormalClassSeries::ring(2, 6).unwrap();
        let mut rng = sample_rng(seed, 2);
        let mut pick = || {
            let mut s = ring.constant(Q::from_integer(rng.random_range(-3i64..=3).into()));
            for i in 0..2 {
                let c = Q::from_integer(rng.random_range(-3i64..=3).into());
                s = s.add(&ring.var(i).scale(&c)).unwrap();
            }
            s
        };
        let (a, b, c) = (pick(), pick(), pick());
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(a.dual().dual(), a);
    }
}

#[test]
fn k3_default_table() {
    let t: TableInput =
        serde_json::from_str(r#"{"n": 1, "labels": ["C"], "s": [[-2]], "a": [1], "k3_default": true}"#).unwrap();
    let t = t.build().unwrap();
    assert_eq!(t.b(), &[-1]);
    assert!(product_report(&t).holds());
    // In dimension 1 the center goes to minus the dual center.
    assert_eq!(transform_center(&t).format(t.labels(), true, "P_dual"), "-P_dual");
}

#[test]
fn verbatim_reflection_is_not_an_isometry_on_the_center() {
    for (_, lattice, p) in reference_lattices() {
        let image = k3_reflection(&lattice, &p, &p).unwrap();
        assert_eq!(lattice.dot(&image, &image).unwrap(), -18);
        let r = reflection_report(&lattice, &p, &[]).unwrap();
        assert!(r.isometry && r.negates_center);
    }
}

#[test]
fn rejects_non_root_center() {
    let l = GramLattice::new(vec![vec![-4]]).unwrap();
    assert!(picard_lefschetz(&l, &[1], &[1]).is_err());
}

#[test]
fn e_plus_edual_has_no_odd_classes_and_even_genera() {
    for r in 1..=3 {
        let ring = FormalClassSeries::ring(r, 8).unwrap();
        let c = chern_of_e_plus_edual(&total_chern(&ring, 0, r));
        for k in [1, 3, 5, 7] {
            assert!(c.component(k).is_zero());
        }
        let todd = genus_of_e_plus_edual(GenusKind::Todd, r, 8).unwrap();
        let a_hat = genus_of_e_plus_edual(GenusKind::AHat, r, 8).unwrap();
        assert_eq!(todd, a_hat);
        assert!(a_hat_square_identity(r, 8).unwrap());
    }
}

#[test]
fn square_root_of_l_genus() {
    for r in 1..=4 {
        let l = genus_series(GenusKind::L, r, 8).unwrap();
        let root = sqrt_series(&l).unwrap();
        assert_eq!(root.mul(&root).unwrap(), l);
    }
}
