use proptest::prelude::*;
use rand::Rng;

use lagflop::numeric::sample_rng;
use lagflop::symplin::{
    classify, criteria_agreement, lag_project, lag_reduce, perp, random_coisotropic, random_instance,
    random_isotropic, random_lagrangian, reduce, Classification, SubspaceInput,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn criteria_agree(seed in any::<u64>()) {
        let c = random_instance(&mut sample_rng(seed, 0), 4);
        let r = criteria_agreement(&c).unwrap();
        prop_assert!(r.agree, "{:?}", r);
    }

    #[test]
    fn perp_is_complementary_and_involutive(seed in any::<u64>()) {
        let c = random_instance(&mut sample_rng(seed, 1), 4);
        let p = perp(&c);
        let n = c.ambient().n();
        prop_assert_eq!(c.dim() + p.dim(), 2 * n);
        let pp = perp(&p);
        prop_assert!(pp.contains_subspace(&c) && c.contains_subspace(&pp));
    }

    #[test]
    fn perp_swaps_isotropic_and_coisotropic(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 2);
        let n = rng.random_range(1..=4);
        let dim = rng.random_range(0..=n);
        let c = random_isotropic(&mut rng, n, dim);
        prop_assert!(classify(&perp(&c)).is_coisotropic());
    }

    #[test]
    fn lagrangian_projection_and_reduction(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 3);
        let n = rng.random_range(1..=4);
        let codim = rng.random_range(0..=n);
        let l = random_lagrangian(&mut rng, n);
        let d = random_coisotropic(&mut rng, n, codim);
        prop_assert_eq!(classify(&lag_project(&l, &d).unwrap()), Classification::Lagrangian);
        let (red, image) = lag_reduce(&l, &d).unwrap();
        prop_assert_eq!(red.quotient.dim(), 2 * (n - codim));
        prop_assert_eq!(classify(&image), Classification::Lagrangian);
    }

    #[test]
    fn reduction_is_symplectic(seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 4);
        let n = rng.random_range(1..=4);
        let codim = rng.random_range(0..=n);
        let d = random_coisotropic(&mut rng, n, codim);
        let r = reduce(&d).unwrap();
        prop_assert_eq!(r.quotient.dim(), 2 * (n - codim));
        prop_assert_eq!(r.kernel.len(), codim);
    }
}

#[test]
fn json_subspace_with_custom_form() {
    let input: SubspaceInput = serde_json::from_str(
        r#"{"n": 1, "gram": [["0", "2"], ["-2", "0"]], "basis": [["1", "1/2"]]}"#,
    )
    .unwrap();
    let c = input.build().unwrap();
    assert_eq!(classify(&c), Classification::Lagrangian);
}

#[test]
fn rejects_degenerate_form() {
    let input: SubspaceInput =
        serde_json::from_str(r#"{"n": 1, "gram": [["0", "0"], ["0", "0"]], "basis": []}"#).unwrap();
    assert!(input.build().is_err());
}
