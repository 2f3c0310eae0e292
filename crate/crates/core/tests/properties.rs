mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn leibniz_rule(theta in derivation_mod_p(), f in poly_mod_p(), g in poly_mod_p()) {
        check_leibniz(&theta, &f, &g).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn exact_division(q in poly_q(), f in nonzero_poly_q()) {
        check_exact_division(&q, &f).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn evaluation_homomorphism(
        f in poly_mod_p(),
        g in poly_mod_p(),
        h in poly_q(),
        point in prop::collection::vec(-50i64..=50, NVARS),
    ) {
        check_evaluation(&f, &g, &h, &point).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn monomial_counts(n in 1usize..=15, d in 0usize..=5) {
        check_monomial_count(n, d).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn constant_invariant_under_column_permutation(
        which in 0usize..2,
        perm in 0usize..120,
        point in prop::collection::vec(0..P, NVARS),
    ) {
        check_constant_invariance(which, perm, &point).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tangency_is_checked_factor_by_factor(
        j in 5usize..=10,
        weights in prop::collection::vec(-3i64..=3, 14),
        lambda in -2i64..=2,
        u in 0usize..NVARS,
        v in 0usize..NVARS,
    ) {
        check_tangency_characterization(j, &weights, lambda, u, v).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sandwich_is_tight_and_matches_oracle(ids in ids_strategy(), seed in any::<u64>()) {
        check_sandwich(&ids, seed, 2, 1).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn thread_count_does_not_matter(ids in ids_strategy(), seed in any::<u64>()) {
        check_thread_determinism(&ids, seed).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn oracle_matches_certified_dimensions_at_degree_two() {
    for ids in [
        vec![1, 2, 3, 4, 5],
        vec![6, 7, 8, 9, 10],
        vec![1, 2, 3, 5, 10],
        vec![1, 2, 3, 4, 5, 10],
    ] {
        check_sandwich(&ids, 20240607, 2, 2).unwrap();
    }
}
