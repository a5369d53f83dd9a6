mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transpose_and_shift(s in biseq(), k in -6i64..6, j in -6i64..6) {
        transpose_shift(&s, k, j)?;
    }

    #[test]
    fn sign_matches_decimal_oracle(s in sum_spec()) {
        sign_agrees(&s)?;
    }

    #[test]
    fn sup_of_periodic_words(block in digits(6, 1), pivot in -3i64..3) {
        sup_of_periodic(&block, pivot)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_pair_sandwich(w in pointed()) {
        bound_sandwich(&w)?;
    }

    #[test]
    fn extremal_within_exhaustive_bracket(inst in instance()) {
        extremal_brackets(&inst)?;
    }
}

#[test]
fn constant_sequences_hit_closed_form() {
    constant_sequences().unwrap();
}
