use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use peircelex::diagram::equal;
use peircelex::lambda::{beta_normalize, eval_closed, is_normal, normalize_with, parse_term, typecheck, Strategy};
use peircelex::random::{random_term, term_constants, term_signature};

fn term(seed: u64) -> (peircelex::lambda::Term, peircelex::types::SemType) {
    random_term(&mut ChaCha8Rng::seed_from_u64(seed), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduction_keeps_the_type(seed: u64) {
        let (t, ty) = term(seed);
        let n = beta_normalize(&t);
        prop_assert!(is_normal(&n));
        prop_assert_eq!(typecheck(&n, &BTreeMap::new(), &term_constants()).unwrap(), ty);
    }

    #[test]
    fn strategies_agree(seed: u64) {
        let (t, _) = term(seed);
        let outer = normalize_with(&t, Strategy::NormalOrder);
        let inner = normalize_with(&t, Strategy::Innermost);
        prop_assert!(outer.alpha_eq(&inner), "{} vs {}", outer, inner);
        prop_assert!(beta_normalize(&outer).alpha_eq(&outer));
    }

    #[test]
    fn reduction_keeps_the_diagram(seed: u64) {
        let (t, _) = term(seed);
        let (consts, sig) = (term_constants(), term_signature());
        let before = eval_closed(&t, &consts, &sig).unwrap();
        let after = eval_closed(&beta_normalize(&t), &consts, &sig).unwrap();
        prop_assert!(equal(before.as_diagram().unwrap(), after.as_diagram().unwrap()));
    }

    #[test]
    fn printed_terms_parse_back(seed: u64) {
        let (t, ty) = term(seed);
        let back = parse_term(&t.to_string()).unwrap();
        prop_assert_eq!(typecheck(&back, &BTreeMap::new(), &term_constants()).unwrap(), ty);
        prop_assert!(back.alpha_eq(&t), "{} vs {}", back, t);
    }
}
