use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use peircelex::logic::{
    equivalent, evaluate, parse_formula, singleton_rewrite, EquivConfig, FolSignature, FolTerm, Formula, Model, ModelSpace,
};

const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = FolTerm> {
    prop_oneof![
        4 => prop::sample::select(&VARS[..]).prop_map(|v| FolTerm::Var(v.into())),
        1 => Just(FolTerm::Const("c".into())),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        term().prop_map(|t| Formula::atom("P", vec![t])),
        term().prop_map(|t| Formula::atom("S", vec![t])),
        (term(), term()).prop_map(|(a, b)| Formula::atom("Q", vec![a, b])),
        (term(), term()).prop_map(|(a, b)| Formula::eq(a, b)),
        Just(Formula::Top),
        Just(Formula::Bottom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let var = prop::sample::select(&VARS[..]);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (var, inner).prop_map(|(v, b)| Formula::exists(v, b)),
        ]
    })
}

fn closed() -> impl Strategy<Value = Formula> {
    formula().prop_map(|f| VARS.iter().fold(f, |b, v| Formula::exists(v, b)))
}

fn sig() -> FolSignature {
    FolSignature {
        constants: BTreeSet::from(["c".to_string()]),
        predicates: BTreeMap::from([("P".into(), 1), ("S".into(), 1), ("Q".into(), 2)]),
    }
}

fn models(seed: u64) -> Vec<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=3).flat_map(|n| (0..4).map(move |_| n)).map(|n| ModelSpace::new(&sig(), n).random(&mut rng)).collect()
}

fn truth(f: &Formula, m: &Model) -> bool {
    evaluate(f, m, &BTreeMap::new()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_round_trips(f in closed(), seed: u64) {
        // conjunctions print flattened, so the tree comes back up to
        // reassociation of `&`
        let back = parse_formula(&f.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), f.to_string());
        prop_assert_eq!(parse_formula(&f.unicode()).unwrap(), back.clone());
        for m in models(seed) {
            prop_assert_eq!(truth(&f, &m), truth(&back, &m));
        }
        let json = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<Formula>(&json).unwrap(), f);
    }

    #[test]
    fn renaming_bound_variables_keeps_meaning(f in closed(), seed: u64) {
        let g = f.renumbered();
        prop_assert!(f.alpha_eq(&g));
        for m in models(seed) {
            prop_assert_eq!(truth(&f, &m), truth(&g, &m));
        }
    }

    #[test]
    fn quantifier_duality(f in formula(), seed: u64) {
        let close = |g: Formula| VARS.iter().fold(g, |b, v| Formula::forall(v, b));
        let lhs = close(Formula::not(Formula::exists("x", f.clone())));
        let rhs = close(Formula::forall("x", Formula::not(f)));
        for m in models(seed) {
            prop_assert_eq!(truth(&lhs, &m), truth(&rhs, &m));
        }
    }

    #[test]
    fn equivalence_is_reflexive_and_sees_negation(f in closed()) {
        let cfg = EquivConfig { samples: 50, ..EquivConfig::bounded(2) };
        prop_assert!(equivalent(&f, &f, &sig(), &cfg).is_equivalent());
        prop_assert!(!equivalent(&f, &Formula::not(f.clone()), &sig(), &cfg).is_equivalent());
    }

    #[test]
    fn singleton_rewrite_is_sound_on_singleton_models(f in closed(), seed: u64) {
        let rewritten = singleton_rewrite(&f, &BTreeSet::from(["S".to_string()]));
        for m in models(seed) {
            // S denotes exactly the element named by the constant S
            let e = m.universe - 1;
            let m = m.with_constant("S", e).with_predicate("S", &[&[e]]);
            prop_assert_eq!(truth(&f, &m), truth(&rewritten, &m), "{} vs {}", f, rewritten);
        }
    }
}
