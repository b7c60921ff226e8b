use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use peircelex::backends::{eval_rel, eval_vect, RelInterp, Tensor};
use peircelex::diagram::{compose, equal, normalize, tensor, Diagram};
use peircelex::peirce::{double_cut_elim, spider_fuse};
use peircelex::random::{random_diagram, random_rel_interp, random_ty, random_vect_interp, DiagramConfig};
use peircelex::types::Ty;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cfg(cuts: bool, holes: bool) -> DiagramConfig {
    DiagramConfig { depth: 3, width: 2, cuts, holes }
}

/// Two composable diagrams.
fn pair(seed: u64, c: DiagramConfig) -> (Diagram, Diagram) {
    let mut r = rng(seed);
    let dom = random_ty(&mut r, 2);
    let a = random_diagram(&mut r, &dom, &c);
    let b = random_diagram(&mut r, &a.cod(), &c);
    (a, b)
}

fn split(t: &Tensor<bool>, dom: usize) -> (usize, usize) {
    (t.dims[..dom].iter().product(), t.dims[dom..].iter().product())
}

/// Relational composition of two tensors read as matrices.
fn rel_compose(a: &Tensor<bool>, a_dom: usize, b: &Tensor<bool>, b_dom: usize) -> Vec<bool> {
    let (n, m) = split(a, a_dom);
    let (m2, k) = split(b, b_dom);
    assert_eq!(m, m2);
    let mut out = vec![false; n * k];
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i * k + l] |= a.data[i * m + j] && b.data[j * k + l];
            }
        }
    }
    out
}

/// Tensor product of two relations, axes ordered as the boundary of `a ⊗ b`.
fn rel_tensor(a: &Tensor<bool>, a_dom: usize, b: &Tensor<bool>, b_dom: usize) -> Vec<bool> {
    let ((n1, c1), (n2, c2)) = (split(a, a_dom), split(b, b_dom));
    let mut out = vec![false; n1 * n2 * c1 * c2];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            for k1 in 0..c1 {
                for k2 in 0..c2 {
                    out[((i1 * n2 + i2) * c1 + k1) * c2 + k2] = a.data[i1 * c1 + k1] && b.data[i2 * c2 + k2];
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_is_associative(seed: u64) {
        let (a, b) = pair(seed, cfg(true, true));
        let mut r = rng(seed ^ 1);
        let c = random_diagram(&mut r, &b.cod(), &cfg(true, true));
        let lhs = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let rhs = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert!(equal(&lhs, &rhs));
    }

    #[test]
    fn identities_are_units(seed: u64) {
        let (a, _) = pair(seed, cfg(true, true));
        prop_assert!(equal(&compose(&Diagram::id(a.dom()), &a).unwrap(), &a));
        prop_assert!(equal(&compose(&a, &Diagram::id(a.cod())).unwrap(), &a));
        prop_assert!(equal(&tensor(&Diagram::id(Ty::unit()), &a), &a));
    }

    #[test]
    fn interchange_holds(seed: u64) {
        let (a, b) = pair(seed, cfg(true, true));
        let (a2, b2) = pair(seed ^ 2, cfg(true, true));
        let lhs = compose(&tensor(&a, &a2), &tensor(&b, &b2)).unwrap();
        let rhs = tensor(&compose(&a, &b).unwrap(), &compose(&a2, &b2).unwrap());
        prop_assert!(equal(&lhs, &rhs));
    }

    #[test]
    fn normal_forms_are_stable(seed: u64) {
        let (a, _) = pair(seed, cfg(true, true));
        let n = normalize(&a);
        prop_assert_eq!(normalize(&n.to_diagram()), n.clone());
        prop_assert!(equal(&n.to_diagram(), &a));
        prop_assert_eq!(n.dom.clone(), a.dom());
        prop_assert_eq!(n.cod(), a.cod());
    }

    #[test]
    fn rel_is_a_monoidal_functor(seed: u64) {
        let (a, b) = pair(seed, cfg(true, false));
        let ab = compose(&a, &b).unwrap();
        let (a2, _) = pair(seed ^ 3, cfg(true, false));
        let both = tensor(&ab, &a2);
        let interp: RelInterp = random_rel_interp(&mut rng(seed ^ 4), &both, 2);
        let (ta, tb, ta2) = (eval_rel(&a, &interp).unwrap(), eval_rel(&b, &interp).unwrap(), eval_rel(&a2, &interp).unwrap());
        let tab = eval_rel(&ab, &interp).unwrap();
        prop_assert_eq!(&tab.data, &rel_compose(&ta, a.dom().len(), &tb, b.dom().len()));
        let tboth = eval_rel(&both, &interp).unwrap();
        prop_assert_eq!(&tboth.data, &rel_tensor(&tab, ab.dom().len(), &ta2, a2.dom().len()));
    }

    #[test]
    fn equal_diagrams_evaluate_alike(seed: u64) {
        let (a, b) = pair(seed, cfg(true, false));
        let (a2, b2) = pair(seed ^ 5, cfg(true, false));
        let lhs = compose(&tensor(&a, &a2), &tensor(&b, &b2)).unwrap();
        let rhs = tensor(&compose(&a, &b).unwrap(), &compose(&a2, &b2).unwrap());
        let interp = random_rel_interp(&mut rng(seed ^ 6), &lhs, 2);
        prop_assert_eq!(eval_rel(&lhs, &interp).unwrap(), eval_rel(&rhs, &interp).unwrap());
        let lhs = compose(&tensor(&a, &a2), &tensor(&b, &b2)).unwrap();
        let n = normalize(&lhs).to_diagram();
        prop_assert_eq!(eval_rel(&n, &interp).unwrap(), eval_rel(&lhs, &interp).unwrap());
    }

    #[test]
    fn vect_respects_interchange(seed: u64) {
        let (a, b) = pair(seed, cfg(false, false));
        let (a2, b2) = pair(seed ^ 7, cfg(false, false));
        let lhs = compose(&tensor(&a, &a2), &tensor(&b, &b2)).unwrap();
        let rhs = tensor(&compose(&a, &b).unwrap(), &compose(&a2, &b2).unwrap());
        let interp = random_vect_interp(&mut rng(seed ^ 8), &lhs, 2);
        let (x, y) = (eval_vect(&lhs, &interp).unwrap(), eval_vect(&rhs, &interp).unwrap());
        prop_assert_eq!(&x.dims, &y.dims);
        for (p, q) in x.data.iter().zip(&y.data) {
            prop_assert!((p - q).abs() < 1e-9, "{} vs {}", p, q);
        }
    }

    #[test]
    fn rewrites_preserve_relations(seed: u64) {
        let (a, b) = pair(seed, cfg(true, false));
        let d = compose(&a, &b).unwrap();
        let interp = random_rel_interp(&mut rng(seed ^ 9), &d, 2);
        let want = eval_rel(&d, &interp).unwrap();
        for rewritten in [spider_fuse(&d), double_cut_elim(&d), double_cut_elim(&spider_fuse(&d))] {
            prop_assert_eq!(rewritten.dom(), d.dom());
            prop_assert_eq!(rewritten.cod(), d.cod());
            prop_assert_eq!(eval_rel(&rewritten, &interp).unwrap(), want.clone());
        }
    }
}

#[test]
fn snakes_straighten_in_both_backends() {
    let a = Diagram::id(Ty::of(&["A"]));
    let left = compose(&tensor(&a, &Diagram::cap("A")), &tensor(&Diagram::cup("A"), &a)).unwrap();
    let right = compose(&tensor(&Diagram::cap("A"), &a), &tensor(&a, &Diagram::cup("A"))).unwrap();
    for snake in [left, right] {
        let rel = random_rel_interp(&mut rng(0), &snake, 3);
        assert_eq!(eval_rel(&snake, &rel).unwrap(), eval_rel(&a, &rel).unwrap());
        let vect = random_vect_interp(&mut rng(0), &snake, 3);
        assert_eq!(eval_vect(&snake, &vect).unwrap(), eval_vect(&a, &vect).unwrap());
        // a snake is not a monoidal identity
        assert!(!equal(&snake, &a));
    }
}
