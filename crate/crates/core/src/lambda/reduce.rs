use super::Term;

/// Reduction order used to reach the beta-normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Leftmost-outermost redex first.
    NormalOrder,
    /// Arguments are normalized before a redex is contracted.
    Innermost,
}

pub fn beta_normalize(t: &Term) -> Term {
    normalize_with(t, Strategy::NormalOrder)
}

pub fn normalize_with(t: &Term, strategy: Strategy) -> Term {
    match strategy {
        Strategy::NormalOrder => {
            let mut t = t.clone();
            while let Some(next) = step_outermost(&t) {
                t = next;
            }
            t
        }
        Strategy::Innermost => innermost(t),
    }
}

pub fn is_normal(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Const { .. } => true,
        Term::Lam(_, b) => is_normal(b),
        Term::App(f, a) => !matches!(**f, Term::Lam(..)) && is_normal(f) && is_normal(a),
    }
}

fn step_outermost(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, a) => {
            if let Term::Lam(x, body) = &**f {
                return Some(body.substitute(x, a));
            }
            if let Some(f2) = step_outermost(f) {
                return Some(Term::app(f2, (**a).clone()));
            }
            step_outermost(a).map(|a2| Term::app((**f).clone(), a2))
        }
        Term::Lam(x, b) => step_outermost(b).map(|b2| Term::lam(x, b2)),
        _ => None,
    }
}

fn innermost(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const { .. } => t.clone(),
        Term::Lam(x, b) => Term::lam(x, innermost(b)),
        Term::App(f, a) => {
            let f = innermost(f);
            let a = innermost(a);
            match f {
                Term::Lam(x, body) => innermost(&body.substitute(&x, &a)),
                f => Term::app(f, a),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn very_big_unfolds_twice() {
        let n = beta_normalize(&t("(λf x. f (f x)) (λx. big ∘ x)"));
        assert!(n.alpha_eq(&t("λx. big ∘ (big ∘ x)")), "{n}");
        assert!(is_normal(&n));
    }

    #[test]
    fn identity() {
        assert_eq!(beta_normalize(&t("(λx. x) car")), t("car"));
    }

    #[test]
    fn strategies_agree() {
        let src = "(λP Q. Q(P(kills)ᵀ)) (λf. f ∘ mortal) (λf. f ∘ Alice)";
        let a = normalize_with(&t(src), Strategy::NormalOrder);
        let b = normalize_with(&t(src), Strategy::Innermost);
        assert!(a.alpha_eq(&b));
        assert!(a.alpha_eq(&t("(kills ∘ mortal)ᵀ ∘ Alice")), "{a}");
    }

    #[test]
    fn capture_is_avoided() {
        let n = beta_normalize(&t("(λx y. x) y0"));
        let Term::Lam(b, body) = &n else { panic!("{n}") };
        assert_ne!(b, "y0");
        assert_eq!(**body, Term::constant("y0"));
        let m = beta_normalize(&parse_term("λy. (λx y. x y) y").unwrap());
        assert!(m.alpha_eq(&t("λa b. a b")), "{m}");
    }
}
