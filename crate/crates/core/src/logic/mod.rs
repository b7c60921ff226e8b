//! First-order formulae, finite models, and brute-force model checking.

mod equiv;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use equiv::{equivalent, singleton_rewrite, EquivConfig, FolSignature, ModelSpace, Verdict};
pub use parse::parse_formula;

/// Predicate name reserved for equality between terms.
pub const EQUALITY: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum FolTerm {
    Var(String),
    Const(String),
}

impl fmt::Display for FolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolTerm::Var(v) | FolTerm::Const(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Formula {
    Atom { pred: String, args: Vec<FolTerm> },
    Top,
    Bottom,
    Not { arg: Box<Formula> },
    And { left: Box<Formula>, right: Box<Formula> },
    Or { left: Box<Formula>, right: Box<Formula> },
    Implies { left: Box<Formula>, right: Box<Formula> },
    Forall { var: String, body: Box<Formula> },
    Exists { var: String, body: Box<Formula> },
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<FolTerm>) -> Self {
        Formula::Atom { pred: pred.to_string(), args }
    }

    pub fn eq(a: FolTerm, b: FolTerm) -> Self {
        Formula::atom(EQUALITY, vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not { arg: Box::new(f) }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And { left: Box::new(a), right: Box::new(b) }
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or { left: Box::new(a), right: Box::new(b) }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies { left: Box::new(a), right: Box::new(b) }
    }

    pub fn forall(v: &str, body: Formula) -> Self {
        Formula::Forall { var: v.to_string(), body: Box::new(body) }
    }

    pub fn exists(v: &str, body: Formula) -> Self {
        Formula::Exists { var: v.to_string(), body: Box::new(body) }
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conj(parts: Vec<Formula>) -> Self {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Top-level conjuncts, flattening nested `∧`.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And { left, right } => {
                let mut v = left.conjuncts();
                v.extend(right.conjuncts());
                v
            }
            other => vec![other],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                for a in args {
                    if let FolTerm::Var(v) = a {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not { arg } => arg.collect_free(bound, out),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                left.collect_free(bound, out);
                right.collect_free(bound, out);
            }
            Formula::Forall { var, body } | Formula::Exists { var, body } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Replaces free occurrences of `var` by `term`. Bound variables are
    /// renamed when they would capture a variable of `term`.
    pub fn substitute(&self, var: &str, term: &FolTerm) -> Formula {
        match self {
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.clone(),
                args: args
                    .iter()
                    .map(|a| match a {
                        FolTerm::Var(v) if v == var => term.clone(),
                        other => other.clone(),
                    })
                    .collect(),
            },
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not { arg } => Formula::not(arg.substitute(var, term)),
            Formula::And { left, right } => Formula::and(left.substitute(var, term), right.substitute(var, term)),
            Formula::Or { left, right } => Formula::or(left.substitute(var, term), right.substitute(var, term)),
            Formula::Implies { left, right } => {
                Formula::implies(left.substitute(var, term), right.substitute(var, term))
            }
            Formula::Forall { var: v, body } | Formula::Exists { var: v, body } => {
                let rebuild = |v: &str, b: Formula| match self {
                    Formula::Forall { .. } => Formula::forall(v, b),
                    _ => Formula::exists(v, b),
                };
                if v == var {
                    return self.clone();
                }
                if matches!(term, FolTerm::Var(t) if t == v) {
                    let mut avoid = body.free_vars();
                    avoid.insert(var.to_string());
                    avoid.insert(v.clone());
                    let fresh = fresh_name(v, &avoid);
                    let renamed = body.substitute(v, &FolTerm::Var(fresh.clone()));
                    return rebuild(&fresh, renamed.substitute(var, term));
                }
                rebuild(v, body.substitute(var, term))
            }
        }
    }

    /// Renames bound variables to `_0, _1, ...` in binding order.
    pub fn canonical(&self) -> Formula {
        fn go(f: &Formula, env: &mut Vec<(String, String)>, next: &mut usize) -> Formula {
            match f {
                Formula::Atom { pred, args } => Formula::Atom {
                    pred: pred.clone(),
                    args: args
                        .iter()
                        .map(|a| match a {
                            FolTerm::Var(v) => match env.iter().rev().find(|(o, _)| o == v) {
                                Some((_, n)) => FolTerm::Var(n.clone()),
                                None => a.clone(),
                            },
                            c => c.clone(),
                        })
                        .collect(),
                },
                Formula::Top | Formula::Bottom => f.clone(),
                Formula::Not { arg } => Formula::not(go(arg, env, next)),
                Formula::And { left, right } => Formula::and(go(left, env, next), go(right, env, next)),
                Formula::Or { left, right } => Formula::or(go(left, env, next), go(right, env, next)),
                Formula::Implies { left, right } => Formula::implies(go(left, env, next), go(right, env, next)),
                Formula::Forall { var, body } | Formula::Exists { var, body } => {
                    let name = format!("_{next}");
                    *next += 1;
                    env.push((var.clone(), name.clone()));
                    let b = go(body, env, next);
                    env.pop();
                    match f {
                        Formula::Forall { .. } => Formula::forall(&name, b),
                        _ => Formula::exists(&name, b),
                    }
                }
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Renames bound variables to `x0, x1, ...` in binding order, skipping
    /// names that occur free.
    pub fn renumbered(&self) -> Formula {
        let free = self.free_vars();
        let mut counter = 0usize;
        let mut next = || loop {
            let name = format!("x{counter}");
            counter += 1;
            if !free.contains(&name) {
                return name;
            }
        };
        fn go(f: &Formula, next: &mut dyn FnMut() -> String) -> Formula {
            match f {
                Formula::Not { arg } => Formula::not(go(arg, next)),
                Formula::And { left, right } => {
                    let l = go(left, next);
                    Formula::and(l, go(right, next))
                }
                Formula::Or { left, right } => {
                    let l = go(left, next);
                    Formula::or(l, go(right, next))
                }
                Formula::Implies { left, right } => {
                    let l = go(left, next);
                    Formula::implies(l, go(right, next))
                }
                Formula::Forall { var, body } | Formula::Exists { var, body } => {
                    let name = next();
                    let b = go(&body.substitute(var, &FolTerm::Var(name.clone())), next);
                    match f {
                        Formula::Forall { .. } => Formula::forall(&name, b),
                        _ => Formula::exists(&name, b),
                    }
                }
                other => other.clone(),
            }
        }
        // Two passes: first to placeholders so that new names cannot clash
        // with old bound names.
        let placeholder = {
            let mut k = 0usize;
            let mut tmp = || {
                k += 1;
                format!("#{k}")
            };
            go(self, &mut tmp)
        };
        go(&placeholder, &mut next)
    }

    /// Non-logical symbols: constants and predicate arities.
    pub fn symbols(&self) -> FolSignature {
        let mut sig = FolSignature::default();
        self.collect_symbols(&mut sig);
        sig
    }

    fn collect_symbols(&self, sig: &mut FolSignature) {
        match self {
            Formula::Atom { pred, args } => {
                if pred != EQUALITY {
                    sig.predicates.insert(pred.clone(), args.len());
                }
                for a in args {
                    if let FolTerm::Const(c) = a {
                        sig.constants.insert(c.clone());
                    }
                }
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not { arg } => arg.collect_symbols(sig),
            Formula::And { left, right } | Formula::Or { left, right } | Formula::Implies { left, right } => {
                left.collect_symbols(sig);
                right.collect_symbols(sig);
            }
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => body.collect_symbols(sig),
        }
    }

    /// Unicode rendering (`∃x. man(x) ∧ ¬hot(x)`).
    pub fn unicode(&self) -> String {
        let mut s = String::new();
        write_formula(self, 0, &UNICODE, &mut s);
        s
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Forall { .. } | Formula::Exists { .. } => 0,
            Formula::Implies { .. } => 1,
            Formula::Or { .. } => 2,
            Formula::And { .. } => 3,
            Formula::Not { .. } => 4,
            _ => 5,
        }
    }
}

pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "x" } else { stem };
    (0..)
        .map(|k| format!("{stem}{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded")
}

struct Notation {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    forall: &'static str,
    exists: &'static str,
    top: &'static str,
    bottom: &'static str,
}

const ASCII: Notation = Notation {
    not: "~",
    and: " & ",
    or: " | ",
    implies: " -> ",
    forall: "forall ",
    exists: "exists ",
    top: "true",
    bottom: "false",
};

const UNICODE: Notation = Notation {
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
    implies: " → ",
    forall: "∀",
    exists: "∃",
    top: "⊤",
    bottom: "⊥",
};

fn write_formula(f: &Formula, ctx: u8, n: &Notation, out: &mut String) {
    let paren = f.prec() < ctx;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Atom { pred, args } if pred == EQUALITY && args.len() == 2 => {
            out.push_str(&format!("{} = {}", args[0], args[1]));
        }
        Formula::Atom { pred, args } => {
            out.push_str(pred);
            if !args.is_empty() {
                let parts: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                out.push_str(&format!("({})", parts.join(", ")));
            }
        }
        Formula::Top => out.push_str(n.top),
        Formula::Bottom => out.push_str(n.bottom),
        Formula::Not { arg } => {
            out.push_str(n.not);
            let inner = if matches!(**arg, Formula::Atom { ref pred, .. } if pred == EQUALITY) { 6 } else { 4 };
            write_formula(arg, inner, n, out);
        }
        Formula::And { .. } => {
            for (i, c) in f.conjuncts().into_iter().enumerate() {
                if i > 0 {
                    out.push_str(n.and);
                }
                write_formula(c, 4, n, out);
            }
        }
        Formula::Or { left, right } => {
            write_formula(left, 2, n, out);
            out.push_str(n.or);
            write_formula(right, 3, n, out);
        }
        Formula::Implies { left, right } => {
            write_formula(left, 2, n, out);
            out.push_str(n.implies);
            write_formula(right, 1, n, out);
        }
        Formula::Forall { var, body } | Formula::Exists { var, body } => {
            out.push_str(if matches!(f, Formula::Forall { .. }) { n.forall } else { n.exists });
            out.push_str(var);
            out.push_str(". ");
            write_formula(body, 0, n, out);
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, 0, &ASCII, &mut s);
        write!(f, "{s}")
    }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// A finite first-order structure over the universe `{0, .., universe - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Model {
    pub universe: usize,
    #[serde(default)]
    pub constants: BTreeMap<String, usize>,
    #[serde(default)]
    pub predicates: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl Model {
    pub fn new(universe: usize) -> Self {
        Model { universe, ..Default::default() }
    }

    pub fn with_constant(mut self, name: &str, elem: usize) -> Self {
        self.constants.insert(name.to_string(), elem);
        self
    }

    pub fn with_predicate(mut self, name: &str, tuples: &[&[usize]]) -> Self {
        self.predicates.insert(name.to_string(), tuples.iter().map(|t| t.to_vec()).collect());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Model = serde_json::from_str(text)?;
        m.check()?;
        Ok(m)
    }

    /// Tuples lie in the universe and each predicate has a single arity.
    pub fn check(&self) -> Result<()> {
        for (c, e) in &self.constants {
            if *e >= self.universe {
                return Err(Error::Shape(format!("constant {c} = {e} outside universe {}", self.universe)));
            }
        }
        for (p, tuples) in &self.predicates {
            let mut arity = None;
            for t in tuples {
                if t.iter().any(|e| *e >= self.universe) {
                    return Err(Error::Shape(format!("predicate {p} has tuple {t:?} outside the universe")));
                }
                match arity {
                    None => arity = Some(t.len()),
                    Some(a) if a != t.len() => {
                        return Err(Error::Shape(format!("predicate {p} mixes arities {a} and {}", t.len())))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn term(&self, t: &FolTerm, env: &BTreeMap<String, usize>) -> Result<usize> {
        match t {
            FolTerm::Var(v) => env.get(v).copied().ok_or_else(|| Error::MissingSymbol(format!("unbound variable {v}"))),
            FolTerm::Const(c) => self
                .constants
                .get(c)
                .copied()
                .ok_or_else(|| Error::MissingSymbol(format!("unknown constant {c}"))),
        }
    }
}

/// Tarskian truth of `f` in `m` under `env`.
pub fn evaluate(f: &Formula, m: &Model, env: &BTreeMap<String, usize>) -> Result<bool> {
    let mut env = env.clone();
    eval_in(f, m, &mut env)
}

fn eval_in(f: &Formula, m: &Model, env: &mut BTreeMap<String, usize>) -> Result<bool> {
    Ok(match f {
        Formula::Atom { pred, args } => {
            let vals = args.iter().map(|a| m.term(a, env)).collect::<Result<Vec<_>>>()?;
            if pred == EQUALITY {
                vals.windows(2).all(|w| w[0] == w[1])
            } else {
                m.predicates
                    .get(pred)
                    .ok_or_else(|| Error::MissingSymbol(format!("unknown predicate {pred}")))?
                    .contains(&vals)
            }
        }
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not { arg } => !eval_in(arg, m, env)?,
        Formula::And { left, right } => eval_in(left, m, env)? && eval_in(right, m, env)?,
        Formula::Or { left, right } => eval_in(left, m, env)? || eval_in(right, m, env)?,
        Formula::Implies { left, right } => !eval_in(left, m, env)? || eval_in(right, m, env)?,
        Formula::Forall { var, body } | Formula::Exists { var, body } => {
            let universal = matches!(f, Formula::Forall { .. });
            let saved = env.get(var).copied();
            let mut result = universal;
            for e in 0..m.universe {
                env.insert(var.clone(), e);
                let v = eval_in(body, m, env)?;
                if v != universal {
                    result = v;
                    break;
                }
            }
            match saved {
                Some(s) => env.insert(var.clone(), s),
                None => env.remove(var),
            };
            result
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> FolTerm {
        FolTerm::Var("x".into())
    }

    #[test]
    fn top_is_true_everywhere() {
        for n in 0..3 {
            assert!(evaluate(&Formula::Top, &Model::new(n), &BTreeMap::new()).unwrap());
        }
    }

    #[test]
    fn mans_not_hot_example() {
        let f = parse_formula("exists x. man(x) & ~hot(x)").unwrap();
        let m = Model::new(2).with_predicate("man", &[&[0], &[1]]).with_predicate("hot", &[&[0]]);
        assert!(evaluate(&f, &m, &BTreeMap::new()).unwrap());
        let m2 = m.clone().with_predicate("hot", &[&[0], &[1]]);
        assert!(!evaluate(&f, &m2, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn every_man_sleeps_example() {
        let f = parse_formula("forall x. man(x) -> sleeps(x)").unwrap();
        let m = Model::new(1).with_predicate("man", &[&[0]]).with_predicate("sleeps", &[]);
        assert!(!evaluate(&f, &m, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn evaluation_errors() {
        let f = Formula::atom("man", vec![x()]);
        let m = Model::new(1).with_predicate("man", &[&[0]]);
        assert!(matches!(evaluate(&f, &m, &BTreeMap::new()), Err(Error::MissingSymbol(_))));
        let g = Formula::atom("woman", vec![FolTerm::Const("Alice".into())]);
        assert!(matches!(evaluate(&g, &m, &BTreeMap::new()), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn display_ascii_and_unicode() {
        let f = Formula::exists(
            "x0",
            Formula::and(Formula::atom("man", vec![FolTerm::Var("x0".into())]), Formula::not(Formula::atom("hot", vec![FolTerm::Var("x0".into())]))),
        );
        assert_eq!(f.to_string(), "exists x0. man(x0) & ~hot(x0)");
        assert_eq!(f.unicode(), "∃x0. man(x0) ∧ ¬hot(x0)");
        let g = Formula::not(f.clone());
        assert_eq!(g.to_string(), "~(exists x0. man(x0) & ~hot(x0))");
        assert_eq!(parse_formula(&g.to_string()).unwrap(), g);
        assert_eq!(parse_formula(&g.unicode()).unwrap(), g);
    }

    #[test]
    fn substitution_avoids_capture() {
        let Formula::Forall { body, .. } = parse_formula("forall x. exists y. kills(x, y)").unwrap() else { unreachable!() };
        let f = *body;
        let g = f.substitute("x", &FolTerm::Var("y".into()));
        assert_eq!(g.free_vars(), BTreeSet::from(["y".to_string()]));
        assert!(g.alpha_eq(&Formula::exists("z", Formula::atom("kills", vec![FolTerm::Var("y".into()), FolTerm::Var("z".into())]))));
    }

    #[test]
    fn renumbering_is_deterministic() {
        let Formula::Forall { body, .. } = parse_formula("forall x0. exists a. exists b. p(a, b) & q(x0)").unwrap() else { unreachable!() };
        let f = *body;
        let r = f.renumbered();
        assert_eq!(r.to_string(), "exists x1. exists x2. p(x1, x2) & q(x0)");
        assert!(r.alpha_eq(&f));
    }

    #[test]
    fn model_json() {
        let m = Model::from_json(r#"{"universe": 3, "constants": {"Alice": 0}, "predicates": {"man": [[0],[2]], "kills": [[0,1]]}}"#).unwrap();
        assert_eq!(m.predicates["kills"], BTreeSet::from([vec![0, 1]]));
        assert!(Model::from_json(r#"{"universe": 1, "predicates": {"man": [[3]]}}"#).is_err());
        assert!(Model::from_json(r#"{"universe": 2, "predicates": {"p": [[0],[0,1]]}}"#).is_err());
    }
}
