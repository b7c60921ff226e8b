//! Bounded logical equivalence by finite-model enumeration, and the
//! singleton-predicate rewrite.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{evaluate, FolTerm, Formula, Model};

/// Non-logical vocabulary: constants and predicate arities.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FolSignature {
    #[serde(default)]
    pub constants: BTreeSet<String>,
    #[serde(default)]
    pub predicates: BTreeMap<String, usize>,
}

impl FolSignature {
    pub fn merge(&self, other: &FolSignature) -> FolSignature {
        let mut out = self.clone();
        out.constants.extend(other.constants.iter().cloned());
        out.predicates.extend(other.predicates.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }
}

/// All models of a signature over a fixed universe size, in a fixed order.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    sig: FolSignature,
    size: usize,
}

impl ModelSpace {
    pub fn new(sig: &FolSignature, size: usize) -> Self {
        ModelSpace { sig: sig.clone(), size }
    }

    /// Number of models, `None` on overflow.
    pub fn count(&self) -> Option<u128> {
        let n = self.size as u128;
        let mut total: u128 = 1;
        for _ in &self.sig.constants {
            total = total.checked_mul(n)?;
        }
        for arity in self.sig.predicates.values() {
            let cells = (self.size as u32).checked_pow(*arity as u32)?;
            if cells >= 127 {
                return None;
            }
            total = total.checked_mul(1u128 << cells)?;
        }
        Some(total)
    }

    /// Decodes the `idx`-th model: constants as base-`n` digits, then each
    /// predicate's table as a bitmask over tuples in lexicographic order.
    pub fn model(&self, mut idx: u128) -> Model {
        let n = self.size;
        let mut m = Model::new(n);
        for c in &self.sig.constants {
            m.constants.insert(c.clone(), (idx % n as u128) as usize);
            idx /= n as u128;
        }
        for (p, &arity) in &self.sig.predicates {
            let cells = n.pow(arity as u32);
            let mut table = BTreeSet::new();
            for cell in 0..cells {
                if idx & 1 == 1 {
                    table.insert(tuple_of(cell, n, arity));
                }
                idx >>= 1;
            }
            m.predicates.insert(p.clone(), table);
        }
        m
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Model {
        let n = self.size;
        let mut m = Model::new(n);
        for c in &self.sig.constants {
            m.constants.insert(c.clone(), rng.gen_range(0..n));
        }
        for (p, &arity) in &self.sig.predicates {
            let table = (0..n.pow(arity as u32))
                .filter(|_| rng.gen_bool(0.5))
                .map(|cell| tuple_of(cell, n, arity))
                .collect();
            m.predicates.insert(p.clone(), table);
        }
        m
    }
}

fn tuple_of(mut cell: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = cell % n;
        cell /= n;
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivConfig {
    pub max_universe: usize,
    /// Enumerate a universe size exhaustively when it has at most this many models.
    pub budget: u128,
    /// Random models drawn for a size whose model count exceeds the budget.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig { max_universe: 3, budget: 1 << 17, samples: 1000, seed: 0 }
    }
}

impl EquivConfig {
    pub fn bounded(max_universe: usize) -> Self {
        EquivConfig { max_universe, ..Default::default() }
    }

    /// Every model checked, in order: sizes `1..=max_universe`, each either
    /// exhaustive or sampled.
    pub fn models(&self, sig: &FolSignature) -> (Vec<Model>, bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::new();
        let mut exhaustive = true;
        for size in 1..=self.max_universe {
            let space = ModelSpace::new(sig, size);
            match space.count() {
                Some(c) if c <= self.budget => out.extend((0..c).map(|i| space.model(i))),
                _ => {
                    exhaustive = false;
                    out.extend((0..self.samples).map(|_| space.random(&mut rng)));
                }
            }
        }
        (out, exhaustive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// No difference found on any model up to `max_universe`.
    Equivalent { max_universe: usize, exhaustive: bool, models_checked: usize },
    Counterexample { model: Model, env: BTreeMap<String, usize>, left: bool, right: bool },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Equivalent { max_universe, exhaustive, models_checked } => write!(
                f,
                "equivalent up to universe {max_universe} ({} {models_checked} models)",
                if *exhaustive { "all" } else { "sampled" }
            ),
            Verdict::Counterexample { model, env, left, right } => write!(
                f,
                "counterexample: {} (env {env:?}): left={left}, right={right}",
                serde_json::to_string(model).unwrap_or_default()
            ),
        }
    }
}

fn assignments(vars: &[String], n: usize) -> Vec<BTreeMap<String, usize>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                (0..n).map(move |e| {
                    let mut env = env.clone();
                    env.insert(v.clone(), e);
                    env
                })
            })
            .collect();
    }
    out
}

/// Compares `f` and `g` on every model (and assignment of free variables)
/// up to the configured bound. The first difference found, in enumeration
/// order, is returned as a countermodel.
pub fn equivalent(f: &Formula, g: &Formula, sig: &FolSignature, cfg: &EquivConfig) -> Verdict {
    let sig = sig.merge(&f.symbols()).merge(&g.symbols());
    let free: Vec<String> = f.free_vars().union(&g.free_vars()).cloned().collect();
    let (models, exhaustive) = cfg.models(&sig);
    for m in &models {
        for env in assignments(&free, m.universe) {
            let l = evaluate(f, m, &env).expect("symbols covered by the merged signature");
            let r = evaluate(g, m, &env).expect("symbols covered by the merged signature");
            if l != r {
                return Verdict::Counterexample { model: m.clone(), env, left: l, right: r };
            }
        }
    }
    Verdict::Equivalent { max_universe: cfg.max_universe, exhaustive, models_checked: models.len() }
}

/// Rewrites `∃x. P(x) ∧ φ` into `φ[x := P]` for every singleton predicate
/// `P`, looking through blocks of adjacent existentials.
pub fn singleton_rewrite(f: &Formula, singletons: &BTreeSet<String>) -> Formula {
    match f {
        Formula::Exists { .. } => {
            let mut vars = Vec::new();
            let mut body = f;
            while let Formula::Exists { var, body: b } = body {
                vars.push(var.clone());
                body = b;
            }
            let mut conjuncts: Vec<Formula> =
                singleton_rewrite(body, singletons).conjuncts().into_iter().cloned().collect();
            let mut kept = Vec::new();
            for v in vars {
                let hit = conjuncts.iter().position(|c| match c {
                    Formula::Atom { pred, args } => {
                        singletons.contains(pred) && args.as_slice() == [FolTerm::Var(v.clone())]
                    }
                    _ => false,
                });
                match hit {
                    Some(i) => {
                        let Formula::Atom { pred, .. } = conjuncts.remove(i) else { unreachable!() };
                        let c = FolTerm::Const(pred);
                        conjuncts = conjuncts.iter().map(|f| f.substitute(&v, &c)).collect();
                    }
                    None => kept.push(v),
                }
            }
            let inner = Formula::conj(conjuncts);
            kept.iter().rev().fold(inner, |b, v| Formula::exists(v, b))
        }
        Formula::Not { arg } => Formula::not(singleton_rewrite(arg, singletons)),
        Formula::And { left, right } => {
            Formula::and(singleton_rewrite(left, singletons), singleton_rewrite(right, singletons))
        }
        Formula::Or { left, right } => {
            Formula::or(singleton_rewrite(left, singletons), singleton_rewrite(right, singletons))
        }
        Formula::Implies { left, right } => {
            Formula::implies(singleton_rewrite(left, singletons), singleton_rewrite(right, singletons))
        }
        Formula::Forall { var, body } => Formula::forall(var, singleton_rewrite(body, singletons)),
        _ => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn reflexive() {
        let f = p("forall x. man(x) -> sleeps(x)");
        assert!(equivalent(&f, &f, &FolSignature::default(), &EquivConfig::default()).is_equivalent());
    }

    #[test]
    fn double_cut_form_of_universal() {
        let f = p("~(exists x. m(x) & ~s(x))");
        let g = p("forall x. m(x) -> s(x)");
        let v = equivalent(&f, &g, &FolSignature::default(), &EquivConfig::bounded(3));
        // 2 unary predicates: 2^(2n) models per size n
        assert_eq!(v, Verdict::Equivalent { max_universe: 3, exhaustive: true, models_checked: 4 + 16 + 64 });
    }

    #[test]
    fn existential_is_not_universal() {
        let v = equivalent(&p("exists x. m(x)"), &p("forall x. m(x)"), &FolSignature::default(), &EquivConfig::default());
        let Verdict::Counterexample { model, left, right, .. } = v else { panic!("{v:?}") };
        assert_eq!(model.universe, 2);
        assert_eq!(model.predicates["m"], BTreeSet::from([vec![0]]));
        assert!(left && !right);
    }

    #[test]
    fn model_space_enumeration_is_complete() {
        let sig = p("kills(Alice, Bob) & man(Bob)").symbols();
        let space = ModelSpace::new(&sig, 2);
        assert_eq!(space.count(), Some(2 * 2 * 16 * 4));
        let all: BTreeSet<String> =
            (0..space.count().unwrap()).map(|i| serde_json::to_string(&space.model(i)).unwrap()).collect();
        assert_eq!(all.len() as u128, space.count().unwrap());
    }

    #[test]
    fn sampling_beyond_budget_is_deterministic() {
        let sig = p("r(Alice, Bob) & q(Bob, Alice)").symbols();
        let cfg = EquivConfig { max_universe: 3, budget: 10, samples: 7, seed: 3 };
        let (a, exhaustive) = cfg.models(&sig);
        let (b, _) = cfg.models(&sig);
        assert!(!exhaustive);
        // size 1 has 4 models, within budget
        assert_eq!(a.len(), 4 + 7 + 7);
        assert_eq!(a, b);
    }

    #[test]
    fn singleton_rewrite_examples() {
        let singles = BTreeSet::from(["Alice".to_string()]);
        assert_eq!(singleton_rewrite(&p("exists x. Alice(x) & sleeps(x)"), &singles), p("sleeps(Alice)"));
        let plain = p("exists x. man(x) & ~hot(x)");
        assert_eq!(singleton_rewrite(&plain, &singles), plain);
        let kills = p("exists x0. exists x1. Alice(x0) & mortal(x1) & kills(x0, x1)");
        let rw = singleton_rewrite(&kills, &singles);
        assert!(rw.alpha_eq(&p("exists x. mortal(x) & kills(Alice, x)")), "{rw}");
    }
}
