use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::typing::ground_shape;
use super::{beta_normalize, elaborate, ConstantTable, EvalRule, Term};
use crate::diagram::{self, Diagram};
use crate::error::{Error, Result};
use crate::logic::{fresh_name, FolTerm, Formula, EQUALITY};
use crate::types::{ObjItem, SemType, Signature};

/// Result of evaluating a closed term of ground type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Value {
    Diagram(Diagram),
    Formula(Formula),
}

impl Value {
    pub fn as_diagram(&self) -> Option<&Diagram> {
        match self {
            Value::Diagram(d) => Some(d),
            Value::Formula(_) => None,
        }
    }

    pub fn as_formula(&self) -> Option<&Formula> {
        match self {
            Value::Formula(f) => Some(f),
            Value::Diagram(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Diagram(d) => write!(f, "{d}"),
            Value::Formula(x) => write!(f, "{x}"),
        }
    }
}

enum Val {
    D(Diagram),
    F(Formula),
    T(FolTerm),
}

/// Folds the constants of a closed term of type `(x, y)` or `φ` through
/// their evaluation rules.
pub fn eval_closed(t: &Term, consts: &ConstantTable, sig: &Signature) -> Result<Value> {
    if !t.is_closed() {
        return Err(Error::Type(format!("`{t}` has free variables {:?}", t.free_vars())));
    }
    let t = forget_rigid_insts(&beta_normalize(t));
    let (ty, t) = elaborate(&t, &BTreeMap::new(), consts)?;
    let ground = matches!(ty, SemType::Form) || ground_shape(&ty).is_some();
    if !ground {
        return Err(Error::Type(format!("`{t}` has type {ty}, which is neither a diagram shape nor φ")));
    }
    let mut ev = Eval { consts, sig, scope: Vec::new() };
    match ev.eval(&t)? {
        Val::D(d) => Ok(Value::Diagram(d)),
        Val::F(f) => Ok(Value::Formula(f)),
        Val::T(_) => Err(Error::Type(format!("`{t}` is an individual, not a diagram or formula"))),
    }
}

/// Drops instantiations that mention bound list variables. They were solved
/// inside a polymorphic lambda and no longer hold once it is applied.
pub(crate) fn forget_rigid_insts(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, b) => Term::lam(x, forget_rigid_insts(b)),
        Term::App(f, a) => Term::app(forget_rigid_insts(f), forget_rigid_insts(a)),
        Term::Const { name, indices, inst } => Term::Const {
            name: name.clone(),
            indices: indices.clone(),
            inst: inst
                .iter()
                .filter(|(_, e)| !e.0.iter().any(|i| matches!(i, ObjItem::Param(_))))
                .map(|(k, e)| (k.clone(), e.clone()))
                .collect(),
        },
    }
}

struct Eval<'a> {
    consts: &'a ConstantTable,
    sig: &'a Signature,
    scope: Vec<String>,
}

impl Eval<'_> {
    fn diagram(&mut self, t: &Term) -> Result<Diagram> {
        match self.eval(t)? {
            Val::D(d) => Ok(d),
            _ => Err(Error::Type(format!("`{t}` does not evaluate to a diagram"))),
        }
    }

    fn formula(&mut self, t: &Term) -> Result<Formula> {
        match self.eval(t)? {
            Val::F(f) => Ok(f),
            _ => Err(Error::Type(format!("`{t}` does not evaluate to a formula"))),
        }
    }

    fn individual(&mut self, t: &Term) -> Result<FolTerm> {
        match self.eval(t)? {
            Val::T(x) => Ok(x),
            _ => Err(Error::Type(format!("`{t}` does not evaluate to an individual"))),
        }
    }

    fn quantifier(&mut self, arg: &Term, universal: bool) -> Result<Formula> {
        let (x, body) = match arg {
            Term::Lam(x, body) => (x.clone(), (**body).clone()),
            other => {
                let avoid: BTreeSet<String> = self.scope.iter().cloned().collect();
                let x = fresh_name("x", &avoid);
                (x.clone(), Term::app(other.clone(), Term::Var(x)))
            }
        };
        self.scope.push(x.clone());
        let body = self.formula(&body);
        self.scope.pop();
        let body = body?;
        Ok(if universal { Formula::forall(&x, body) } else { Formula::exists(&x, body) })
    }

    fn eval(&mut self, t: &Term) -> Result<Val> {
        let (head, args) = t.spine();
        let name = match head {
            Term::Var(x) if args.is_empty() && self.scope.contains(x) => return Ok(Val::T(FolTerm::Var(x.clone()))),
            Term::Var(x) => return Err(Error::Unsupported(format!("residual variable {x} in `{t}`"))),
            Term::Lam(..) => return Err(Error::Unsupported(format!("residual lambda at ground type: `{t}`"))),
            Term::App(..) => unreachable!("spine head is never an application"),
            Term::Const { name, .. } => name,
        };
        let Term::Const { indices, inst, .. } = head else { unreachable!() };
        let (_, rule) = self
            .consts
            .get(name)
            .ok_or_else(|| Error::MissingSymbol(format!("unknown constant {name}")))?;
        if args.len() != rule.arity() {
            return Err(Error::Unsupported(format!(
                "`{name}` expects {} argument(s) but has {} in `{t}`",
                rule.arity(),
                args.len()
            )));
        }
        let objects = |k: &str| {
            inst.get(k)
                .and_then(|e| e.as_ty())
                .ok_or_else(|| Error::Ambiguous(format!("shape variable {k} of `{name}` is not concrete")))
        };
        let object = |k: &str| {
            let ty = objects(k)?;
            match ty.0.as_slice() {
                [o] => Ok(o.clone()),
                _ => Err(Error::Shape(format!("`{name}` needs a single object, got {ty}"))),
            }
        };
        Ok(match rule.clone() {
            EvalRule::Box { name, .. } => {
                let fillings = args.iter().map(|a| self.diagram(a)).collect::<Result<Vec<_>>>()?;
                Val::D(diagram::box_(self.sig, &name, fillings)?)
            }
            EvalRule::Compose => {
                let (a, b) = (self.diagram(args[0])?, self.diagram(args[1])?);
                Val::D(diagram::compose(&a, &b)?)
            }
            EvalRule::Tensor => {
                let (a, b) = (self.diagram(args[0])?, self.diagram(args[1])?);
                Val::D(diagram::tensor(&a, &b))
            }
            EvalRule::Cut => Val::D(diagram::cut(&self.diagram(args[0])?)),
            EvalRule::Transpose => Val::D(diagram::transpose(&self.diagram(args[0])?)?),
            EvalRule::Id => Val::D(diagram::identity(self.sig, &objects("x")?)?),
            EvalRule::Spider => {
                let o = object("a")?;
                Val::D(Diagram::spider(indices[0], indices[1], &o))
            }
            EvalRule::Cup => Val::D(Diagram::cup(&object("a")?)),
            EvalRule::Cap => Val::D(Diagram::cap(&object("a")?)),
            EvalRule::Swap => Val::D(Diagram::swap(&object("a")?, &object("b")?)),
            EvalRule::Constant => Val::T(FolTerm::Const(name.clone())),
            EvalRule::Predicate(_) => {
                let terms = args.iter().map(|a| self.individual(a)).collect::<Result<Vec<_>>>()?;
                Val::F(Formula::atom(name, terms))
            }
            EvalRule::Equals => {
                let (a, b) = (self.individual(args[0])?, self.individual(args[1])?);
                Val::F(Formula::atom(EQUALITY, vec![a, b]))
            }
            EvalRule::Not => Val::F(Formula::not(self.formula(args[0])?)),
            EvalRule::And => Val::F(Formula::and(self.formula(args[0])?, self.formula(args[1])?)),
            EvalRule::Or => Val::F(Formula::or(self.formula(args[0])?, self.formula(args[1])?)),
            EvalRule::Implies => Val::F(Formula::implies(self.formula(args[0])?, self.formula(args[1])?)),
            EvalRule::Top => Val::F(Formula::Top),
            EvalRule::Bottom => Val::F(Formula::Bottom),
            EvalRule::Forall => Val::F(self.quantifier(args[0], true)?),
            EvalRule::Exists => Val::F(self.quantifier(args[0], false)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;
    use crate::logic::{parse_formula, FolSignature};
    use crate::types::{BoxDecl, Ty};

    fn sig() -> Signature {
        Signature::new(["N"])
            .with_box(BoxDecl::new("car", Ty::unit(), Ty::of(&["N"])))
            .with_box(BoxDecl::new("big", Ty::of(&["N"]), Ty::of(&["N"])))
            .with_box(BoxDecl::new("man", Ty::unit(), Ty::of(&["N"])))
            .with_box(BoxDecl::new("hot", Ty::unit(), Ty::of(&["N"])))
    }

    fn run(src: &str) -> Result<Value> {
        let s = sig();
        eval_closed(&parse_term(src).unwrap(), &ConstantTable::diagrams(&s).unwrap(), &s)
    }

    #[test]
    fn big_big_car() {
        let d = run("(λf x. f (f x)) (λx. big ∘ x) car").unwrap();
        let Value::Diagram(d) = d else { panic!() };
        assert_eq!(d.boxes(), vec!["car", "big", "big"]);
        assert_eq!(d.shape(), (Ty::unit(), Ty::of(&["N"])).into());
    }

    #[test]
    fn mans_not_hot_is_a_cut_scalar() {
        let Value::Diagram(d) = run("cut(hotᵀ ∘ id(N)) ∘ man").unwrap() else { panic!() };
        assert_eq!(d.shape(), (Ty::unit(), Ty::unit()).into());
        let cuts = format!("{d}").matches("cut(").count();
        assert_eq!(cuts, 1);
    }

    #[test]
    fn residual_lambdas_are_rejected() {
        assert!(run("λx. x").is_err());
        assert!(run("compose(car)").is_err());
    }

    #[test]
    fn formulas() {
        let mut fs = FolSignature::default();
        fs.constants.insert("Alice".into());
        fs.predicates.insert("sleeps".into(), 1);
        fs.predicates.insert("man".into(), 1);
        let table = ConstantTable::logic(&fs).unwrap();
        let ev = |s: &str| eval_closed(&parse_term(s).unwrap(), &table, &Signature::default()).unwrap();
        assert_eq!(ev("(λP. P Alice) sleeps"), Value::Formula(parse_formula("sleeps(Alice)").unwrap()));
        assert_eq!(
            ev("(λP Q. ∀x. P x → Q x) man sleeps"),
            Value::Formula(parse_formula("forall x. man(x) -> sleeps(x)").unwrap())
        );
        // η-short quantifier argument
        assert_eq!(ev("exists(man)"), Value::Formula(parse_formula("exists x0. man(x0)").unwrap()));
        assert_eq!(ev("equals Alice Alice").to_string(), "Alice = Alice");
    }
}
