//! Simply-typed lambda calculus over diagram and logic constants.

mod eval;
mod parse;
mod reduce;
mod typing;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::fresh_name;
use crate::types::{ObjExpr, ObjItem};

pub(crate) use eval::forget_rigid_insts;
pub use eval::{eval_closed, Value};
pub use parse::parse_term;
pub use reduce::{beta_normalize, is_normal, normalize_with, Strategy};
pub use typing::{check, elaborate, typecheck, ConstantTable, EvalRule, Scheme};

/// Constant names with dedicated surface syntax.
pub mod names {
    pub const COMPOSE: &str = "compose";
    pub const TENSOR: &str = "tensor";
    pub const CUT: &str = "cut";
    pub const TRANSPOSE: &str = "transpose";
    pub const ID: &str = "id";
    pub const SPIDER: &str = "spider";
    pub const CUP: &str = "cup";
    pub const CAP: &str = "cap";
    pub const SWAP: &str = "swap";
    pub const NOT: &str = "not";
    pub const AND: &str = "and";
    pub const OR: &str = "or";
    pub const IMPLIES: &str = "implies";
    pub const TOP: &str = "true";
    pub const BOTTOM: &str = "false";
    pub const FORALL: &str = "forall";
    pub const EXISTS: &str = "exists";
    pub const EQUALS: &str = "equals";
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// A constant with numeric indices (the legs of `spider(m, n)`) and the
    /// instantiation of its scheme's shape variables.
    Const { name: String, indices: Vec<usize>, inst: BTreeMap<String, ObjExpr> },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const { name: name.to_string(), indices: Vec::new(), inst: BTreeMap::new() }
    }

    pub fn lam(binder: &str, body: Term) -> Term {
        Term::Lam(binder.to_string(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// `second ∘ first`.
    pub fn compose(first: Term, second: Term) -> Term {
        Term::apps(Term::constant(names::COMPOSE), [first, second])
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::Lam(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                Term::Const { .. } => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lam(x, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
            Term::App(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
            Term::Const { .. } => {}
        }
    }

    /// Capture-avoiding `self[x := s]`.
    pub fn substitute(&self, x: &str, s: &Term) -> Term {
        let fv = s.free_vars();
        self.subst(x, s, &fv)
    }

    fn subst(&self, x: &str, s: &Term, fv: &BTreeSet<String>) -> Term {
        match self {
            Term::Var(y) if y == x => s.clone(),
            Term::Var(_) | Term::Const { .. } => self.clone(),
            Term::App(f, a) => Term::app(f.subst(x, s, fv), a.subst(x, s, fv)),
            Term::Lam(y, _) if y == x => self.clone(),
            Term::Lam(y, b) => {
                if fv.contains(y) && b.free_vars().contains(x) {
                    let mut avoid = fv.clone();
                    b.all_names(&mut avoid);
                    avoid.insert(x.to_string());
                    let z = fresh_name(y, &avoid);
                    let b = b.subst(y, &Term::Var(z.clone()), &BTreeSet::from([z.clone()]));
                    Term::lam(&z, b.subst(x, s, fv))
                } else {
                    Term::lam(y, b.subst(x, s, fv))
                }
            }
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        fn go<'a>(a: &'a Term, b: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    let bx = env.iter().rev().position(|(l, _)| l == x);
                    let by = env.iter().rev().position(|(_, r)| r == y);
                    match (bx, by) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (Term::Lam(x, s), Term::Lam(y, t)) => {
                    env.push((x, y));
                    let r = go(s, t, env);
                    env.pop();
                    r
                }
                (Term::App(f, a), Term::App(g, b)) => go(f, g, env) && go(a, b, env),
                (
                    Term::Const { name: n, indices: i, inst: s },
                    Term::Const { name: m, indices: j, inst: t },
                ) => n == m && i == j && s.iter().all(|(k, v)| t.get(k).is_none_or(|w| v == w)),
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const { .. } => 1,
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

// Precedence levels used by the printer and the parser.
const BINDER: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const COMPOSE: u8 = 5;
const TENSOR: u8 = 6;
const UNARY: u8 = 7;
const CALL: u8 = 8;

fn concrete_objs(e: &ObjExpr) -> Option<String> {
    if e.0.iter().all(|i| matches!(i, ObjItem::Obj(_))) {
        Some(e.to_string())
    } else {
        None
    }
}

fn is_binary(t: &Term, op: &str) -> bool {
    let (head, args) = t.spine();
    matches!(head, Term::Const { name, .. } if name == op) && args.len() == 2
}

fn write_term(t: &Term, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (head, args) = t.spine();
    let paren = |level: u8| prec > level;
    let open = |f: &mut fmt::Formatter<'_>, p: bool| if p { write!(f, "(") } else { Ok(()) };
    let close = |f: &mut fmt::Formatter<'_>, p: bool| if p { write!(f, ")") } else { Ok(()) };

    if let Term::Lam(..) = t {
        let p = paren(BINDER);
        open(f, p)?;
        let mut binders = Vec::new();
        let mut body = t;
        while let Term::Lam(x, b) = body {
            binders.push(x.as_str());
            body = b;
        }
        write!(f, "λ{}. ", binders.join(" "))?;
        write_term(body, BINDER, f)?;
        return close(f, p);
    }

    if let Term::Const { name, indices, inst } = head {
        let infix = |f: &mut fmt::Formatter<'_>, level: u8, op: &str, l: &Term, r: &Term, right_assoc: bool| {
            let p = paren(level);
            open(f, p)?;
            write_term(l, if right_assoc { level + 1 } else { level }, f)?;
            write!(f, " {op} ")?;
            write_term(r, if right_assoc { level } else { level + 1 }, f)?;
            close(f, p)
        };
        match (name.as_str(), args.as_slice()) {
            (names::COMPOSE, [a, b]) => {
                // tensors inside a composition are always parenthesised
                let p = paren(COMPOSE);
                open(f, p)?;
                let left = if is_binary(b, names::COMPOSE) { COMPOSE } else { TENSOR + 1 };
                write_term(b, left, f)?;
                write!(f, " ∘ ")?;
                write_term(a, TENSOR + 1, f)?;
                return close(f, p);
            }
            (names::TENSOR, [a, b]) => return infix(f, TENSOR, "⊗", a, b, false),
            (names::AND, [a, b]) => return infix(f, AND, "∧", a, b, false),
            (names::OR, [a, b]) => return infix(f, OR, "∨", a, b, false),
            (names::IMPLIES, [a, b]) => return infix(f, IMPLIES, "→", a, b, true),
            (names::NOT, [a]) => {
                let p = paren(UNARY);
                open(f, p)?;
                write!(f, "¬")?;
                write_term(a, UNARY, f)?;
                return close(f, p);
            }
            (names::TRANSPOSE, [a]) => {
                write_term(a, CALL + 1, f)?;
                return write!(f, "ᵀ");
            }
            (names::FORALL | names::EXISTS, [Term::Lam(x, body)]) => {
                let p = paren(BINDER);
                open(f, p)?;
                let q = if name == names::FORALL { "∀" } else { "∃" };
                write!(f, "{q}{x}. ")?;
                write_term(body, BINDER, f)?;
                return close(f, p);
            }
            _ => {}
        }
        match name.as_str() {
            names::TOP if args.is_empty() => return write!(f, "⊤"),
            names::BOTTOM if args.is_empty() => return write!(f, "⊥"),
            names::ID if args.is_empty() => {
                if let Some(objs) = inst.get("x").and_then(concrete_objs) {
                    return write!(f, "id({objs})");
                }
            }
            names::SPIDER if args.is_empty() && indices.len() == 2 => {
                return match inst.get("a").and_then(concrete_objs) {
                    Some(o) => write!(f, "spider({}, {}, {o})", indices[0], indices[1]),
                    None => write!(f, "spider({}, {})", indices[0], indices[1]),
                };
            }
            names::CUP | names::CAP if args.is_empty() => {
                if let Some(o) = inst.get("a").and_then(concrete_objs) {
                    return write!(f, "{name}({o})");
                }
            }
            names::SWAP if args.is_empty() => {
                if let (Some(a), Some(b)) =
                    (inst.get("a").and_then(concrete_objs), inst.get("b").and_then(concrete_objs))
                {
                    return write!(f, "swap({a}, {b})");
                }
            }
            _ => {}
        }
    }

    match head {
        Term::Var(x) => write!(f, "{x}")?,
        Term::Const { name, .. } => write!(f, "{name}")?,
        Term::Lam(..) => {
            write!(f, "(")?;
            write_term(head, BINDER, f)?;
            write!(f, ")")?;
        }
        Term::App(..) => unreachable!("spine head is never an application"),
    }
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write_term(a, BINDER, f)?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

/// Prints in the surface syntax accepted by [`parse_term`].
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, BINDER, f)
    }
}
