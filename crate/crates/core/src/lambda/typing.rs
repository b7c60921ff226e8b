//! Constant schemes and bidirectional type inference with shape unification.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{names, Term};
use crate::error::{Error, Result};
use crate::logic::FolSignature;
use crate::types::{ObjExpr, ObjItem, ShapeExpr, SemType, Signature, Ty};

/// A type under prenex shape binders. Variables listed in `single` range
/// over single objects rather than object lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    pub vars: Vec<String>,
    pub single: BTreeSet<String>,
    pub ty: SemType,
}

impl Scheme {
    pub fn mono(ty: SemType) -> Self {
        Scheme { vars: Vec::new(), single: BTreeSet::new(), ty }
    }

    fn poly(vars: &[&str], single: &[&str], ty: SemType) -> Self {
        Scheme {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            single: single.iter().map(|v| v.to_string()).collect(),
            ty,
        }
    }
}

/// How a fully applied constant acts on its evaluated arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalRule {
    /// A signature box; the arguments fill its holes in order.
    Box { name: String, holes: usize },
    Compose,
    Tensor,
    Cut,
    Transpose,
    Id,
    Spider,
    Cup,
    Cap,
    Swap,
    Predicate(usize),
    Constant,
    Equals,
    Not,
    And,
    Or,
    Implies,
    Top,
    Bottom,
    Forall,
    Exists,
}

impl EvalRule {
    pub fn arity(&self) -> usize {
        match self {
            EvalRule::Box { holes, .. } => *holes,
            EvalRule::Predicate(k) => *k,
            EvalRule::Compose | EvalRule::Tensor | EvalRule::Equals => 2,
            EvalRule::And | EvalRule::Or | EvalRule::Implies => 2,
            EvalRule::Cut | EvalRule::Transpose | EvalRule::Not => 1,
            EvalRule::Forall | EvalRule::Exists => 1,
            _ => 0,
        }
    }
}

fn arrow_spine(t: &SemType) -> usize {
    match t {
        SemType::Arrow(_, b) => 1 + arrow_spine(b),
        SemType::Forall(_, b) => arrow_spine(b),
        _ => 0,
    }
}

fn p(name: &str) -> ObjExpr {
    ObjExpr::param(name)
}

fn dg(dom: ObjExpr, cod: ObjExpr) -> SemType {
    SemType::Diag(ShapeExpr::new(dom, cod))
}

/// Typed constants available to meaning terms, with their evaluation rules.
#[derive(Debug, Clone, Default)]
pub struct ConstantTable {
    entries: BTreeMap<String, (Scheme, EvalRule)>,
}

impl ConstantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, scheme: Scheme, rule: EvalRule) -> Result<()> {
        if self.entries.contains_key(name) {
            return Err(Error::Lexicon(vec![format!("constant {name} is defined twice")]));
        }
        if rule != EvalRule::Transpose && rule != EvalRule::Spider && arrow_spine(&scheme.ty) != rule.arity() {
            return Err(Error::Type(format!(
                "constant {name}: scheme {} does not match an evaluation rule of arity {}",
                scheme.ty,
                rule.arity()
            )));
        }
        self.entries.insert(name.to_string(), (scheme, rule));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&(Scheme, EvalRule)> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// The diagram primitives plus one constant per box of `sig`. A box
    /// with holes is a function from its fillings to the box.
    pub fn diagrams(sig: &Signature) -> Result<Self> {
        let mut t = ConstantTable::new();
        let (x, y, z) = (p("x"), p("y"), p("z"));
        t.insert(
            names::COMPOSE,
            Scheme::poly(
                &["x", "y", "z"],
                &[],
                SemType::arrow(dg(x.clone(), y.clone()), SemType::arrow(dg(y.clone(), z.clone()), dg(x.clone(), z))),
            ),
            EvalRule::Compose,
        )?;
        let (a, b, c, d) = (p("a"), p("b"), p("c"), p("d"));
        t.insert(
            names::TENSOR,
            Scheme::poly(
                &["a", "b", "c", "d"],
                &[],
                SemType::arrow(
                    dg(a.clone(), b.clone()),
                    SemType::arrow(dg(c.clone(), d.clone()), dg(a.concat(&c), b.concat(&d))),
                ),
            ),
            EvalRule::Tensor,
        )?;
        t.insert(
            names::CUT,
            Scheme::poly(&["x", "y"], &[], SemType::arrow(dg(x.clone(), y.clone()), dg(x.clone(), y.clone()))),
            EvalRule::Cut,
        )?;
        t.insert(names::TRANSPOSE, Scheme::mono(SemType::Form), EvalRule::Transpose)?;
        t.insert(names::ID, Scheme::poly(&["x"], &[], dg(x.clone(), x)), EvalRule::Id)?;
        t.insert(names::SPIDER, Scheme::poly(&["a"], &["a"], SemType::Form), EvalRule::Spider)?;
        t.insert(names::CUP, Scheme::poly(&["a"], &["a"], dg(a.concat(&a), ObjExpr::default())), EvalRule::Cup)?;
        t.insert(names::CAP, Scheme::poly(&["a"], &["a"], dg(ObjExpr::default(), a.concat(&a))), EvalRule::Cap)?;
        t.insert(names::SWAP, Scheme::poly(&["a", "b"], &["a", "b"], dg(a.concat(&b), b.concat(&a))), EvalRule::Swap)?;
        for decl in &sig.boxes {
            let ty = decl.holes.iter().rev().fold(SemType::diag(&decl.dom, &decl.cod), |acc, h| {
                SemType::arrow(SemType::diag(&h.dom, &h.cod), acc)
            });
            t.insert(&decl.name, Scheme::mono(ty), EvalRule::Box { name: decl.name.clone(), holes: decl.holes.len() })?;
        }
        Ok(t)
    }

    /// Connectives, quantifiers, equality and the symbols of `sig`.
    pub fn logic(sig: &FolSignature) -> Result<Self> {
        let mut t = ConstantTable::new();
        let form = || SemType::Form;
        let bin = || SemType::arrow(SemType::Form, SemType::arrow(SemType::Form, SemType::Form));
        let quant = || SemType::arrow(SemType::arrow(SemType::Term, SemType::Form), SemType::Form);
        t.insert(names::NOT, Scheme::mono(SemType::arrow(form(), form())), EvalRule::Not)?;
        t.insert(names::AND, Scheme::mono(bin()), EvalRule::And)?;
        t.insert(names::OR, Scheme::mono(bin()), EvalRule::Or)?;
        t.insert(names::IMPLIES, Scheme::mono(bin()), EvalRule::Implies)?;
        t.insert(names::TOP, Scheme::mono(form()), EvalRule::Top)?;
        t.insert(names::BOTTOM, Scheme::mono(form()), EvalRule::Bottom)?;
        t.insert(names::FORALL, Scheme::mono(quant()), EvalRule::Forall)?;
        t.insert(names::EXISTS, Scheme::mono(quant()), EvalRule::Exists)?;
        t.insert(
            names::EQUALS,
            Scheme::mono(SemType::arrow(SemType::Term, SemType::arrow(SemType::Term, form()))),
            EvalRule::Equals,
        )?;
        for c in &sig.constants {
            t.insert(c, Scheme::mono(SemType::Term), EvalRule::Constant)?;
        }
        for (name, &arity) in &sig.predicates {
            let ty = (0..arity).fold(form(), |acc, _| SemType::arrow(SemType::Term, acc));
            t.insert(name, Scheme::mono(ty), EvalRule::Predicate(arity))?;
        }
        Ok(t)
    }
}

fn subst_param(t: &SemType, name: &str, with: &ObjExpr) -> SemType {
    let list = |e: &ObjExpr| {
        ObjExpr(
            e.0.iter()
                .flat_map(|i| match i {
                    ObjItem::Param(q) if q == name => with.0.clone(),
                    other => vec![other.clone()],
                })
                .collect(),
        )
    };
    match t {
        SemType::Diag(s) => SemType::Diag(ShapeExpr::new(list(&s.dom), list(&s.cod))),
        SemType::Arrow(a, b) => SemType::arrow(subst_param(a, name, with), subst_param(b, name, with)),
        SemType::Forall(v, _) if v == name => t.clone(),
        SemType::Forall(v, b) => SemType::forall(v, subst_param(b, name, with)),
        other => other.clone(),
    }
}

fn is_rigid(i: &ObjItem) -> bool {
    !matches!(i, ObjItem::Meta(_))
}

struct Infer<'a> {
    consts: &'a ConstantTable,
    next: u32,
    tys: HashMap<u32, SemType>,
    lists: HashMap<u32, ObjExpr>,
    single: BTreeSet<u32>,
    deferred: Vec<(ObjExpr, ObjExpr, String)>,
    bindings: usize,
}

type Unify = std::result::Result<(), ()>;

impl<'a> Infer<'a> {
    fn new(consts: &'a ConstantTable) -> Self {
        Infer {
            consts,
            next: 0,
            tys: HashMap::new(),
            lists: HashMap::new(),
            single: BTreeSet::new(),
            deferred: Vec::new(),
            bindings: 0,
        }
    }

    fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next
    }

    fn fresh_ty(&mut self) -> SemType {
        SemType::Meta(self.fresh())
    }

    fn zonk_list(&self, e: &ObjExpr) -> ObjExpr {
        ObjExpr(
            e.0.iter()
                .flat_map(|i| match i {
                    ObjItem::Meta(m) => match self.lists.get(m) {
                        Some(b) => self.zonk_list(b).0,
                        None => vec![i.clone()],
                    },
                    other => vec![other.clone()],
                })
                .collect(),
        )
    }

    fn zonk(&self, t: &SemType) -> SemType {
        match t {
            SemType::Meta(m) => match self.tys.get(m) {
                Some(b) => self.zonk(b),
                None => t.clone(),
            },
            SemType::Diag(s) => SemType::Diag(ShapeExpr::new(self.zonk_list(&s.dom), self.zonk_list(&s.cod))),
            SemType::Arrow(a, b) => SemType::arrow(self.zonk(a), self.zonk(b)),
            SemType::Forall(v, b) => SemType::forall(v, self.zonk(b)),
            other => other.clone(),
        }
    }

    fn zonk_term(&self, t: &Term) -> Term {
        match t {
            Term::Const { name, indices, inst } => Term::Const {
                name: name.clone(),
                indices: indices.clone(),
                inst: inst.iter().map(|(k, v)| (k.clone(), self.zonk_list(v))).collect(),
            },
            Term::Lam(x, b) => Term::lam(x, self.zonk_term(b)),
            Term::App(f, a) => Term::app(self.zonk_term(f), self.zonk_term(a)),
            Term::Var(_) => t.clone(),
        }
    }

    fn bind_list(&mut self, m: u32, e: ObjExpr) -> Unify {
        if e.0.contains(&ObjItem::Meta(m)) {
            return if e.0.len() == 1 { Ok(()) } else { Err(()) };
        }
        if self.single.contains(&m) {
            match e.0.as_slice() {
                [ObjItem::Meta(n)] => {
                    self.single.insert(*n);
                }
                [_] => {}
                _ => return Err(()),
            }
        }
        self.lists.insert(m, e);
        self.bindings += 1;
        Ok(())
    }

    fn unify_list(&mut self, a: &ObjExpr, b: &ObjExpr, why: &str) -> Unify {
        let mut a = self.zonk_list(a).0;
        let mut b = self.zonk_list(b).0;
        loop {
            let before = a.len() + b.len();
            // common prefix, then common suffix
            for front in [true, false] {
                while let Some((x, y)) = match (front, a.first(), b.first(), a.last(), b.last()) {
                    (true, Some(x), Some(y), _, _) | (false, _, _, Some(x), Some(y)) => Some((x.clone(), y.clone())),
                    _ => None,
                } {
                    let pair_done = if x == y {
                        true
                    } else if is_rigid(&x) && is_rigid(&y) {
                        return Err(());
                    } else if let (ObjItem::Meta(m), ObjItem::Obj(_)) = (&x, &y) {
                        if !self.single.contains(m) {
                            break;
                        }
                        self.bind_list(*m, ObjExpr(vec![y.clone()]))?;
                        true
                    } else if let (ObjItem::Obj(_), ObjItem::Meta(m)) = (&x, &y) {
                        if !self.single.contains(m) {
                            break;
                        }
                        self.bind_list(*m, ObjExpr(vec![x.clone()]))?;
                        true
                    } else {
                        break;
                    };
                    if pair_done {
                        if front {
                            a.remove(0);
                            b.remove(0);
                        } else {
                            a.pop();
                            b.pop();
                        }
                        a = self.zonk_list(&ObjExpr(a)).0;
                        b = self.zonk_list(&ObjExpr(b)).0;
                    }
                }
            }
            if a.len() + b.len() == before {
                break;
            }
        }
        let all_free_metas = |v: &[ObjItem], s: &BTreeSet<u32>| {
            v.iter().all(|i| matches!(i, ObjItem::Meta(m) if !s.contains(m)))
        };
        match (a.as_slice(), b.as_slice()) {
            ([], []) => Ok(()),
            ([], rest) | (rest, []) => {
                if !all_free_metas(rest, &self.single) {
                    return Err(());
                }
                for i in rest.iter().cloned() {
                    if let ObjItem::Meta(m) = i {
                        self.bind_list(m, ObjExpr::default())?;
                    }
                }
                Ok(())
            }
            ([ObjItem::Meta(m)], rest) | (rest, [ObjItem::Meta(m)]) if !self.single.contains(m) => {
                let m = *m;
                self.bind_list(m, ObjExpr(rest.to_vec()))
            }
            ([ObjItem::Meta(m)], [single]) | ([single], [ObjItem::Meta(m)]) => {
                let (m, single) = (*m, single.clone());
                self.bind_list(m, ObjExpr(vec![single]))
            }
            _ => {
                self.deferred.push((ObjExpr(a), ObjExpr(b), why.to_string()));
                Ok(())
            }
        }
    }

    fn occurs(&self, m: u32, t: &SemType) -> bool {
        match self.zonk(t) {
            SemType::Meta(n) => n == m,
            SemType::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
            SemType::Forall(_, b) => self.occurs(m, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &SemType, b: &SemType, why: &str) -> Unify {
        let (a, b) = (self.zonk(a), self.zonk(b));
        match (&a, &b) {
            (SemType::Meta(m), SemType::Meta(n)) if m == n => Ok(()),
            (SemType::Meta(m), t) | (t, SemType::Meta(m)) => {
                if self.occurs(*m, t) {
                    return Err(());
                }
                self.tys.insert(*m, t.clone());
                self.bindings += 1;
                Ok(())
            }
            (SemType::Diag(s), SemType::Diag(r)) => {
                self.unify_list(&s.dom, &r.dom, why)?;
                self.unify_list(&s.cod, &r.cod, why)
            }
            (SemType::Arrow(a1, b1), SemType::Arrow(a2, b2)) => {
                self.unify(a1, a2, why)?;
                self.unify(b1, b2, why)
            }
            (SemType::Form, SemType::Form) | (SemType::Term, SemType::Term) => Ok(()),
            (SemType::Forall(v, b1), SemType::Forall(w, b2)) => {
                let sk = self.skolem(v);
                let b1 = subst_param(b1, v, &sk);
                let b2 = subst_param(b2, w, &sk);
                self.unify(&b1, &b2, why)
            }
            _ => Err(()),
        }
    }

    /// Retries postponed list equations until no more progress is made.
    fn solve(&mut self) -> Result<()> {
        loop {
            let before = self.bindings;
            let pending = std::mem::take(&mut self.deferred);
            for (a, b, why) in pending {
                if self.unify_list(&a, &b, &why).is_err() {
                    return Err(Error::Type(format!(
                        "{why}: object lists {} and {} do not match",
                        self.zonk_list(&a),
                        self.zonk_list(&b)
                    )));
                }
            }
            if self.bindings == before {
                return Ok(());
            }
        }
    }

    fn skolem(&mut self, v: &str) -> ObjExpr {
        let k = self.fresh();
        ObjExpr::param(&format!("{v}#{k}"))
    }

    fn instantiate(&mut self, t: &SemType) -> SemType {
        match t {
            SemType::Forall(v, b) => {
                let m = ObjExpr::meta(self.fresh());
                let b = subst_param(b, v, &m);
                self.instantiate(&b)
            }
            other => other.clone(),
        }
    }

    fn mismatch(&self, t: &Term, expected: &SemType, found: &SemType) -> Error {
        Error::Type(format!(
            "in `{t}`: expected {}, found {}",
            self.zonk(expected),
            self.zonk(found)
        ))
    }

    fn expect(&mut self, t: &Term, found: &SemType, expected: &SemType) -> Result<()> {
        let why = format!("in `{t}`");
        if self.unify(found, expected, &why).is_err() {
            return Err(self.mismatch(t, expected, found));
        }
        self.solve()
    }

    fn constant(&mut self, t: &Term) -> Result<(SemType, Term)> {
        let Term::Const { name, indices, inst } = t else { unreachable!() };
        let (scheme, rule) = self
            .consts
            .get(name)
            .ok_or_else(|| Error::MissingSymbol(format!("unknown constant {name}")))?
            .clone();
        let mut fresh = BTreeMap::new();
        for v in &scheme.vars {
            let m = self.fresh();
            if scheme.single.contains(v) {
                self.single.insert(m);
            }
            fresh.insert(v.clone(), ObjExpr::meta(m));
        }
        let ty = match rule {
            EvalRule::Transpose => {
                return Err(Error::Type(format!("`{name}` must be applied to a diagram")));
            }
            EvalRule::Spider => {
                let [m, n] = indices.as_slice() else {
                    return Err(Error::Type(format!("`{name}` needs two leg counts")));
                };
                let a = &fresh["a"];
                let rep = |k: usize| ObjExpr((0..k).flat_map(|_| a.0.clone()).collect());
                dg(rep(*m), rep(*n))
            }
            _ => fresh.iter().fold(scheme.ty.clone(), |ty, (v, m)| subst_param(&ty, v, m)),
        };
        for (k, given) in inst {
            let Some(m) = fresh.get(k) else {
                return Err(Error::Type(format!("`{name}` has no shape variable {k}")));
            };
            let m = m.clone();
            if self.unify_list(&m, given, &format!("in `{t}`")).is_err() {
                return Err(Error::Type(format!("in `{t}`: {k} cannot be {given}")));
            }
        }
        let elab = Term::Const { name: name.clone(), indices: indices.clone(), inst: fresh };
        Ok((ty, elab))
    }

    fn transpose(&mut self, ctx: &mut Vec<(String, SemType)>, arg: &Term, whole: &Term) -> Result<(SemType, Term)> {
        let (ta, ea) = self.infer(ctx, arg)?;
        self.solve()?;
        let ta = self.instantiate(&ta);
        let ta = self.zonk(&ta);
        let SemType::Diag(s) = &ta else {
            return Err(Error::Type(format!("in `{whole}`: only diagrams can be transposed, found {ta}")));
        };
        let reversible = |e: &ObjExpr| {
            e.0.iter().all(|i| match i {
                ObjItem::Obj(_) => true,
                ObjItem::Meta(m) => self.single.contains(m),
                ObjItem::Param(_) => false,
            })
        };
        let rev = |e: &ObjExpr| ObjExpr(e.0.iter().rev().cloned().collect());
        let ty = match (s.dom.0.is_empty(), s.cod.0.is_empty()) {
            (true, true) => ta.clone(),
            (true, false) if reversible(&s.cod) => dg(rev(&s.cod), ObjExpr::default()),
            (false, true) if reversible(&s.dom) => dg(ObjExpr::default(), rev(&s.dom)),
            (false, false) if s.dom.as_ty().is_some() && s.cod.as_ty().is_some() => {
                return Err(Error::Shape(format!(
                    "in `{whole}`: transpose needs a state or an effect, found {ta}"
                )))
            }
            _ => {
                return Err(Error::Ambiguous(format!(
                    "in `{whole}`: the shape {ta} must be known before transposing"
                )))
            }
        };
        Ok((ty, Term::app(Term::constant(names::TRANSPOSE), ea)))
    }

    fn infer(&mut self, ctx: &mut Vec<(String, SemType)>, t: &Term) -> Result<(SemType, Term)> {
        match t {
            Term::Var(x) => {
                let ty = ctx
                    .iter()
                    .rev()
                    .find(|(y, _)| y == x)
                    .map(|(_, ty)| ty.clone())
                    .ok_or_else(|| Error::Type(format!("unbound variable {x}")))?;
                Ok((self.instantiate(&ty), t.clone()))
            }
            Term::Const { .. } => self.constant(t),
            Term::Lam(x, body) => {
                let a = self.fresh_ty();
                ctx.push((x.clone(), a.clone()));
                let r = self.infer(ctx, body);
                ctx.pop();
                let (b, eb) = r?;
                Ok((SemType::arrow(a, b), Term::lam(x, eb)))
            }
            Term::App(f, a) => {
                let (head, args) = t.spine();
                if let Term::Lam(..) = head {
                    return self.redex(ctx, head, &args);
                }
                if let Term::Const { name, .. } = &**f {
                    if name == names::TRANSPOSE
                        && matches!(self.consts.get(name), Some((_, EvalRule::Transpose)))
                    {
                        return self.transpose(ctx, a, t);
                    }
                }
                let (tf, ef) = self.infer(ctx, f)?;
                let tf = self.zonk(&tf);
                let tf = self.instantiate(&tf);
                let tf = self.zonk(&tf);
                let (dom, cod) = match tf {
                    SemType::Arrow(d, c) => (*d, *c),
                    SemType::Meta(_) => {
                        let (d, c) = (self.fresh_ty(), self.fresh_ty());
                        self.expect(f, &tf, &SemType::arrow(d.clone(), c.clone()))?;
                        (d, c)
                    }
                    other => {
                        return Err(Error::Type(format!("`{f}` has type {other} and cannot be applied to `{a}`")))
                    }
                };
                let ea = self.check(ctx, a, &dom)?;
                Ok((cod, Term::app(ef, ea)))
            }
        }
    }

    /// Types `(λx1 .. xk. body) a1 .. an` by typing the arguments first and
    /// binding each `xi` to the type of `ai`, so that what the body does with
    /// a bound variable is known from its argument.
    fn redex(&mut self, ctx: &mut Vec<(String, SemType)>, head: &Term, args: &[&Term]) -> Result<(SemType, Term)> {
        let mut typed = Vec::new();
        for a in args {
            let (ta, ea) = self.infer(ctx, a)?;
            typed.push((self.zonk(&ta), ea));
        }
        let mut body = head;
        let mut binders = Vec::new();
        while let (Term::Lam(x, b), Some((ta, _))) = (body, typed.get(binders.len())) {
            ctx.push((x.clone(), ta.clone()));
            binders.push(x.clone());
            body = b;
        }
        let r = self.infer(ctx, body);
        ctx.truncate(ctx.len() - binders.len());
        let (mut ty, eb) = r?;
        for (a, (ta, _)) in args.iter().zip(&typed).skip(binders.len()) {
            let cod = self.fresh_ty();
            let ty_now = self.zonk(&ty);
            let ty_now = self.instantiate(&ty_now);
            self.expect(a, &SemType::arrow(ta.clone(), cod.clone()), &ty_now)?;
            ty = cod;
        }
        let lam = binders.iter().rev().fold(eb, |b, x| Term::lam(x, b));
        Ok((ty, Term::apps(lam, typed.into_iter().map(|(_, e)| e))))
    }

    fn check(&mut self, ctx: &mut Vec<(String, SemType)>, t: &Term, expected: &SemType) -> Result<Term> {
        let expected = self.zonk(expected);
        if let SemType::Forall(v, body) = &expected {
            let sk = self.skolem(v);
            return self.check(ctx, t, &subst_param(body, v, &sk));
        }
        if let Term::Lam(x, body) = t {
            let expected = if let SemType::Meta(_) = expected {
                let arrow = SemType::arrow(self.fresh_ty(), self.fresh_ty());
                self.expect(t, &expected, &arrow)?;
                arrow
            } else {
                expected
            };
            if let SemType::Arrow(a, b) = &expected {
                ctx.push((x.clone(), (**a).clone()));
                let r = self.check(ctx, body, b);
                ctx.pop();
                return Ok(Term::lam(x, r?));
            }
            return Err(Error::Type(format!("in `{t}`: expected {expected}, found a function")));
        }
        let (found, e) = self.infer(ctx, t)?;
        let found = self.zonk(&found);
        let found = self.instantiate(&found);
        self.expect(t, &found, &expected)?;
        Ok(e)
    }

    fn finish(&mut self) -> Result<()> {
        self.solve()?;
        if let Some((a, b, why)) = self.deferred.first() {
            return Err(Error::Ambiguous(format!(
                "{why}: cannot solve {} = {}",
                self.zonk_list(a),
                self.zonk_list(b)
            )));
        }
        Ok(())
    }

    fn metas_of(&self, t: &SemType, out: &mut Vec<u32>) {
        let mut list = |e: &ObjExpr| {
            for i in &self.zonk_list(e).0 {
                if let ObjItem::Meta(m) = i {
                    if !out.contains(m) {
                        out.push(*m);
                    }
                }
            }
        };
        match self.zonk(t) {
            SemType::Diag(s) => {
                list(&s.dom);
                list(&s.cod);
            }
            SemType::Arrow(a, b) => {
                self.metas_of(&a, out);
                self.metas_of(&b, out);
            }
            SemType::Forall(_, b) => self.metas_of(&b, out),
            _ => {}
        }
    }

    fn params_of(t: &SemType, out: &mut BTreeSet<String>) {
        match t {
            SemType::Diag(s) => {
                for i in s.dom.0.iter().chain(&s.cod.0) {
                    if let ObjItem::Param(p) = i {
                        out.insert(p.clone());
                    }
                }
            }
            SemType::Arrow(a, b) => {
                Self::params_of(a, out);
                Self::params_of(b, out);
            }
            SemType::Forall(v, b) => {
                out.insert(v.clone());
                Self::params_of(b, out);
            }
            _ => {}
        }
    }

    /// Quantifies over the list variables left in `ty` and rejects any
    /// other undetermined constant instantiation.
    fn generalize(&mut self, ty: &SemType, term: &Term) -> Result<(SemType, Term)> {
        let mut metas = Vec::new();
        self.metas_of(ty, &mut metas);
        let mut taken = BTreeSet::new();
        Self::params_of(&self.zonk(ty), &mut taken);
        let mut vars = Vec::new();
        for m in metas {
            let name = crate::logic::fresh_name("x", &taken);
            taken.insert(name.clone());
            self.lists.insert(m, ObjExpr::param(&name));
            vars.push(name);
        }
        let ty = vars.iter().rev().fold(self.zonk(ty), |b, v| SemType::forall(v, b));
        let term = self.zonk_term(term);
        undetermined(&term)?;
        Ok((ty, term))
    }
}

fn undetermined(t: &Term) -> Result<()> {
    match t {
        Term::Const { name, inst, .. } => {
            for (k, v) in inst {
                if v.0.iter().any(|i| matches!(i, ObjItem::Meta(_))) {
                    return Err(Error::Ambiguous(format!(
                        "cannot determine the shape variable {k} of `{name}` (found {v})"
                    )));
                }
            }
            Ok(())
        }
        Term::Lam(_, b) => undetermined(b),
        Term::App(f, a) => undetermined(f).and(undetermined(a)),
        Term::Var(_) => Ok(()),
    }
}

/// Infers the principal type of `t` and returns it together with `t` whose
/// constants carry their instantiations.
pub fn elaborate(t: &Term, ctx: &BTreeMap<String, SemType>, consts: &ConstantTable) -> Result<(SemType, Term)> {
    let mut inf = Infer::new(consts);
    let mut env: Vec<(String, SemType)> = ctx.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let (ty, e) = inf.infer(&mut env, t)?;
    inf.finish()?;
    inf.generalize(&ty, &e)
}

pub fn typecheck(t: &Term, ctx: &BTreeMap<String, SemType>, consts: &ConstantTable) -> Result<SemType> {
    elaborate(t, ctx, consts).map(|(ty, _)| ty)
}

/// Checks `t` against `expected`, returning the elaborated term.
pub fn check(t: &Term, expected: &SemType, ctx: &BTreeMap<String, SemType>, consts: &ConstantTable) -> Result<Term> {
    let mut inf = Infer::new(consts);
    let mut env: Vec<(String, SemType)> = ctx.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let e = inf.check(&mut env, t, expected)?;
    inf.finish()?;
    let e = inf.zonk_term(&e);
    undetermined(&e)?;
    Ok(e)
}

/// Shapes named in a type, for callers that need concrete boundaries.
pub(crate) fn ground_shape(t: &SemType) -> Option<(Ty, Ty)> {
    match t {
        SemType::Diag(s) => Some((s.dom.as_ty()?, s.cod.as_ty()?)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;
    use crate::types::BoxDecl;

    fn toy() -> ConstantTable {
        let sig = Signature::new(["N", "S"])
            .with_box(BoxDecl::new("car", Ty::unit(), Ty::of(&["N"])))
            .with_box(BoxDecl::new("big", Ty::of(&["N"]), Ty::of(&["N"])))
            .with_box(BoxDecl::new("man", Ty::unit(), Ty::of(&["N"])))
            .with_box(BoxDecl::new("mortal", Ty::unit(), Ty::of(&["N"])))
            .with_box(BoxDecl::new("Alice", Ty::unit(), Ty::of(&["N"])).singleton())
            .with_box(BoxDecl::new("kills", Ty::of(&["N"]), Ty::of(&["N"])))
            .with_box(BoxDecl::new("sleeps", Ty::of(&["N"]), Ty::unit()))
            .with_box(BoxDecl::new("loves", Ty::unit(), Ty::of(&["N", "S", "N"])))
            .with_box(BoxDecl::new("F", Ty::unit(), Ty::unit()).with_holes(vec![(Ty::unit(), Ty::unit()).into()]));
        ConstantTable::diagrams(&sig).unwrap()
    }

    fn ty(s: &str) -> SemType {
        SemType::parse(s).unwrap()
    }

    fn infer(src: &str) -> Result<SemType> {
        typecheck(&parse_term(src).unwrap(), &BTreeMap::new(), &toy()).map(|t| t.canonical())
    }

    #[test]
    fn twice() {
        let t = parse_term("λf x. f (f x)").unwrap();
        let expected = ty("((1, N) -> (1, N)) -> (1, N) -> (1, N)");
        check(&t, &expected, &BTreeMap::new(), &toy()).unwrap();
        // principal type is polymorphic in the (simple) type of x
        let principal = typecheck(&t, &BTreeMap::new(), &toy()).unwrap();
        assert!(matches!(principal, SemType::Arrow(..)), "{principal}");
    }

    #[test]
    fn composition_with_a_state_is_shape_polymorphic() {
        assert_eq!(infer("λf. f ∘ man").unwrap(), ty("forall x. (N, x) -> (1, x)").canonical());
        assert_eq!(infer("(λx. x) car").unwrap(), ty("(1, N)"));
        assert_eq!(infer("big ∘ big ∘ car").unwrap(), ty("(1, N)"));
    }

    #[test]
    fn determiners_check_against_products() {
        let p = "forall x. (N, x) -> (1, x)";
        let t = parse_term("λf g. g ∘ f").unwrap();
        check(&t, &ty(&format!("(1, N) -> {p}")), &BTreeMap::new(), &toy()).unwrap();
        let kills = parse_term("λP Q. Q(P(kills)ᵀ)").unwrap();
        let e = check(&kills, &ty(&format!("({p}) -> ({p}) -> (1, 1)")), &BTreeMap::new(), &toy()).unwrap();
        assert!(e.alpha_eq(&kills));
    }

    #[test]
    fn mismatch_names_the_subterm() {
        let err = infer("big ∘ sleeps").unwrap_err();
        assert_eq!(err.class(), "type-error");
        assert!(err.to_string().contains("in `big`"), "{err}");
        assert!(infer("car car").is_err());
        assert!(matches!(infer("nobody"), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn spider_object_is_inferred() {
        let t = parse_term("spider(2, 1) ∘ ((big ∘ car) ⊗ man)").unwrap();
        let (ty_, e) = elaborate(&t, &BTreeMap::new(), &toy()).unwrap();
        assert_eq!(ty_, ty("(1, N)"));
        assert_eq!(e.to_string(), "spider(2, 1, N) ∘ ((big ∘ car) ⊗ man)");
        assert!(matches!(infer("spider(2, 1)"), Ok(SemType::Forall(..))));
        assert!(infer("spider(1, 1, S) ∘ car").is_err());
    }

    #[test]
    fn ambiguity_is_reported() {
        // x and y are only known through their concatenation
        let err = infer("λf g. cup(N) ∘ (f ⊗ g) ∘ car").unwrap_err();
        assert!(matches!(err, Error::Ambiguous(_)), "{err}");
    }

    #[test]
    fn transposition() {
        assert_eq!(infer("(kills ∘ man)ᵀ").unwrap(), ty("(N, 1)"));
        assert_eq!(infer("sleepsᵀ").unwrap(), ty("(1, N)"));
        assert_eq!(infer("lovesᵀ").unwrap(), ty("(N S N, 1)"));
        assert_eq!(infer("killsᵀ").unwrap_err().class(), "shape-mismatch");
        assert_eq!(infer("(λf. fᵀ)").unwrap_err().class(), "type-error");
    }

    #[test]
    fn holes_take_diagrams() {
        assert_eq!(infer("F(sleeps ∘ car)").unwrap(), ty("(1, 1)"));
        assert!(infer("F(car)").is_err());
    }

    #[test]
    fn logic_constants() {
        let mut sig = FolSignature::default();
        sig.constants.insert("Alice".into());
        sig.predicates.insert("sleeps".into(), 1);
        sig.predicates.insert("man".into(), 1);
        let table = ConstantTable::logic(&sig).unwrap();
        let tc = |s: &str| typecheck(&parse_term(s).unwrap(), &BTreeMap::new(), &table);
        assert_eq!(tc("∀x. man x → sleeps x").unwrap(), SemType::Form);
        let SemType::Arrow(a, b) = tc("λP. P Alice").unwrap() else { panic!() };
        assert_eq!(*a, SemType::arrow(SemType::Term, (*b).clone()));
        assert!(tc("sleeps sleeps").is_err());
    }
}
