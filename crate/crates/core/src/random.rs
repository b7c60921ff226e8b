//! Seeded generators of well-typed diagrams, interpretations and lambda
//! terms, shared by the property tests and the acceptance battery.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::backends::{RelInterp, Tensor, VectInterp};
use crate::diagram::{compose, tensor, Diagram, Generator, LayeredForm};
use crate::lambda::{names, typecheck, ConstantTable, Term};
use crate::types::{BoxDecl, ObjExpr, SemType, Signature, Ty};

/// Objects used by the random diagrams.
pub const OBJECTS: [&str; 2] = ["A", "B"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramConfig {
    pub depth: usize,
    /// Longest boundary type drawn for a fresh box.
    pub width: usize,
    pub cuts: bool,
    pub holes: bool,
}

impl Default for DiagramConfig {
    fn default() -> Self {
        DiagramConfig { depth: 3, width: 2, cuts: true, holes: false }
    }
}

pub fn random_ty<R: Rng>(rng: &mut R, max_len: usize) -> Ty {
    let n = rng.gen_range(0..=max_len);
    Ty((0..n).map(|_| OBJECTS.choose(rng).unwrap().to_string()).collect())
}

/// Box names encode their shape, so a name always has one interpretation.
fn box_name(prefix: &str, dom: &Ty, cod: &Ty) -> String {
    format!("{prefix}_{}_{}", dom.0.concat(), cod.0.concat())
}

/// A random diagram with domain `dom`.
pub fn random_diagram<R: Rng>(rng: &mut R, dom: &Ty, cfg: &DiagramConfig) -> Diagram {
    if cfg.depth == 0 {
        return leaf(rng, dom, cfg);
    }
    let sub = DiagramConfig { depth: cfg.depth - 1, ..*cfg };
    match rng.gen_range(0..6) {
        0 | 1 => {
            let a = random_diagram(rng, dom, &sub);
            let b = random_diagram(rng, &a.cod(), &sub);
            compose(&a, &b).expect("boundaries agree")
        }
        2 => {
            let k = rng.gen_range(0..=dom.len());
            tensor(&random_diagram(rng, &dom.slice(0, k), &sub), &random_diagram(rng, &dom.slice(k, dom.len()), &sub))
        }
        3 if cfg.cuts => Diagram::cut(random_diagram(rng, dom, &sub)),
        _ => leaf(rng, dom, cfg),
    }
}

fn leaf<R: Rng>(rng: &mut R, dom: &Ty, cfg: &DiagramConfig) -> Diagram {
    let mut options: Vec<Diagram> = vec![Diagram::id(dom.clone())];
    let cod = random_ty(rng, cfg.width);
    options.push(Diagram::generator(&box_name("f", dom, &cod), dom.clone(), cod.clone()));
    options.push(Diagram::generator(&box_name("g", dom, &cod), dom.clone(), cod.clone()));
    if let Some(first) = dom.0.first() {
        if dom.0.iter().all(|o| o == first) {
            options.push(Diagram::spider(dom.len(), rng.gen_range(0..3), first));
        }
    } else {
        let o = OBJECTS.choose(rng).unwrap();
        options.push(Diagram::cap(o));
        options.push(Diagram::spider(0, rng.gen_range(1..3), o));
    }
    if dom.len() == 2 {
        options.push(Diagram::swap(&dom.0[0], &dom.0[1]));
        if dom.0[0] == dom.0[1] {
            options.push(Diagram::cup(&dom.0[0]));
        }
    }
    if cfg.holes && cfg.depth > 0 {
        let hole_dom = random_ty(rng, 1);
        let sub = DiagramConfig { depth: cfg.depth - 1, ..*cfg };
        let filling = random_diagram(rng, &hole_dom, &sub);
        let name = box_name(&format!("h_{}_{}", hole_dom.0.concat(), filling.cod().0.concat()), dom, &cod);
        options.push(Diagram::Box { name, dom: dom.clone(), cod, fillings: vec![filling] });
    }
    options.swap_remove(rng.gen_range(0..options.len()))
}

/// Every plain box of a diagram with its shape, including inside cuts.
pub fn box_shapes(d: &Diagram) -> BTreeMap<String, (Ty, Ty)> {
    fn go(f: &LayeredForm, out: &mut BTreeMap<String, (Ty, Ty)>) {
        for l in &f.layers {
            match &l.generator {
                Generator::Box { name, dom, cod, fillings } => {
                    out.insert(name.clone(), (dom.clone(), cod.clone()));
                    fillings.iter().for_each(|f| go(f, out));
                }
                Generator::Cut { inner } => go(inner, out),
                _ => {}
            }
        }
    }
    let mut out = BTreeMap::new();
    go(&LayeredForm::of(d), &mut out);
    out
}

fn dims_of(ty: &Ty, dims: &BTreeMap<String, usize>) -> Vec<usize> {
    ty.0.iter().map(|o| dims[o]).collect()
}

/// Random relations for every box of `d`, each object of size `dim`.
pub fn random_rel_interp<R: Rng>(rng: &mut R, d: &Diagram, dim: usize) -> RelInterp {
    let dims: BTreeMap<String, usize> = OBJECTS.iter().map(|o| (o.to_string(), dim)).collect();
    let boxes = box_shapes(d)
        .into_iter()
        .map(|(name, (dom, cod))| {
            let shape = dims_of(&dom.concat(&cod), &dims);
            let len = shape.iter().product();
            (name, Tensor { dims: shape, data: (0..len).map(|_| rng.gen_bool(0.5)).collect() })
        })
        .collect();
    RelInterp { dims, boxes }
}

/// Random real tensors for every box of `d`, each object of size `dim`.
pub fn random_vect_interp<R: Rng>(rng: &mut R, d: &Diagram, dim: usize) -> VectInterp {
    let dims: BTreeMap<String, usize> = OBJECTS.iter().map(|o| (o.to_string(), dim)).collect();
    let boxes = box_shapes(d)
        .into_iter()
        .map(|(name, (dom, cod))| {
            let shape = dims_of(&dom.concat(&cod), &dims);
            let len = shape.iter().product();
            (name, Tensor { dims: shape, data: (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect() })
        })
        .collect();
    VectInterp { dims, boxes, ..Default::default() }
}

// ---------------------------------------------------------------------------
// Lambda terms
// ---------------------------------------------------------------------------

/// Simple types over the four homsets between `1` and `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimpleType {
    Hom(bool, bool),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn to_sem(&self) -> SemType {
        match self {
            SimpleType::Hom(d, c) => SemType::diag(&obj(*d), &obj(*c)),
            SimpleType::Arrow(a, b) => SemType::arrow(a.to_sem(), b.to_sem()),
        }
    }

    fn random<R: Rng>(rng: &mut R, arrows: bool) -> SimpleType {
        let base = SimpleType::Hom(rng.gen(), rng.gen());
        if arrows && rng.gen_bool(0.4) {
            SimpleType::Arrow(Box::new(SimpleType::Hom(rng.gen(), rng.gen())), Box::new(base))
        } else {
            base
        }
    }
}

fn obj(n: bool) -> Ty {
    if n {
        Ty::of(&["N"])
    } else {
        Ty::unit()
    }
}

/// Signature of the constants random terms use: one box per homset.
pub fn term_signature() -> Signature {
    Signature::new(["N"])
        .with_box(BoxDecl::new("s", Ty::unit(), Ty::unit()))
        .with_box(BoxDecl::new("man", Ty::unit(), Ty::of(&["N"])))
        .with_box(BoxDecl::new("hot", Ty::of(&["N"]), Ty::unit()))
        .with_box(BoxDecl::new("big", Ty::of(&["N"]), Ty::of(&["N"])))
}

pub fn term_constants() -> ConstantTable {
    ConstantTable::diagrams(&term_signature()).expect("fixed signature")
}

struct TermGen<'a, R> {
    rng: &'a mut R,
    next: usize,
}

impl<R: Rng> TermGen<'_, R> {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("v{}", self.next)
    }

    fn term(&mut self, ty: &SimpleType, ctx: &mut Vec<(String, SimpleType)>, depth: usize) -> Term {
        if let SimpleType::Arrow(a, b) = ty {
            if depth == 0 || self.rng.gen_bool(0.7) {
                let x = self.fresh();
                ctx.push((x.clone(), (**a).clone()));
                let body = self.term(b, ctx, depth.saturating_sub(1));
                ctx.pop();
                return Term::lam(&x, body);
            }
        }
        // variables whose result type is `ty` after at most one argument
        let mut heads: Vec<(String, Option<SimpleType>)> = Vec::new();
        for (x, t) in ctx.iter() {
            if t == ty {
                heads.push((x.clone(), None));
            }
            if let SimpleType::Arrow(a, b) = t {
                if **b == *ty {
                    heads.push((x.clone(), Some((**a).clone())));
                }
            }
        }
        let choice = self.rng.gen_range(0..5);
        if choice == 0 && !heads.is_empty() {
            let (x, arg) = heads.swap_remove(self.rng.gen_range(0..heads.len()));
            return match arg {
                None => Term::var(&x),
                Some(a) => {
                    let arg = self.term(&a, ctx, depth.saturating_sub(1));
                    Term::app(Term::var(&x), arg)
                }
            };
        }
        if choice == 1 && depth > 0 {
            let a = SimpleType::random(self.rng, true);
            let x = self.fresh();
            let arg = self.term(&a, ctx, depth - 1);
            ctx.push((x.clone(), a));
            let body = self.term(ty, ctx, depth - 1);
            ctx.pop();
            return Term::app(Term::lam(&x, body), arg);
        }
        match ty {
            SimpleType::Hom(d, c) => {
                if depth > 0 && choice == 2 {
                    let mid: bool = self.rng.gen();
                    let first = self.term(&SimpleType::Hom(*d, mid), ctx, depth - 1);
                    let second = self.term(&SimpleType::Hom(mid, *c), ctx, depth - 1);
                    return Term::compose(first, second);
                }
                if depth > 0 && choice == 3 {
                    return Term::app(Term::constant(names::CUT), self.term(ty, ctx, depth - 1));
                }
                if d == c && self.rng.gen_bool(0.3) {
                    let inst = [("x".to_string(), ObjExpr::concrete(&obj(*d)))].into();
                    return Term::Const { name: names::ID.to_string(), indices: Vec::new(), inst };
                }
                Term::constant(match (d, c) {
                    (false, false) => "s",
                    (false, true) => "man",
                    (true, false) => "hot",
                    (true, true) => "big",
                })
            }
            SimpleType::Arrow(a, b) => {
                let x = self.fresh();
                ctx.push((x.clone(), (**a).clone()));
                let body = self.term(b, ctx, depth.saturating_sub(1));
                ctx.pop();
                Term::lam(&x, body)
            }
        }
    }
}

/// A random closed term of a random homset type, returned with that type.
/// Terms whose shape variables cannot be inferred, such as `compose` inside
/// a discarded argument, are redrawn.
pub fn random_term<R: Rng>(rng: &mut R, depth: usize) -> (Term, SemType) {
    let consts = term_constants();
    loop {
        let ty = SimpleType::random(rng, false);
        let mut g = TermGen { rng: &mut *rng, next: 0 };
        let t = g.term(&ty, &mut Vec::new(), depth);
        if typecheck(&t, &BTreeMap::new(), &consts).is_ok() {
            return (t, ty.to_sem());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagrams_are_well_typed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let dom = random_ty(&mut rng, 2);
            let cfg = DiagramConfig { holes: true, ..Default::default() };
            let d = random_diagram(&mut rng, &dom, &cfg);
            assert_eq!(d.dom(), dom);
            d.check(None).unwrap();
        }
    }

    #[test]
    fn terms_have_their_type() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let consts = term_constants();
        for _ in 0..300 {
            let (t, ty) = random_term(&mut rng, 4);
            assert_eq!(typecheck(&t, &BTreeMap::new(), &consts).unwrap(), ty, "{t}");
        }
    }
}
