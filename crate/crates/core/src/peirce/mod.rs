//! Existential graphs: spider fusion, double cuts, and the reading of
//! diagrams as first-order formulas.
//!
//! Wires are variables, boxes are predicates over the variables of their
//! ports, juxtaposition is conjunction, spiders identify variables and a cut
//! negates what it encloses. A variable is existentially quantified in the
//! outermost region its wire touches.

mod rewrite;

use std::collections::BTreeMap;

pub use rewrite::{double_cut_elim, spider_fuse};

use crate::diagram::{Diagram, Generator, LayeredForm};
use crate::error::{Error, Result};
use crate::grammar::{first_reading, Lexicon};
use crate::logic::{singleton_rewrite, FolTerm, Formula};
use crate::types::{GrammarType, Signature};

type Wire = usize;

enum Item {
    Atom(String, Vec<Wire>),
    Cut(usize),
}

struct Region {
    depth: usize,
    items: Vec<Item>,
    /// Union-find over the wires identified inside this region.
    parent: BTreeMap<Wire, Wire>,
}

impl Region {
    fn find(&self, mut w: Wire) -> Wire {
        while let Some(&p) = self.parent.get(&w) {
            if p == w {
                break;
            }
            w = p;
        }
        w
    }

    fn union(&mut self, a: Wire, b: Wire) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent.insert(hi, lo);
            self.parent.entry(lo).or_insert(lo);
        }
    }
}

struct Graph<'a> {
    sig: &'a Signature,
    regions: Vec<Region>,
    /// Region owning each wire: the outermost one it reaches.
    home: Vec<usize>,
}

impl Graph<'_> {
    fn fresh(&mut self, region: usize) -> Wire {
        self.home.push(region);
        self.home.len() - 1
    }

    fn region(&mut self, depth: usize) -> usize {
        self.regions.push(Region { depth, items: Vec::new(), parent: BTreeMap::new() });
        self.regions.len() - 1
    }

    fn walk(&mut self, form: &LayeredForm, mut wires: Vec<Wire>, r: usize) -> Result<Vec<Wire>> {
        for layer in &form.layers {
            let off = layer.left.len();
            let din = layer.generator.dom().len();
            let ins: Vec<Wire> = wires[off..off + din].to_vec();
            let outs = match &layer.generator {
                Generator::Box { name, cod, fillings, .. } => {
                    if !fillings.is_empty() {
                        return Err(Error::Unsupported(format!("box {name} has holes and no first-order reading")));
                    }
                    let outs: Vec<Wire> = (0..cod.len()).map(|_| self.fresh(r)).collect();
                    let ports: Vec<Wire> = ins.iter().chain(&outs).copied().collect();
                    let mut args = ports.clone();
                    if let Some(decl) = self.sig.get(name) {
                        if decl.arity() != ports.len() {
                            return Err(Error::Shape(format!("box {name} does not match its declaration")));
                        }
                        for (p, &w) in ports.iter().enumerate() {
                            args[decl.arg_position(p)] = w;
                        }
                    }
                    self.regions[r].items.push(Item::Atom(name.clone(), args));
                    outs
                }
                Generator::Spider { legs_out, .. } => {
                    let outs: Vec<Wire> = (0..*legs_out).map(|_| self.fresh(r)).collect();
                    let hub = self.fresh(r);
                    for &w in ins.iter().chain(&outs) {
                        self.regions[r].union(hub, w);
                    }
                    outs
                }
                Generator::Cup { .. } => {
                    self.regions[r].union(ins[0], ins[1]);
                    Vec::new()
                }
                Generator::Cap { .. } => {
                    let (a, b) = (self.fresh(r), self.fresh(r));
                    self.regions[r].union(a, b);
                    vec![a, b]
                }
                Generator::Swap { .. } => vec![ins[1], ins[0]],
                Generator::Cut { inner } => {
                    let depth = self.regions[r].depth + 1;
                    let child = self.region(depth);
                    let outs = self.walk(inner, ins, child)?;
                    for &w in &outs {
                        if self.regions[self.home[w]].depth > self.regions[r].depth {
                            self.home[w] = r;
                        }
                    }
                    self.regions[r].items.push(Item::Cut(child));
                    outs
                }
            };
            wires.splice(off..off + din, outs);
        }
        Ok(wires)
    }

    fn translate(&self, r: usize, env: &BTreeMap<Wire, String>, counter: &mut usize) -> Formula {
        let region = &self.regions[r];
        let mut relevant: Vec<Wire> = (0..self.home.len()).filter(|&w| self.home[w] == r).collect();
        relevant.extend(region.parent.keys().copied());
        relevant.sort_unstable();
        relevant.dedup();

        let mut classes: BTreeMap<Wire, Vec<Wire>> = BTreeMap::new();
        for &w in &relevant {
            classes.entry(region.find(w)).or_default().push(w);
        }
        let mut ordered: Vec<Vec<Wire>> = classes.into_values().collect();
        ordered.sort_by_key(|c| c[0]);

        let mut local = env.clone();
        let mut bound = Vec::new();
        let mut equalities = Vec::new();
        for class in ordered {
            let mut outer: Vec<&String> = Vec::new();
            for w in &class {
                if let Some(v) = env.get(w) {
                    if !outer.contains(&v) {
                        outer.push(v);
                    }
                }
            }
            let var = match outer.first() {
                Some(v) => (*v).clone(),
                None => {
                    let v = format!("x{counter}");
                    *counter += 1;
                    bound.push(v.clone());
                    v
                }
            };
            for other in outer.iter().skip(1) {
                equalities.push(Formula::eq(FolTerm::Var(var.clone()), FolTerm::Var((*other).clone())));
            }
            for w in class {
                local.entry(w).or_insert_with(|| var.clone());
            }
        }

        let mut parts = Vec::new();
        for item in &region.items {
            parts.push(match item {
                Item::Atom(name, args) => {
                    Formula::atom(name, args.iter().map(|w| FolTerm::Var(local[w].clone())).collect())
                }
                Item::Cut(child) => Formula::not(self.translate(*child, &local, counter)),
            });
        }
        parts.extend(equalities);
        bound.iter().rev().fold(Formula::conj(parts), |b, v| Formula::exists(v, b))
    }
}

/// Reads a diagram as a formula whose free variables are its boundary ports:
/// the returned names list the inputs, then the outputs, left to right.
pub fn to_fol_open(d: &Diagram, sig: &Signature) -> Result<(Formula, Vec<String>)> {
    let form = LayeredForm::of(d);
    let mut g = Graph { sig, regions: Vec::new(), home: Vec::new() };
    let top = g.region(0);
    let inputs: Vec<Wire> = (0..form.dom.len()).map(|_| g.fresh(top)).collect();
    let outputs = g.walk(&form, inputs.clone(), top)?;
    let mut env = BTreeMap::new();
    let mut names = Vec::new();
    for (k, w) in inputs.iter().chain(&outputs).enumerate() {
        let port = g.fresh(top);
        g.regions[top].union(port, *w);
        let name = format!("x{k}");
        env.insert(port, name.clone());
        names.push(name);
    }
    let mut counter = names.len();
    let f = g.translate(top, &env, &mut counter);
    Ok((f, names))
}

/// First-order reading of a diagram with holes only in the form of cuts.
/// Open ports become free variables `x0, x1, ...`.
pub fn to_fol(d: &Diagram, sig: &Signature) -> Result<Formula> {
    to_fol_open(d, sig).map(|(f, _)| f)
}

/// Parses at `s`, reads the diagram as a formula, replaces singleton
/// states by constants and renames bound variables to `x0, x1, ...`.
pub fn fol_of_sentence(sentence: &str, lex: &Lexicon) -> Result<Formula> {
    let reading = first_reading(sentence, lex, &GrammarType::atom("s"))?;
    let d = reading
        .value
        .as_diagram()
        .ok_or_else(|| Error::Unsupported("the lexicon produces formulas, not diagrams".into()))?;
    let f = to_fol(d, lex.signature())?;
    Ok(singleton_rewrite(&f, &lex.signature().singletons()).renumbered())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::compose;
    use crate::grammar::builtin;
    use crate::types::Ty;

    fn peirce() -> Lexicon {
        builtin("peirce").unwrap()
    }

    fn raw(sentence: &str) -> String {
        let lex = peirce();
        let r = first_reading(sentence, &lex, &GrammarType::atom("s")).unwrap();
        to_fol(r.value.as_diagram().unwrap(), lex.signature()).unwrap().to_string()
    }

    #[test]
    fn mans_not_hot() {
        assert_eq!(raw("Man's Not Hot"), "exists x0. man(x0) & ~hot(x0)");
    }

    #[test]
    fn no_man_is_an_island() {
        assert_eq!(raw("no man is an island"), "~(exists x0. man(x0) & island(x0))");
    }

    #[test]
    fn every_big_man_sleeps() {
        assert_eq!(raw("every big man sleeps"), "~(exists x0. big(x0) & man(x0) & ~sleeps(x0))");
    }

    #[test]
    fn proper_nouns_are_states() {
        assert_eq!(raw("Alice sleeps"), "exists x0. Alice(x0) & sleeps(x0)");
        assert_eq!(raw("Alice kills a mortal"), "exists x0. exists x1. Alice(x0) & mortal(x1) & kills(x0, x1)");
    }

    #[test]
    fn sentences_with_constants() {
        let lex = peirce();
        assert_eq!(fol_of_sentence("Alice kills a mortal", &lex).unwrap().to_string(), "exists x0. mortal(x0) & kills(Alice, x0)");
        assert_eq!(fol_of_sentence("Alice sleeps", &lex).unwrap().to_string(), "sleeps(Alice)");
    }

    #[test]
    fn open_diagrams() {
        let sig = peirce().signature().clone();
        let man = Diagram::generator("man", Ty::unit(), Ty::of(&["N"]));
        assert_eq!(to_fol(&man, &sig).unwrap().to_string(), "man(x0)");
        let (f, names) = to_fol_open(&Diagram::cap("N"), &sig).unwrap();
        assert_eq!(names, vec!["x0", "x1"]);
        assert_eq!(f.to_string(), "x0 = x1");
        let kills = Diagram::generator("kills", Ty::of(&["N"]), Ty::of(&["N"]));
        assert_eq!(to_fol(&kills, &sig).unwrap().to_string(), "kills(x1, x0)");
    }

    #[test]
    fn equality_inside_a_cut() {
        // cut(cap): the two ports differ
        let sig = Signature::new(["N"]);
        let f = to_fol(&Diagram::cut(Diagram::cap("N")), &sig).unwrap();
        assert_eq!(f.to_string(), "~(x0 = x1)");
        // a spider inside a cut joining a wire from outside
        let man = Diagram::generator("man", Ty::unit(), Ty::of(&["N"]));
        let sig = sig.with_box(crate::types::BoxDecl::new("man", Ty::unit(), Ty::of(&["N"])));
        let d = compose(&man, &Diagram::cut(Diagram::spider(1, 0, "N"))).unwrap();
        assert_eq!(to_fol(&d, &sig).unwrap().to_string(), "exists x0. man(x0) & ~true");
    }

    #[test]
    fn naming_is_deterministic() {
        let a = raw("every big man sleeps");
        assert_eq!(a, raw("every big man sleeps"));
    }

    #[test]
    fn holes_are_rejected() {
        let lex = builtin("holes").unwrap();
        let r = first_reading("ideas sleep furiously", &lex, &GrammarType::atom("s")).unwrap();
        assert!(matches!(to_fol(r.value.as_diagram().unwrap(), lex.signature()), Err(Error::Unsupported(_))));
    }
}
