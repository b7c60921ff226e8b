//! Layered decomposition and the interchange normal form.
//!
//! A diagram flattens into a list of layers `id(left) ⊗ g ⊗ id(right)`, one
//! generator each. Two adjacent layers may be swapped (interchange) when the
//! later generator's inputs lie entirely to one side of the earlier one's
//! outputs. The normal form repeatedly emits, among the generators that can be
//! slid to the front, the one with the smallest offset.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Diagram;
use crate::types::Ty;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Box { name: String, dom: Ty, cod: Ty, fillings: Vec<LayeredForm> },
    Spider { legs_in: usize, legs_out: usize, object: String },
    Cup { object: String },
    Cap { object: String },
    Swap { left: String, right: String },
    Cut { inner: LayeredForm },
}

impl Generator {
    pub fn dom(&self) -> Ty {
        match self {
            Generator::Box { dom, .. } => dom.clone(),
            Generator::Spider { legs_in, object, .. } => Ty::repeat(object, *legs_in),
            Generator::Cup { object } => Ty::repeat(object, 2),
            Generator::Cap { .. } => Ty::unit(),
            Generator::Swap { left, right } => Ty(vec![left.clone(), right.clone()]),
            Generator::Cut { inner } => inner.dom.clone(),
        }
    }

    pub fn cod(&self) -> Ty {
        match self {
            Generator::Box { cod, .. } => cod.clone(),
            Generator::Spider { legs_out, object, .. } => Ty::repeat(object, *legs_out),
            Generator::Cup { .. } => Ty::unit(),
            Generator::Cap { object } => Ty::repeat(object, 2),
            Generator::Swap { left, right } => Ty(vec![right.clone(), left.clone()]),
            Generator::Cut { inner } => inner.cod(),
        }
    }

    pub fn to_diagram(&self) -> Diagram {
        match self {
            Generator::Box { name, dom, cod, fillings } => Diagram::Box {
                name: name.clone(),
                dom: dom.clone(),
                cod: cod.clone(),
                fillings: fillings.iter().map(LayeredForm::to_diagram).collect(),
            },
            Generator::Spider { legs_in, legs_out, object } => Diagram::spider(*legs_in, *legs_out, object),
            Generator::Cup { object } => Diagram::cup(object),
            Generator::Cap { object } => Diagram::cap(object),
            Generator::Swap { left, right } => Diagram::swap(left, right),
            Generator::Cut { inner } => Diagram::cut(inner.to_diagram()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Layer {
    pub left: Ty,
    pub generator: Generator,
    pub right: Ty,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LayeredForm {
    pub dom: Ty,
    pub layers: Vec<Layer>,
}

impl LayeredForm {
    pub fn cod(&self) -> Ty {
        match self.layers.last() {
            Some(l) => l.left.concat(&l.generator.cod()).concat(&l.right),
            None => self.dom.clone(),
        }
    }

    /// Rebuilds a diagram as a composite of whiskered generators.
    pub fn to_diagram(&self) -> Diagram {
        let mut out = Diagram::id(self.dom.clone());
        for (i, l) in self.layers.iter().enumerate() {
            let g = l.generator.to_diagram();
            let mut layer = g;
            if !l.left.is_empty() {
                layer = super::tensor(&Diagram::id(l.left.clone()), &layer);
            }
            if !l.right.is_empty() {
                layer = super::tensor(&layer, &Diagram::id(l.right.clone()));
            }
            out = if i == 0 {
                layer
            } else {
                Diagram::Compose { first: Box::new(out), second: Box::new(layer) }
            };
        }
        out
    }

    /// Flattens without reordering; inner bodies are flattened the same way.
    pub fn of(d: &Diagram) -> LayeredForm {
        LayeredForm { dom: d.dom(), layers: flatten(d, &|d| LayeredForm::of(d)) }
    }
}

fn flatten(d: &Diagram, inner: &dyn Fn(&Diagram) -> LayeredForm) -> Vec<Layer> {
    let single = |g: Generator| vec![Layer { left: Ty::unit(), generator: g, right: Ty::unit() }];
    match d {
        Diagram::Id { .. } => Vec::new(),
        Diagram::Box { name, dom, cod, fillings } => single(Generator::Box {
            name: name.clone(),
            dom: dom.clone(),
            cod: cod.clone(),
            fillings: fillings.iter().map(inner).collect(),
        }),
        Diagram::Spider { legs_in, legs_out, object } => {
            single(Generator::Spider { legs_in: *legs_in, legs_out: *legs_out, object: object.clone() })
        }
        Diagram::Cup { object } => single(Generator::Cup { object: object.clone() }),
        Diagram::Cap { object } => single(Generator::Cap { object: object.clone() }),
        Diagram::Swap { left, right } => single(Generator::Swap { left: left.clone(), right: right.clone() }),
        Diagram::Cut { inner: body } => single(Generator::Cut { inner: inner(body) }),
        Diagram::Compose { first, second } => {
            let mut v = flatten(first, inner);
            v.extend(flatten(second, inner));
            v
        }
        Diagram::Tensor { top, bottom } => {
            let bdom = bottom.dom();
            let tcod = top.cod();
            let mut v: Vec<Layer> = flatten(top, inner)
                .into_iter()
                .map(|mut l| {
                    l.right = l.right.concat(&bdom);
                    l
                })
                .collect();
            v.extend(flatten(bottom, inner).into_iter().map(|mut l| {
                l.left = tcod.concat(&l.left);
                l
            }));
            v
        }
    }
}

/// A generator with its offset in the boundary it acts on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Slot {
    pub(crate) off: usize,
    pub(crate) din: usize,
    pub(crate) dout: usize,
    pub(crate) generator: Generator,
}

impl Slot {
    pub(crate) fn of(l: Layer) -> Slot {
        Slot { off: l.left.len(), din: l.generator.dom().len(), dout: l.generator.cod().len(), generator: l.generator }
    }

    /// Tie-break rank among generators that reach the front at the same
    /// offset: generators with inputs, then scalars, then states.
    fn rank(&self) -> u8 {
        match (self.din, self.dout) {
            (0, 0) => 1,
            (0, _) => 2,
            _ => 0,
        }
    }
}

/// Offsets after moving `b` (immediately after `a`) in front of `a`.
pub(crate) fn interchange(a: &Slot, b: &Slot) -> Option<(usize, usize)> {
    if b.off + b.din <= a.off {
        Some((b.off, a.off + b.dout - b.din))
    } else if b.off >= a.off + a.dout {
        Some((b.off + a.din - a.dout, a.off))
    } else {
        None
    }
}

/// Offset that slot `j` would have at the front of `slots`, if it can get there.
fn front_offset(slots: &[Slot], j: usize) -> Option<usize> {
    let mut b = slots[j].clone();
    for a in slots[..j].iter().rev() {
        let (nb, _) = interchange(a, &b)?;
        b.off = nb;
    }
    Some(b.off)
}

fn move_to_front(slots: &mut [Slot], j: usize) {
    for i in (0..j).rev() {
        let (nb, na) = interchange(&slots[i], &slots[i + 1]).expect("checked by front_offset");
        slots[i + 1].off = nb;
        slots[i].off = na;
        slots.swap(i, i + 1);
    }
}

/// Canonical layered form: every generator is slid as early as possible,
/// ties broken leftmost. Applied recursively inside cuts and hole fillings.
///
/// Identical generators can reach the front at the same offset, such as two
/// equal states side by side. Picking either gives the same first layer but
/// different remainders, so each choice is followed and the smallest
/// resulting sequence kept.
pub fn normalize(d: &Diagram) -> LayeredForm {
    let slots: Vec<Slot> = flatten(d, &normalize).into_iter().map(Slot::of).collect();
    let mut memo = HashMap::new();
    assemble(d.dom(), order(slots, &mut memo))
}

type Key = (usize, u8, Generator);

fn order(mut slots: Vec<Slot>, memo: &mut HashMap<Vec<Slot>, Vec<Slot>>) -> Vec<Slot> {
    let mut out = Vec::with_capacity(slots.len());
    while !slots.is_empty() {
        let keyed: Vec<(Key, usize)> = (0..slots.len())
            .filter_map(|j| front_offset(&slots, j).map(|off| ((off, slots[j].rank(), slots[j].generator.clone()), j)))
            .collect();
        let best = keyed.iter().map(|(k, _)| k).min().expect("the first slot can always move to the front").clone();
        let ties: Vec<usize> = keyed.iter().filter(|(k, _)| *k == best).map(|(_, j)| *j).collect();
        if let [j] = ties[..] {
            move_to_front(&mut slots, j);
            out.push(slots.remove(0));
            continue;
        }
        let rest = ties
            .into_iter()
            .map(|j| {
                let mut s = slots.clone();
                move_to_front(&mut s, j);
                let first = s.remove(0);
                let tail = match memo.get(&s) {
                    Some(t) => t.clone(),
                    None => {
                        let t = order(s.clone(), memo);
                        memo.insert(s, t.clone());
                        t
                    }
                };
                (first, tail)
            })
            .min_by(|(_, a), (_, b)| sequence_key(a).cmp(&sequence_key(b)))
            .expect("at least two ties");
        out.push(rest.0);
        out.extend(rest.1);
        break;
    }
    out
}

fn sequence_key(slots: &[Slot]) -> Vec<(usize, u8, &Generator)> {
    slots.iter().map(|s| (s.off, s.rank(), &s.generator)).collect()
}

/// Rebuilds layers from slots applied in order to `dom`.
pub(crate) fn assemble(dom: Ty, slots: Vec<Slot>) -> LayeredForm {
    let mut boundary = dom.clone();
    let mut layers = Vec::with_capacity(slots.len());
    for s in slots {
        let left = boundary.slice(0, s.off);
        let right = boundary.slice(s.off + s.din, boundary.len());
        debug_assert_eq!(boundary.slice(s.off, s.off + s.din), s.generator.dom());
        boundary = left.concat(&s.generator.cod()).concat(&right);
        layers.push(Layer { left, generator: s.generator, right });
    }
    LayeredForm { dom, layers }
}

/// Equality in the free monoidal category: same boundary and planar
/// isotopic drawings. Diagrams with the same normal form are always equal;
/// the converse fails when a closed piece can float around the end of a wire.
pub fn equal(d1: &Diagram, d2: &Diagram) -> bool {
    d1.dom() == d2.dom() && d1.cod() == d2.cod() && super::planar::code(&normalize(d1)) == super::planar::code(&normalize(d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose, tensor};

    fn g(name: &str, dom: &[&str], cod: &[&str]) -> Diagram {
        Diagram::generator(name, Ty::of(dom), Ty::of(cod))
    }

    #[test]
    fn interchange_law() {
        let f = g("f", &["A"], &["B"]);
        let h = g("h", &["C"], &["D"]);
        let lhs = compose(&tensor(&f, &Diagram::id(Ty::of(&["C"]))), &tensor(&Diagram::id(Ty::of(&["B"])), &h)).unwrap();
        let rhs = compose(&tensor(&Diagram::id(Ty::of(&["A"])), &h), &tensor(&f, &Diagram::id(Ty::of(&["D"])))).unwrap();
        assert!(equal(&lhs, &rhs));
        assert_eq!(normalize(&lhs).layers.len(), 2);
    }

    #[test]
    fn distinct_endomorphisms_do_not_commute() {
        let f = g("f", &["A"], &["A"]);
        let h = g("h", &["A"], &["A"]);
        let fh = compose(&f, &h).unwrap();
        let hf = compose(&h, &f).unwrap();
        // two layers stacked on the same wire: each normal form is forced
        let nf = normalize(&fh);
        let nh = normalize(&hf);
        assert_eq!(nf.layers[0].generator.to_diagram(), f);
        assert_eq!(nh.layers[0].generator.to_diagram(), h);
        assert!(!equal(&fh, &hf));
    }

    #[test]
    fn states_and_scalars_slide() {
        let s1 = g("s", &[], &["A"]);
        let s2 = g("t", &[], &["B"]);
        let z = g("z", &[], &[]);
        let one = Diagram::id(Ty::unit());
        // s ⊗ t built in both orders
        let a = compose(&tensor(&s1, &one), &tensor(&Diagram::id(Ty::of(&["A"])), &s2)).unwrap();
        let b = compose(&tensor(&one, &s2), &tensor(&s1, &Diagram::id(Ty::of(&["B"])))).unwrap();
        assert!(equal(&a, &b));
        // a scalar on either side of a fresh wire
        let c = compose(&s1, &tensor(&z, &Diagram::id(Ty::of(&["A"])))).unwrap();
        let d = compose(&s1, &tensor(&Diagram::id(Ty::of(&["A"])), &z)).unwrap();
        assert!(equal(&c, &d));
        // but a scalar cannot jump a through-wire
        let e = tensor(&z, &Diagram::id(Ty::of(&["A"])));
        let f = tensor(&Diagram::id(Ty::of(&["A"])), &z);
        assert!(!equal(&e, &f));
    }

    #[test]
    fn normal_form_is_idempotent_and_round_trips() {
        let f = g("f", &["A"], &["B"]);
        let h = g("h", &["B", "C"], &["D"]);
        let s = g("s", &[], &["C"]);
        let d = compose(&compose(&f, &tensor(&Diagram::id(Ty::of(&["B"])), &s)).unwrap(), &h).unwrap();
        let nf = normalize(&d);
        assert_eq!(normalize(&nf.to_diagram()), nf);
        assert!(equal(&nf.to_diagram(), &d));
        assert_eq!(nf.cod(), d.cod());
    }

    #[test]
    fn effect_then_state_in_the_same_gap() {
        let e = g("e", &["A"], &[]);
        let s = g("s", &[], &["B"]);
        // e consumes the wire, then s starts a new wire where it was
        let x = compose(&e, &s).unwrap();
        // s to the right of the wire, then e
        let y = compose(&tensor(&Diagram::id(Ty::of(&["A"])), &s), &tensor(&e, &Diagram::id(Ty::of(&["B"])))).unwrap();
        // s to the left of the wire, then e
        let z = compose(&tensor(&s, &Diagram::id(Ty::of(&["A"]))), &tensor(&Diagram::id(Ty::of(&["B"])), &e)).unwrap();
        assert!(equal(&x, &y));
        assert!(equal(&x, &z));
    }
}
