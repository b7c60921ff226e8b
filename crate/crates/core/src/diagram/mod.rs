//! String diagrams over a monoidal signature with holes.
//!
//! Composition is written diagrammatically: in `Compose { first, second }`
//! the outputs of `first` feed the inputs of `second`.

mod normal;
mod planar;
pub mod render;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Shape, Signature, Ty};

pub use normal::{equal, normalize, Generator, Layer, LayeredForm};
pub(crate) use normal::{assemble, interchange, Slot};
pub use render::{to_dot, to_svg};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagram {
    Id {
        ty: Ty,
    },
    Box {
        name: String,
        dom: Ty,
        cod: Ty,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        fillings: Vec<Diagram>,
    },
    Compose {
        first: std::boxed::Box<Diagram>,
        second: std::boxed::Box<Diagram>,
    },
    Tensor {
        top: std::boxed::Box<Diagram>,
        bottom: std::boxed::Box<Diagram>,
    },
    Spider {
        legs_in: usize,
        legs_out: usize,
        object: String,
    },
    Cup {
        object: String,
    },
    Cap {
        object: String,
    },
    Swap {
        left: String,
        right: String,
    },
    Cut {
        inner: std::boxed::Box<Diagram>,
    },
}

impl Diagram {
    pub fn id(ty: Ty) -> Self {
        Diagram::Id { ty }
    }

    pub fn spider(legs_in: usize, legs_out: usize, object: &str) -> Self {
        Diagram::Spider { legs_in, legs_out, object: object.to_string() }
    }

    pub fn cup(object: &str) -> Self {
        Diagram::Cup { object: object.to_string() }
    }

    pub fn cap(object: &str) -> Self {
        Diagram::Cap { object: object.to_string() }
    }

    pub fn swap(left: &str, right: &str) -> Self {
        Diagram::Swap { left: left.to_string(), right: right.to_string() }
    }

    pub fn cut(inner: Diagram) -> Self {
        Diagram::Cut { inner: std::boxed::Box::new(inner) }
    }

    /// A box instance built without consulting a signature.
    pub fn generator(name: &str, dom: Ty, cod: Ty) -> Self {
        Diagram::Box { name: name.to_string(), dom, cod, fillings: Vec::new() }
    }

    pub fn dom(&self) -> Ty {
        match self {
            Diagram::Id { ty } => ty.clone(),
            Diagram::Box { dom, .. } => dom.clone(),
            Diagram::Compose { first, .. } => first.dom(),
            Diagram::Tensor { top, bottom } => top.dom().concat(&bottom.dom()),
            Diagram::Spider { legs_in, object, .. } => Ty::repeat(object, *legs_in),
            Diagram::Cup { object } => Ty::repeat(object, 2),
            Diagram::Cap { .. } => Ty::unit(),
            Diagram::Swap { left, right } => Ty(vec![left.clone(), right.clone()]),
            Diagram::Cut { inner } => inner.dom(),
        }
    }

    pub fn cod(&self) -> Ty {
        match self {
            Diagram::Id { ty } => ty.clone(),
            Diagram::Box { cod, .. } => cod.clone(),
            Diagram::Compose { second, .. } => second.cod(),
            Diagram::Tensor { top, bottom } => top.cod().concat(&bottom.cod()),
            Diagram::Spider { legs_out, object, .. } => Ty::repeat(object, *legs_out),
            Diagram::Cup { .. } => Ty::unit(),
            Diagram::Cap { object } => Ty::repeat(object, 2),
            Diagram::Swap { left, right } => Ty(vec![right.clone(), left.clone()]),
            Diagram::Cut { inner } => inner.cod(),
        }
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.dom(), self.cod())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Diagram) -> Result<Diagram> {
        compose(self, next)
    }

    /// Box names in traversal order, including fillings and cut bodies.
    pub fn boxes(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_boxes(&mut out);
        out
    }

    fn collect_boxes(&self, out: &mut Vec<String>) {
        match self {
            Diagram::Box { name, fillings, .. } => {
                out.push(name.clone());
                fillings.iter().for_each(|f| f.collect_boxes(out));
            }
            Diagram::Compose { first: a, second: b } | Diagram::Tensor { top: a, bottom: b } => {
                a.collect_boxes(out);
                b.collect_boxes(out);
            }
            Diagram::Cut { inner } => inner.collect_boxes(out),
            _ => {}
        }
    }

    /// Number of non-identity generators at the top level and below.
    pub fn size(&self) -> usize {
        match self {
            Diagram::Id { .. } => 0,
            Diagram::Box { fillings, .. } => 1 + fillings.iter().map(Diagram::size).sum::<usize>(),
            Diagram::Compose { first: a, second: b } | Diagram::Tensor { top: a, bottom: b } => {
                a.size() + b.size()
            }
            Diagram::Cut { inner } => 1 + inner.size(),
            _ => 1,
        }
    }

    /// Checks the typing invariants recursively (composition boundaries and
    /// filling shapes against `sig`, when given).
    pub fn check(&self, sig: Option<&Signature>) -> Result<()> {
        match self {
            Diagram::Box { name, dom, cod, fillings } => {
                if let Some(sig) = sig {
                    let decl = sig
                        .get(name)
                        .ok_or_else(|| Error::MissingSymbol(format!("unknown box {name}")))?;
                    if &decl.dom != dom || &decl.cod != cod {
                        return Err(Error::Shape(format!(
                            "box {name} used at ({dom}, {cod}) but declared ({}, {})",
                            decl.dom, decl.cod
                        )));
                    }
                    check_fillings(name, &decl.holes, fillings)?;
                }
                fillings.iter().try_for_each(|f| f.check(sig))
            }
            Diagram::Compose { first, second } => {
                first.check(sig)?;
                second.check(sig)?;
                if first.cod() != second.dom() {
                    return Err(compose_mismatch(first, second));
                }
                Ok(())
            }
            Diagram::Tensor { top, bottom } => {
                top.check(sig)?;
                bottom.check(sig)
            }
            Diagram::Cut { inner } => inner.check(sig),
            _ => Ok(()),
        }
    }
}

fn compose_mismatch(d1: &Diagram, d2: &Diagram) -> Error {
    Error::Shape(format!(
        "cannot compose: output {} does not match input {}",
        d1.cod(),
        d2.dom()
    ))
}

fn check_fillings(name: &str, holes: &[Shape], fillings: &[Diagram]) -> Result<()> {
    if holes.len() != fillings.len() {
        return Err(Error::Shape(format!(
            "box {name} has {} hole(s) but got {} filling(s)",
            holes.len(),
            fillings.len()
        )));
    }
    for (i, (hole, fill)) in holes.iter().zip(fillings).enumerate() {
        if &fill.shape() != hole {
            return Err(Error::Shape(format!(
                "box {name} hole {i} expects {hole} but the filling has shape {}",
                fill.shape()
            )));
        }
    }
    Ok(())
}

/// `id_ty`, checked against the signature's objects.
pub fn identity(sig: &Signature, ty: &Ty) -> Result<Diagram> {
    sig.check_ty(ty)?;
    Ok(Diagram::id(ty.clone()))
}

/// Sequential composition: outputs of `d1` feed the inputs of `d2`.
pub fn compose(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    if d1.cod() != d2.dom() {
        return Err(compose_mismatch(d1, d2));
    }
    Ok(Diagram::Compose { first: std::boxed::Box::new(d1.clone()), second: std::boxed::Box::new(d2.clone()) })
}

/// Parallel composition, `d1` above `d2`.
pub fn tensor(d1: &Diagram, d2: &Diagram) -> Diagram {
    Diagram::Tensor { top: std::boxed::Box::new(d1.clone()), bottom: std::boxed::Box::new(d2.clone()) }
}

/// Instantiates a declared box, filling its holes.
pub fn box_(sig: &Signature, name: &str, fillings: Vec<Diagram>) -> Result<Diagram> {
    let decl = sig.get(name).ok_or_else(|| Error::MissingSymbol(format!("unknown box {name}")))?;
    check_fillings(name, &decl.holes, &fillings)?;
    Ok(Diagram::Box { name: name.to_string(), dom: decl.dom.clone(), cod: decl.cod.clone(), fillings })
}

pub fn cut(d: &Diagram) -> Diagram {
    Diagram::cut(d.clone())
}

/// Bends a state `1 → x` into an effect `rev(x) → 1`, or an effect `x → 1`
/// into a state `1 → rev(x)`, using nested cups or caps.
pub fn transpose(d: &Diagram) -> Result<Diagram> {
    let (dom, cod) = (d.dom(), d.cod());
    if dom.is_empty() {
        let k = cod.len();
        let rev = cod.reversed();
        let mut out = tensor(&Diagram::id(rev.clone()), d);
        // boundary: A_k .. A_1 A_1 .. A_k; innermost cup first
        for i in 0..k {
            let off = k - 1 - i;
            let left = rev.slice(0, off);
            let right = cod.slice(i + 1, k);
            let layer = tensor(&tensor(&Diagram::id(left), &Diagram::cup(&cod.0[i])), &Diagram::id(right));
            out = compose(&out, &layer)?;
        }
        Ok(out)
    } else if cod.is_empty() {
        let k = dom.len();
        let rev = dom.reversed();
        let mut out: Option<Diagram> = None;
        for i in (0..k).rev() {
            let off = k - 1 - i;
            let left = rev.slice(0, off);
            let right = dom.slice(i + 1, k);
            let layer = tensor(&tensor(&Diagram::id(left), &Diagram::cap(&dom.0[i])), &Diagram::id(right));
            out = Some(match out {
                None => layer,
                Some(prev) => compose(&prev, &layer)?,
            });
        }
        let caps = out.unwrap_or_else(|| Diagram::id(Ty::unit()));
        compose(&caps, &tensor(&Diagram::id(rev), d))
    } else {
        Err(Error::Shape(format!(
            "transpose needs a state or an effect, got shape {}",
            d.shape()
        )))
    }
}

/// Multiset of box names, including those inside fillings and cuts.
pub fn boxes_of(d: &Diagram) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for b in d.boxes() {
        *out.entry(b).or_insert(0) += 1;
    }
    out
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagram::Id { ty } => write!(f, "id({ty})"),
            Diagram::Box { name, fillings, .. } => {
                write!(f, "{name}")?;
                if !fillings.is_empty() {
                    let parts: Vec<String> = fillings.iter().map(|d| d.to_string()).collect();
                    write!(f, "[{}]", parts.join(", "))?;
                }
                Ok(())
            }
            Diagram::Compose { first, second } => write!(f, "{first} ; {second}"),
            Diagram::Tensor { top, bottom } => {
                let side = |d: &Diagram| match d {
                    Diagram::Compose { .. } => format!("({d})"),
                    _ => d.to_string(),
                };
                write!(f, "{} ⊗ {}", side(top), side(bottom))
            }
            Diagram::Spider { legs_in, legs_out, object } => write!(f, "spider({legs_in},{legs_out},{object})"),
            Diagram::Cup { object } => write!(f, "cup({object})"),
            Diagram::Cap { object } => write!(f, "cap({object})"),
            Diagram::Swap { left, right } => write!(f, "swap({left},{right})"),
            Diagram::Cut { inner } => write!(f, "cut({inner})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::BoxDecl;

    fn n() -> Ty {
        Ty::of(&["N"])
    }

    fn sig() -> Signature {
        Signature::new(["N"])
            .with_box(BoxDecl::new("car", Ty::unit(), n()))
            .with_box(BoxDecl::new("big", n(), n()))
            .with_box(BoxDecl::new("man", Ty::unit(), n()))
            .with_box(BoxDecl::new("hot", n(), Ty::unit()))
            .with_box(BoxDecl::new("S", n(), Ty::unit()))
            .with_box(BoxDecl::new("I", Ty::unit(), n()))
            .with_box(
                BoxDecl::new("F", Ty::unit(), Ty::unit()).with_holes(vec![Shape::new(Ty::unit(), Ty::unit())]),
            )
    }

    #[test]
    fn identity_shapes() {
        let s = sig();
        let unit = identity(&s, &Ty::unit()).unwrap();
        assert_eq!(unit.shape(), Shape::new(Ty::unit(), Ty::unit()));
        assert_eq!(normalize(&unit).layers.len(), 0);
        let nn = identity(&s, &Ty::of(&["N", "N"])).unwrap();
        assert!(equal(&nn, &tensor(&Diagram::id(n()), &Diagram::id(n()))));
        assert!(matches!(identity(&s, &Ty::of(&["Q"])), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn compose_checks_boundaries() {
        let s = sig();
        let car = box_(&s, "car", vec![]).unwrap();
        let big = box_(&s, "big", vec![]).unwrap();
        let big_car = compose(&car, &big).unwrap();
        assert_eq!(big_car.shape(), Shape::new(Ty::unit(), n()));
        let err = compose(&big, &car).unwrap_err();
        assert!(matches!(&err, Error::Shape(m) if m.contains("N") && m.contains("1")), "{err}");
        let scalar = compose(&box_(&s, "man", vec![]).unwrap(), &box_(&s, "hot", vec![]).unwrap()).unwrap();
        assert_eq!(scalar.shape(), Shape::new(Ty::unit(), Ty::unit()));
        assert!(equal(&compose(&Diagram::id(Ty::unit()), &car).unwrap(), &car));
    }

    #[test]
    fn box_with_holes() {
        let s = sig();
        let body = compose(&box_(&s, "I", vec![]).unwrap(), &box_(&s, "S", vec![]).unwrap()).unwrap();
        let d = box_(&s, "F", vec![body.clone()]).unwrap();
        assert_eq!(d.shape(), Shape::new(Ty::unit(), Ty::unit()));
        assert_eq!(d.boxes(), vec!["F", "I", "S"]);
        assert!(matches!(box_(&s, "F", vec![]), Err(Error::Shape(_))));
        let err = box_(&s, "F", vec![box_(&s, "I", vec![]).unwrap()]).unwrap_err();
        assert!(matches!(&err, Error::Shape(m) if m.contains("hole 0")), "{err}");
        assert!(matches!(box_(&s, "nope", vec![]), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn cut_preserves_shape() {
        let s = sig();
        let hot = box_(&s, "hot", vec![]).unwrap();
        assert_eq!(cut(&hot).shape(), hot.shape());
    }

    #[test]
    fn transpose_states_and_effects() {
        let s = sig();
        let man = box_(&s, "man", vec![]).unwrap();
        let t = transpose(&man).unwrap();
        assert_eq!(t.shape(), Shape::new(n(), Ty::unit()));
        assert_eq!(transpose(&t).unwrap().shape(), man.shape());

        let two = tensor(&man, &Diagram::generator("m2", Ty::unit(), Ty::of(&["A"])));
        let t2 = transpose(&two).unwrap();
        assert_eq!(t2.shape(), Shape::new(Ty::of(&["A", "N"]), Ty::unit()));
        let e = Diagram::generator("e", Ty::of(&["N", "A"]), Ty::unit());
        assert_eq!(transpose(&e).unwrap().shape(), Shape::new(Ty::unit(), Ty::of(&["A", "N"])));
        assert!(transpose(&box_(&s, "big", vec![]).unwrap()).is_err());
    }

    #[test]
    fn boxes_multiset() {
        let s = sig();
        let car = box_(&s, "car", vec![]).unwrap();
        let big = box_(&s, "big", vec![]).unwrap();
        let d = car.then(&big).unwrap().then(&big).unwrap();
        let counts = boxes_of(&d);
        assert_eq!(counts.get("big"), Some(&2));
        assert_eq!(counts.get("car"), Some(&1));
        assert!(boxes_of(&Diagram::id(n())).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let s = sig();
        let d = cut(&compose(&box_(&s, "man", vec![]).unwrap(), &box_(&s, "hot", vec![]).unwrap()).unwrap());
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"kind\":\"cut\""));
        let back: Diagram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }
}
