//! Functorial semantics: diagrams evaluated as boolean relations, where a
//! cut is complement, or as real tensors.

mod tensor;

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value as Json;

pub use tensor::{Scalar, Tensor};

use crate::diagram::{Diagram, Generator, LayeredForm};
use crate::error::{Error, Result};
use crate::logic::Model;
use crate::types::{Signature, Ty};

/// Relational interpretation: a universe size per object, a boolean tensor
/// per box indexed by its dom ports then its cod ports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RelInterp {
    pub dims: BTreeMap<String, usize>,
    pub boxes: BTreeMap<String, Tensor<bool>>,
}

/// A higher-order rule: tensors of the fillings to the tensor of the box.
pub type OperatorRule = fn(&[Tensor<f64>]) -> Result<Tensor<f64>>;

/// Real-valued interpretation. `operators` maps a box with holes to the
/// name of a rule in `rules`.
#[derive(Debug, Clone)]
pub struct VectInterp {
    pub dims: BTreeMap<String, usize>,
    pub boxes: BTreeMap<String, Tensor<f64>>,
    pub operators: BTreeMap<String, String>,
    pub rules: BTreeMap<String, OperatorRule>,
}

impl Default for VectInterp {
    fn default() -> Self {
        let mut rules: BTreeMap<String, OperatorRule> = BTreeMap::new();
        rules.insert("twice".into(), twice);
        rules.insert("identity".into(), identity_rule);
        VectInterp { dims: BTreeMap::new(), boxes: BTreeMap::new(), operators: BTreeMap::new(), rules }
    }
}

/// The filling composed with itself.
fn twice(args: &[Tensor<f64>]) -> Result<Tensor<f64>> {
    let [f] = args else {
        return Err(Error::Shape(format!("twice takes one filling, found {}", args.len())));
    };
    let half = f.dims.len() / 2;
    if f.dims.len() % 2 != 0 || f.dims[..half] != f.dims[half..] {
        return Err(Error::Shape("twice needs a filling from a type to itself".into()));
    }
    Ok(f.apply(half, half, f))
}

fn identity_rule(args: &[Tensor<f64>]) -> Result<Tensor<f64>> {
    match args {
        [f] => Ok(f.clone()),
        _ => Err(Error::Shape(format!("identity takes one filling, found {}", args.len()))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterp {
    #[serde(default)]
    dims: BTreeMap<String, usize>,
    #[serde(default)]
    boxes: BTreeMap<String, Json>,
    #[serde(default)]
    operators: BTreeMap<String, String>,
}

/// Axis lengths of a nested array, read along its first elements.
fn nesting(v: &Json) -> Vec<usize> {
    let mut dims = Vec::new();
    let mut v = v;
    while let Json::Array(a) = v {
        dims.push(a.len());
        match a.first() {
            Some(x) => v = x,
            None => break,
        }
    }
    dims
}

fn read_boxes<T: Scalar>(raw: &BTreeMap<String, Json>) -> Result<BTreeMap<String, Tensor<T>>> {
    raw.iter()
        .map(|(k, v)| {
            let t = Tensor::from_json(v, &nesting(v)).map_err(|e| Error::Shape(format!("box {k}: {e}")))?;
            Ok((k.clone(), t))
        })
        .collect()
}

impl RelInterp {
    /// Reads `{"dims": {..}, "boxes": {"name": nested array}}`; entries are
    /// booleans or 0/1.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInterp = serde_json::from_str(text)?;
        if !raw.operators.is_empty() {
            return Err(Error::Unsupported("relations have no operators for boxes with holes".into()));
        }
        Ok(RelInterp { dims: raw.dims, boxes: read_boxes(&raw.boxes)? })
    }
}

impl VectInterp {
    /// Reads `{"dims": {..}, "boxes": {..}, "operators": {"F": "twice"}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInterp = serde_json::from_str(text)?;
        let mut out = VectInterp { dims: raw.dims, boxes: read_boxes(&raw.boxes)?, ..Default::default() };
        for (b, rule) in raw.operators {
            if !out.rules.contains_key(&rule) {
                return Err(Error::MissingSymbol(format!("operator rule {rule} for box {b}")));
            }
            out.operators.insert(b, rule);
        }
        Ok(out)
    }
}

trait Backend<T: Scalar> {
    fn dim(&self, object: &str) -> Result<usize>;
    fn boxed(&self, name: &str, dims: &[usize], fillings: &[LayeredForm]) -> Result<Tensor<T>>;
    fn negate(&self, t: Tensor<T>) -> Result<Tensor<T>>;

    fn dims(&self, ty: &Ty) -> Result<Vec<usize>> {
        ty.0.iter().map(|o| self.dim(o)).collect()
    }
}

fn lookup<'a, T>(boxes: &'a BTreeMap<String, Tensor<T>>, name: &str, dims: &[usize]) -> Result<&'a Tensor<T>> {
    let t = boxes.get(name).ok_or_else(|| Error::MissingSymbol(format!("no interpretation for box {name}")))?;
    if t.dims != dims {
        return Err(Error::Shape(format!("box {name} is interpreted with shape {:?}, expected {dims:?}", t.dims)));
    }
    Ok(t)
}

fn dim_of(dims: &BTreeMap<String, usize>, object: &str) -> Result<usize> {
    dims.get(object).copied().ok_or_else(|| Error::MissingSymbol(format!("no dimension for object {object}")))
}

impl Backend<bool> for RelInterp {
    fn dim(&self, object: &str) -> Result<usize> {
        dim_of(&self.dims, object)
    }

    fn boxed(&self, name: &str, dims: &[usize], fillings: &[LayeredForm]) -> Result<Tensor<bool>> {
        if !fillings.is_empty() {
            return Err(Error::Unsupported(format!("box {name} has holes and no relational reading")));
        }
        lookup(&self.boxes, name, dims).cloned()
    }

    fn negate(&self, t: Tensor<bool>) -> Result<Tensor<bool>> {
        Ok(t.map(|x| !x))
    }
}

impl Backend<f64> for VectInterp {
    fn dim(&self, object: &str) -> Result<usize> {
        dim_of(&self.dims, object)
    }

    fn boxed(&self, name: &str, dims: &[usize], fillings: &[LayeredForm]) -> Result<Tensor<f64>> {
        if fillings.is_empty() {
            return lookup(&self.boxes, name, dims).cloned();
        }
        let rule = self
            .operators
            .get(name)
            .and_then(|r| self.rules.get(r))
            .ok_or_else(|| Error::Unsupported(format!("box {name} has holes and no registered operator")))?;
        let args = fillings.iter().map(|f| eval_form(f, self)).collect::<Result<Vec<_>>>()?;
        let out = rule(&args)?;
        if out.dims != dims {
            return Err(Error::Shape(format!("operator for {name} gives shape {:?}, expected {dims:?}", out.dims)));
        }
        Ok(out)
    }

    fn negate(&self, _: Tensor<f64>) -> Result<Tensor<f64>> {
        Err(Error::Unsupported("cut in a vector space model: negation is not linear".into()))
    }
}

fn generator<T: Scalar>(g: &Generator, b: &dyn Backend<T>) -> Result<Tensor<T>> {
    Ok(match g {
        Generator::Box { name, dom, cod, fillings } => {
            let dims = b.dims(&dom.concat(cod))?;
            b.boxed(name, &dims, fillings)?
        }
        Generator::Spider { legs_in, legs_out, object } => {
            let d = b.dim(object)?;
            Tensor::indicator(vec![d; legs_in + legs_out], |i| i.iter().all(|x| *x == i[0]))
        }
        Generator::Cup { object } | Generator::Cap { object } => {
            let d = b.dim(object)?;
            Tensor::indicator(vec![d, d], |i| i[0] == i[1])
        }
        Generator::Swap { left, right } => {
            let (l, r) = (b.dim(left)?, b.dim(right)?);
            Tensor::indicator(vec![l, r, r, l], |i| i[0] == i[3] && i[1] == i[2])
        }
        Generator::Cut { inner } => b.negate(eval_form(inner, b)?)?,
    })
}

/// Tensor over `dom ++ cod`, contracting one layer at a time onto the
/// identity of the domain.
fn eval_form<T: Scalar>(form: &LayeredForm, b: &dyn Backend<T>) -> Result<Tensor<T>> {
    let dom = b.dims(&form.dom)?;
    let n = dom.len();
    let mut state = Tensor::indicator([dom.clone(), dom].concat(), |i| (0..n).all(|k| i[k] == i[k + n]));
    for layer in &form.layers {
        let g = generator(&layer.generator, b)?;
        state = state.apply(n + layer.left.len(), layer.generator.dom().len(), &g);
    }
    Ok(state)
}

/// Boolean tensor indexed by the diagram's dom then cod wires.
pub fn eval_rel(d: &Diagram, interp: &RelInterp) -> Result<Tensor<bool>> {
    eval_form(&LayeredForm::of(d), interp)
}

/// Real tensor indexed by the diagram's dom then cod wires.
pub fn eval_vect(d: &Diagram, interp: &VectInterp) -> Result<Tensor<f64>> {
    eval_form(&LayeredForm::of(d), interp)
}

/// Reads predicate tables as box relations over a universe shared by every
/// object. A box without a table is empty, except that a singleton box
/// named after a model constant holds exactly that element.
pub fn model_to_relinterp(m: &Model, sig: &Signature) -> Result<RelInterp> {
    let n = m.universe;
    let dims = sig.objects.iter().map(|o| (o.clone(), n)).collect();
    let mut boxes = BTreeMap::new();
    for decl in sig.boxes.iter().filter(|b| b.holes.is_empty()) {
        let arity = decl.arity();
        let shape = vec![n; arity];
        let t = match m.predicates.get(&decl.name) {
            Some(tuples) => {
                if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
                    return Err(Error::Shape(format!(
                        "predicate {} has a tuple of length {}, box has {arity} ports",
                        decl.name,
                        bad.len()
                    )));
                }
                Tensor::indicator(shape, |ports| {
                    let mut args = vec![0; arity];
                    for (p, &e) in ports.iter().enumerate() {
                        args[decl.arg_position(p)] = e;
                    }
                    tuples.contains(&args)
                })
            }
            None => match m.constants.get(&decl.name) {
                Some(&c) if decl.singleton && arity == 1 => Tensor::indicator(shape, |i| i[0] == c),
                _ => Tensor::zeros(shape),
            },
        };
        boxes.insert(decl.name.clone(), t);
    }
    Ok(RelInterp { dims, boxes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{compose, tensor};
    use crate::grammar::{builtin, first_reading};
    use crate::logic::evaluate;
    use crate::peirce::to_fol;
    use crate::types::GrammarType;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n() -> Ty {
        Ty::of(&["N"])
    }

    fn diagram_of(lex: &str, sentence: &str, target: &str) -> Diagram {
        let lex = builtin(lex).unwrap();
        first_reading(sentence, &lex, &GrammarType::atom(target)).unwrap().value.as_diagram().unwrap().clone()
    }

    fn rel(n: usize) -> RelInterp {
        RelInterp { dims: [("N".to_string(), n)].into(), boxes: BTreeMap::new() }
    }

    fn random(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> Tensor<f64> {
        let len = dims.iter().product();
        Tensor { dims, data: (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect() }
    }

    #[test]
    fn identity_is_the_diagonal() {
        let t = eval_rel(&Diagram::id(n()), &rel(3)).unwrap();
        assert_eq!(t.dims, vec![3, 3]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.get(&[i, j]), i == j);
            }
        }
    }

    #[test]
    fn mans_not_hot_on_a_model() {
        let d = diagram_of("peirce", "Man's Not Hot", "s");
        let sig = builtin("peirce").unwrap().signature().clone();
        let m = Model::new(2).with_predicate("man", &[&[0], &[1]]).with_predicate("hot", &[&[0]]);
        let t = eval_rel(&d, &model_to_relinterp(&m, &sig).unwrap()).unwrap();
        assert_eq!(t.as_scalar(), Some(true));
        let f = to_fol(&d, &sig).unwrap();
        assert!(evaluate(&f, &m, &BTreeMap::new()).unwrap());
        let all_hot = m.with_predicate("hot", &[&[0], &[1]]);
        assert_eq!(eval_rel(&d, &model_to_relinterp(&all_hot, &sig).unwrap()).unwrap().as_scalar(), Some(false));
    }

    #[test]
    fn double_negation() {
        let man = Diagram::generator("man", Ty::unit(), n());
        let mut i = rel(3);
        i.boxes.insert("man".into(), Tensor { dims: vec![3], data: vec![true, false, true] });
        let once = eval_rel(&Diagram::cut(man.clone()), &i).unwrap();
        assert_eq!(once.data, vec![false, true, false]);
        assert_eq!(eval_rel(&Diagram::cut(Diagram::cut(man.clone())), &i).unwrap(), eval_rel(&man, &i).unwrap());
    }

    #[test]
    fn very_big_car_is_b_b_car() {
        let d = diagram_of("toy", "very big car", "n");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = random(&mut rng, vec![4, 4]);
        let car = random(&mut rng, vec![4]);
        let mut i = VectInterp { dims: [("N".to_string(), 4)].into(), ..Default::default() };
        i.boxes.insert("big".into(), b.clone());
        i.boxes.insert("car".into(), car.clone());
        let got = eval_vect(&d, &i).unwrap();
        // oracle: v' = car · B, twice
        let mut v = car.data.clone();
        for _ in 0..2 {
            v = (0..4).map(|j| (0..4).map(|k| v[k] * b.data[k * 4 + j]).sum()).collect();
        }
        assert_eq!(got.dims, vec![4]);
        for (x, y) in got.data.iter().zip(&v) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn snakes_straighten() {
        let snake = compose(
            &tensor(&Diagram::id(n()), &Diagram::cap("N")),
            &tensor(&Diagram::cup("N"), &Diagram::id(n())),
        )
        .unwrap();
        assert_eq!(eval_rel(&snake, &rel(3)).unwrap(), eval_rel(&Diagram::id(n()), &rel(3)).unwrap());
        let i = VectInterp { dims: [("N".to_string(), 3)].into(), ..Default::default() };
        let t = eval_vect(&snake, &i).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!((t.get(&[a, b]) - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alice_loves_bob_contracts() {
        let d = diagram_of("ccg", "Alice loves Bob", "s");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (dn, ds) = (3, 2);
        let alice = random(&mut rng, vec![dn]);
        let bob = random(&mut rng, vec![dn]);
        let loves = random(&mut rng, vec![dn, ds, dn]);
        let mut i = VectInterp { dims: [("N".to_string(), dn), ("S".to_string(), ds)].into(), ..Default::default() };
        i.boxes.insert("Alice".into(), alice.clone());
        i.boxes.insert("Bob".into(), bob.clone());
        i.boxes.insert("loves".into(), loves.clone());
        let got = eval_vect(&d, &i).unwrap();
        assert_eq!(got.dims, vec![ds]);
        for s in 0..ds {
            let mut want = 0.0;
            for a in 0..dn {
                for b in 0..dn {
                    want += alice.data[a] * loves.get(&[a, s, b]) * bob.data[b];
                }
            }
            assert!((got.data[s] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cuts_are_not_linear() {
        let i = VectInterp { dims: [("N".to_string(), 2)].into(), ..Default::default() };
        let err = eval_vect(&Diagram::cut(Diagram::id(n())), &i).unwrap_err();
        assert!(err.to_string().contains("negation is not linear"), "{err}");
    }

    #[test]
    fn twice_squares_the_filling() {
        let d = diagram_of("holes", "ideas sleep furiously", "s");
        let text = r#"{"dims": {"N": 2}, "boxes": {"I": [1.0, 2.0], "S": [3.0, 0.5]}, "operators": {"F": "twice"}}"#;
        let i = VectInterp::from_json(text).unwrap();
        assert_eq!(eval_vect(&d, &i).unwrap().as_scalar(), Some(16.0));
        let mut plain = i.clone();
        plain.operators.clear();
        assert!(matches!(eval_vect(&d, &plain), Err(Error::Unsupported(_))));
        let r = RelInterp { dims: i.dims.clone(), boxes: BTreeMap::new() };
        assert!(matches!(eval_rel(&d, &r), Err(Error::Unsupported(_))));
    }

    #[test]
    fn interp_files() {
        let i = RelInterp::from_json(r#"{"dims": {"N": 2}, "boxes": {"man": [1, 0], "kills": [[false, true], [0, 0]]}}"#).unwrap();
        assert_eq!(i.boxes["man"].data, vec![true, false]);
        assert_eq!(i.boxes["kills"].dims, vec![2, 2]);
        assert!(RelInterp::from_json(r#"{"boxes": {"man": [[1], [0, 1]]}}"#).is_err());
        assert!(VectInterp::from_json(r#"{"operators": {"F": "thrice"}}"#).is_err());
        let man = Diagram::generator("man", Ty::unit(), n());
        let mut wrong = i.clone();
        wrong.dims.insert("N".into(), 3);
        assert!(matches!(eval_rel(&man, &wrong), Err(Error::Shape(_))));
        assert!(matches!(eval_rel(&man, &rel(2)), Err(Error::MissingSymbol(_))));
    }

    #[test]
    fn models_become_relations() {
        let sig = builtin("peirce").unwrap().signature().clone();
        let m = Model::new(2).with_predicate("man", &[&[0]]).with_predicate("kills", &[&[0, 1]]).with_constant("Alice", 1);
        let i = model_to_relinterp(&m, &sig).unwrap();
        assert_eq!(i.dims["N"], 2);
        assert_eq!(i.boxes["man"].data, vec![true, false]);
        assert_eq!(i.boxes["mortal"].data, vec![false, false]);
        assert_eq!(i.boxes["Alice"].data, vec![false, true]);
        // kills is N → N with arguments swapped: port (dom, cod) = (1, 0)
        let k = &i.boxes["kills"];
        assert_eq!(k.data.iter().filter(|x| **x).count(), 1);
        assert!(k.get(&[1, 0]));
        let bad = Model::new(2).with_predicate("man", &[&[0, 1]]);
        assert!(model_to_relinterp(&bad, &sig).is_err());
    }
}
