//! The acceptance battery: ten end-to-end criteria, each reported as pass
//! or fail with a one-line detail.

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backends::{eval_rel, eval_vect, model_to_relinterp, RelInterp, Tensor, VectInterp};
use crate::diagram::{self, boxes_of, compose, equal, tensor, Diagram, Generator, LayeredForm};
use crate::grammar::{builtin, first_reading, parse_sentence, pipeline, Lexicon};
use crate::lambda::{is_normal, normalize_with, typecheck, Strategy};
use crate::logic::{equivalent, evaluate, parse_formula, EquivConfig, FolSignature, Model, ModelSpace, Verdict};
use crate::montague::{cross_validate, montague_formula};
use crate::peirce::{double_cut_elim, fol_of_sentence, spider_fuse, to_fol};
use crate::random::{random_diagram, random_term, random_ty, term_constants, DiagramConfig};
use crate::types::{GrammarType, Ty};

/// Sentences of the diagrammatic lexicon used by the model batteries.
pub const PEIRCE_SENTENCES: [&str; 8] = [
    "Alice sleeps",
    "every man sleeps",
    "Alice kills a mortal",
    "no man is an island",
    "Man's Not Hot",
    "every big man sleeps",
    "Alice is a man",
    "every mortal kills Alice",
];

/// Sentences both lexicons cover.
pub const SHARED_FRAGMENT: [&str; 6] = [
    "Alice sleeps",
    "every man sleeps",
    "Alice kills a mortal",
    "no man is an island",
    "Man's Not Hot",
    "every big man sleeps",
];

pub const TOY_INTERP: &str = include_str!("../interps/toy.json");
pub const HOLES_INTERP: &str = include_str!("../interps/holes.json");
pub const SAMPLE_MODEL: &str = include_str!("../interps/model.json");

pub const CRITERIA: [&str; 10] = [
    "toy higher-order example",
    "Montague fragment",
    "CCG to DisCoCat",
    "boxes with holes",
    "Peirce sentences",
    "backend agreement",
    "rewrite soundness",
    "algebraic laws",
    "cross-pipeline equivalence",
    "determinism",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2}. {}: {}", self.id, self.title, self.detail)
    }
}

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lex(name: &str) -> std::result::Result<Lexicon, String> {
    builtin(name).map_err(|e| e.to_string())
}

fn diagram_of(sentence: &str, lex: &Lexicon, target: &str) -> std::result::Result<Diagram, String> {
    let r = first_reading(sentence, lex, &GrammarType::atom(target)).map_err(|e| format!("{sentence}: {e}"))?;
    r.value.as_diagram().cloned().ok_or_else(|| format!("{sentence}: not a diagram"))
}

/// Runs criterion `id` (1 to 10). A panic inside a check counts as a failure.
pub fn run(id: usize) -> Outcome {
    let title = CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
    let check: fn() -> Check = match id {
        1 => toy,
        2 => montague,
        3 => ccg,
        4 => holes,
        5 => peirce_sentences,
        6 => backend_agreement,
        7 => rewrite_soundness,
        8 => algebraic_laws,
        9 => cross_pipeline,
        10 => determinism,
        _ => return Outcome { id, title, passed: false, detail: "no such criterion".into() },
    };
    let (passed, detail) = match catch_unwind(AssertUnwindSafe(check)) {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        }
    };
    Outcome { id, title, passed, detail }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=CRITERIA.len()).map(run).collect()
}

// 1 ------------------------------------------------------------------------

fn toy() -> Check {
    let lex = lex("toy")?;
    let n = GrammarType::atom("n");
    let trees = parse_sentence(&lex.tokenize("very big car").map_err(|e| e.to_string())?, &lex, &n).map_err(|e| e.to_string())?;
    ensure(trees.len() == 1, || format!("very big car has {} trees", trees.len()))?;
    let d1 = diagram_of("very big car", &lex, "n")?;
    let d2 = diagram_of("big big car", &lex, "n")?;
    ensure(equal(&d1, &d2), || format!("{d1} differs from {d2}"))?;
    let dim = 4;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let car: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // B acts on a vector v by (Bv)[j] = sum over k of big[k][j] v[k]
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..dim).map(|j| (0..dim).fold(0.0, |acc, k| acc + v[k] * big[k * dim + j])).collect()
        };
        let want = apply(&apply(&car));
        let mut interp = VectInterp { dims: [("N".to_string(), dim)].into(), ..Default::default() };
        interp.boxes.insert("big".into(), Tensor { dims: vec![dim, dim], data: big.clone() });
        interp.boxes.insert("car".into(), Tensor { dims: vec![dim], data: car.clone() });
        for d in [&d1, &d2] {
            let got = eval_vect(d, &interp).map_err(|e| e.to_string())?;
            ensure(got.data == want, || format!("seed {seed}: {:?} != {want:?}", got.data))?;
        }
    }
    Ok("one tree for `very big car`; both diagrams equal; eval_vect = B·B·car exactly on 100 seeds (dim 4)".into())
}

// 2 ------------------------------------------------------------------------

fn montague() -> Check {
    let lex = lex("montague")?;
    for (s, want) in [("Alice sleeps", "sleeps(Alice)"), ("every man sleeps", "forall x. man(x) -> sleeps(x)")] {
        let f = montague_formula(s, &lex).map_err(|e| e.to_string())?;
        let w = parse_formula(want).map_err(|e| e.to_string())?;
        ensure(f.alpha_eq(&w), || format!("{s}: got {f}, want {w}"))?;
    }
    Ok("sleeps(Alice) and forall x. man(x) -> sleeps(x), up to renaming".into())
}

// 3 ------------------------------------------------------------------------

fn count_cups(f: &LayeredForm) -> usize {
    f.layers
        .iter()
        .map(|l| match &l.generator {
            Generator::Cup { .. } => 1,
            Generator::Cut { inner } => count_cups(inner),
            Generator::Box { fillings, .. } => fillings.iter().map(count_cups).sum(),
            _ => 0,
        })
        .sum()
}

fn ccg() -> Check {
    let lex = lex("ccg")?;
    let d = diagram_of("Alice loves Bob", &lex, "s")?;
    let boxes = boxes_of(&d);
    let want: BTreeMap<String, usize> = [("Alice", 1), ("Bob", 1), ("loves", 1)].map(|(k, v)| (k.to_string(), v)).into();
    ensure(boxes == want, || format!("boxes {boxes:?}"))?;
    let cups = count_cups(&LayeredForm::of(&d));
    ensure(cups == 2, || format!("{cups} cups"))?;
    let n = Ty::of(&["N"]);
    let word = |name: &str, cod: Ty| Diagram::generator(name, Ty::unit(), cod);
    let words = tensor(&tensor(&word("Alice", n.clone()), &word("loves", Ty::of(&["N", "S", "N"]))), &word("Bob", n));
    let cups_layer = tensor(&tensor(&Diagram::cup("N"), &Diagram::id(Ty::of(&["S"]))), &Diagram::cup("N"));
    let expected = compose(&words, &cups_layer).map_err(|e| e.to_string())?;
    ensure(equal(&d, &expected), || format!("{d} is not (Alice ⊗ loves ⊗ Bob) ; (cup ⊗ id ⊗ cup)"))?;
    Ok("boxes {Alice, loves, Bob}, two cups, equal to (cup_N ⊗ id_S ⊗ cup_N) ∘ (Alice ⊗ loves ⊗ Bob)".into())
}

// 4 ------------------------------------------------------------------------

fn holes() -> Check {
    let lex = lex("holes")?;
    let n = Ty::of(&["N"]);
    let d = diagram_of("ideas sleep furiously", &lex, "s")?;
    let inner = compose(&Diagram::generator("I", Ty::unit(), n.clone()), &Diagram::generator("S", n.clone(), Ty::unit()))
        .map_err(|e| e.to_string())?;
    match &d {
        Diagram::Box { name, fillings, .. } if name == "F" && fillings.len() == 1 && equal(&fillings[0], &inner) => {}
        other => return Err(format!("ideas sleep furiously gave {other}")),
    }
    let d = diagram_of("concepts with attitude", &lex, "n")?;
    let concepts = Diagram::generator("concepts", Ty::unit(), n.clone());
    let attitude = Diagram::generator("attitude", Ty::unit(), n);
    // `with` means λx y. W(y, x): x is the object on its right, y the noun on its left
    match &d {
        Diagram::Box { name, fillings, .. }
            if name == "W" && fillings.len() == 2 && equal(&fillings[0], &concepts) && equal(&fillings[1], &attitude) => {}
        other => return Err(format!("concepts with attitude gave {other}")),
    }
    Ok("F[I ; S]; W nests concepts and attitude as its two holes, in the order of λx y. W(y, x)".into())
}

// 5 ------------------------------------------------------------------------

fn peirce_sentences() -> Check {
    let lex = lex("peirce")?;
    let targets = [
        ("Man's Not Hot", "exists x. man(x) & ~hot(x)"),
        ("no man is an island", "~(exists x. man(x) & island(x))"),
        ("Alice kills a mortal", "exists x. mortal(x) & kills(Alice, x)"),
        ("every big man sleeps", "forall x. big(x) & man(x) -> sleeps(x)"),
    ];
    let mut notes = Vec::new();
    for (s, want) in targets {
        let f = fol_of_sentence(s, &lex).map_err(|e| e.to_string())?;
        let w = parse_formula(want).map_err(|e| e.to_string())?;
        if f.alpha_eq(&w) {
            notes.push(format!("`{s}` renaming"));
            continue;
        }
        match equivalent(&f, &w, &FolSignature::default(), &EquivConfig::bounded(3)) {
            Verdict::Equivalent { exhaustive: true, models_checked, .. } => {
                notes.push(format!("`{s}` equivalent on {models_checked} models"))
            }
            v => return Err(format!("{s}: {f} vs {w}: {v}")),
        }
    }
    Ok(notes.join("; "))
}

// 6 and 7 ------------------------------------------------------------------

/// Models over the symbols of `f`: every model of size 1 to 3, then 200
/// random models of size 4.
fn battery(sig: &FolSignature, seed: u64) -> std::result::Result<Vec<Model>, String> {
    let cfg = EquivConfig { max_universe: 3, ..Default::default() };
    let (mut models, exhaustive) = cfg.models(sig);
    if !exhaustive {
        return Err(format!("too many models to enumerate for {sig:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = ModelSpace::new(sig, 4);
    models.extend((0..200).map(|_| space.random(&mut rng)));
    Ok(models)
}

struct Battery {
    diagrams: Vec<(String, Diagram, Vec<Model>)>,
    lex: Lexicon,
}

fn sentence_battery() -> std::result::Result<Battery, String> {
    let lex = lex("peirce")?;
    let mut diagrams = Vec::new();
    for (k, s) in PEIRCE_SENTENCES.iter().enumerate() {
        let d = diagram_of(s, &lex, "s")?;
        let f = to_fol(&d, lex.signature()).map_err(|e| e.to_string())?;
        diagrams.push((s.to_string(), d, battery(&f.symbols(), k as u64)?));
    }
    Ok(Battery { diagrams, lex })
}

fn relation(d: &Diagram, m: &Model, lex: &Lexicon) -> std::result::Result<bool, String> {
    let interp: RelInterp = model_to_relinterp(m, lex.signature()).map_err(|e| e.to_string())?;
    let t = eval_rel(d, &interp).map_err(|e| e.to_string())?;
    t.as_scalar().ok_or_else(|| format!("{d} is not a scalar"))
}

fn backend_agreement() -> Check {
    let b = sentence_battery()?;
    let mut total = 0;
    let mut fewest = usize::MAX;
    for (s, d, models) in &b.diagrams {
        let f = to_fol(d, b.lex.signature()).map_err(|e| e.to_string())?;
        for m in models {
            let rel = relation(d, m, &b.lex)?;
            let fol = evaluate(&f, m, &BTreeMap::new()).map_err(|e| e.to_string())?;
            ensure(rel == fol, || format!("{s}: eval_rel {rel}, evaluate {fol} on {}", serde_json::to_string(m).unwrap()))?;
        }
        total += models.len();
        fewest = fewest.min(models.len());
    }
    Ok(format!("{} sentences, {total} sentence-model pairs (at least {fewest} models each), 0 disagreements", b.diagrams.len()))
}

fn rewrite_soundness() -> Check {
    let b = sentence_battery()?;
    let mut total = 0;
    let mut changed = 0;
    for (s, d, models) in &b.diagrams {
        let fused = spider_fuse(d);
        let uncut = double_cut_elim(d);
        let both = double_cut_elim(&fused);
        changed += [&fused, &uncut, &both].iter().filter(|r| **r != d).count();
        for m in models {
            let want = relation(d, m, &b.lex)?;
            for (name, r) in [("spider_fuse", &fused), ("double_cut_elim", &uncut), ("both", &both)] {
                let got = relation(r, m, &b.lex)?;
                ensure(got == want, || format!("{s}: {name} changes the value on {}", serde_json::to_string(m).unwrap()))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} rewritten evaluations agree ({changed} of 24 rewrites changed the diagram), 0 disagreements"))
}

// 8 ------------------------------------------------------------------------

fn algebraic_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = DiagramConfig { depth: 3, width: 2, cuts: true, holes: true };
    for i in 0..1000 {
        let dom = random_ty(&mut rng, 2);
        let a = random_diagram(&mut rng, &dom, &cfg);
        let b = random_diagram(&mut rng, &a.cod(), &cfg);
        let c = random_diagram(&mut rng, &b.cod(), &cfg);
        let ab_c = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        ensure(equal(&ab_c, &a_bc), || format!("diagram {i}: associativity fails for {a} / {b} / {c}"))?;
        let unit_l = compose(&Diagram::id(a.dom()), &a).unwrap();
        let unit_r = compose(&a, &Diagram::id(a.cod())).unwrap();
        let unit_t = tensor(&a, &Diagram::id(Ty::unit()));
        ensure(equal(&unit_l, &a) && equal(&unit_r, &a) && equal(&unit_t, &a), || format!("diagram {i}: unit law fails for {a}"))?;
        let dom2 = random_ty(&mut rng, 2);
        let a2 = random_diagram(&mut rng, &dom2, &cfg);
        let b2 = random_diagram(&mut rng, &a2.cod(), &cfg);
        let lhs = compose(&tensor(&a, &a2), &tensor(&b, &b2)).unwrap();
        let rhs = tensor(&compose(&a, &b).unwrap(), &compose(&a2, &b2).unwrap());
        ensure(equal(&lhs, &rhs), || format!("diagram {i}: interchange fails for {a}, {b}, {a2}, {b2}"))?;
        let t3 = (tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
        ensure(equal(&t3.0, &t3.1), || format!("diagram {i}: tensor associativity fails"))?;
    }
    let consts = term_constants();
    let ctx = BTreeMap::new();
    let mut redexes = 0;
    for i in 0..1000 {
        let (t, ty) = random_term(&mut rng, 4);
        redexes += usize::from(!is_normal(&t));
        let outer = normalize_with(&t, Strategy::NormalOrder);
        let inner = normalize_with(&t, Strategy::Innermost);
        ensure(is_normal(&outer) && outer.alpha_eq(&inner), || format!("term {i}: {t} has normal forms {outer} and {inner}"))?;
        let got = typecheck(&outer, &ctx, &consts).map_err(|e| format!("term {i}: {t} reduces to ill-typed {outer}: {e}"))?;
        ensure(got == ty, || format!("term {i}: {t} : {ty} reduces to {outer} : {got}"))?;
    }
    Ok(format!(
        "1000 diagram triples satisfy associativity, units and interchange; 1000 terms ({redexes} with redexes) keep their type and normal form"
    ))
}

// 9 ------------------------------------------------------------------------

fn cross_pipeline() -> Check {
    let (m, p) = (lex("montague")?, lex("peirce")?);
    let mut checked = 0;
    for s in SHARED_FRAGMENT {
        let c = cross_validate(s, &m, &p, &EquivConfig::bounded(3)).map_err(|e| format!("{s}: {e}"))?;
        match c.verdict {
            Verdict::Equivalent { exhaustive: true, models_checked, .. } => checked += models_checked,
            v => return Err(format!("{s}: {} vs {}: {v}", c.montague, c.peirce)),
        }
    }
    Ok(format!("{} sentences equivalent on every model up to size 3 ({checked} models)", SHARED_FRAGMENT.len()))
}

// 10 -----------------------------------------------------------------------

/// Outputs of the `meaning`, `draw` and `eval` commands on fixed inputs,
/// computed from freshly loaded lexicons.
pub fn sample_outputs() -> std::result::Result<Vec<String>, String> {
    let err = |e: crate::Error| e.to_string();
    let mut out = Vec::new();
    let peirce = lex("peirce")?;
    for r in pipeline("Man's Not Hot", &peirce, &GrammarType::atom("s")).map_err(err)? {
        out.push(r.to_json().to_string());
    }
    out.push(fol_of_sentence("every big man sleeps", &peirce).map_err(err)?.to_string());
    for (name, s, target) in [("peirce", "every big man sleeps", "s"), ("holes", "concepts with attitude", "n"), ("ccg", "Alice loves Bob", "s")] {
        let d = diagram_of(s, &lex(name)?, target)?;
        out.push(diagram::to_dot(&d));
        out.push(diagram::to_svg(&d));
    }
    let model = Model::from_json(SAMPLE_MODEL).map_err(err)?;
    let d = diagram_of("Alice kills a mortal", &peirce, "s")?;
    let rel = eval_rel(&d, &model_to_relinterp(&model, peirce.signature()).map_err(err)?).map_err(err)?;
    out.push(rel.to_json().to_string());
    let toy = lex("toy")?;
    let v = eval_vect(&diagram_of("very big car", &toy, "n")?, &VectInterp::from_json(TOY_INTERP).map_err(err)?).map_err(err)?;
    out.push(v.to_json().to_string());
    Ok(out)
}

fn determinism() -> Check {
    let first = sample_outputs()?;
    for run in 0..4 {
        let again = sample_outputs()?;
        ensure(again == first, || format!("run {} differs from the first", run + 2))?;
    }
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!("5 runs of {} meaning/draw/eval outputs ({bytes} bytes) are byte-identical", first.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run(11).passed);
        assert!(!run(0).passed);
    }

    #[test]
    fn display_line() {
        let o = Outcome { id: 3, title: "x", passed: true, detail: "ok".into() };
        assert_eq!(o.to_string(), "[PASS]  3. x: ok");
    }
}
