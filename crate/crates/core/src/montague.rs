//! Sentences to first-order formulas through a lexicon of typed lambda
//! terms, and the comparison of that reading with the diagrammatic one.

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::grammar::{first_reading, Lexicon};
use crate::logic::{equivalent, singleton_rewrite, EquivConfig, FolSignature, Formula, Verdict};
use crate::peirce::fol_of_sentence;
use crate::types::GrammarType;

/// The closed formula a logic lexicon assigns to a sentence of type `s`.
pub fn montague_formula(sentence: &str, lex: &Lexicon) -> Result<Formula> {
    let reading = first_reading(sentence, lex, &GrammarType::atom("s"))?;
    let f = reading
        .value
        .as_formula()
        .ok_or_else(|| Error::Unsupported("the lexicon produces diagrams, not formulas".into()))?;
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::Type(format!("meaning of `{sentence}` has free variables {free:?}")));
    }
    Ok(f.clone())
}

/// Both readings of a sentence and the verdict on their equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub montague: Formula,
    pub peirce: Formula,
    pub verdict: Verdict,
}

impl CrossCheck {
    pub fn to_json(&self) -> Json {
        json!({
            "montague": self.montague.to_string(),
            "peirce": self.peirce.to_string(),
            "equivalent": self.verdict.is_equivalent(),
            "verdict": self.verdict.to_string(),
        })
    }
}

/// Reads `sentence` with both lexicons and compares the formulas on every
/// model up to the bound in `cfg`.
pub fn cross_validate(sentence: &str, montague: &Lexicon, peirce: &Lexicon, cfg: &EquivConfig) -> Result<CrossCheck> {
    let singletons = peirce.signature().singletons();
    let m = singleton_rewrite(&montague_formula(sentence, montague)?, &singletons);
    let p = fol_of_sentence(sentence, peirce)?;
    // only the symbols the two formulas use, so small universes stay exhaustive
    let verdict = equivalent(&m, &p, &FolSignature::default(), cfg);
    Ok(CrossCheck { montague: m, peirce: p, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::builtin;
    use crate::logic::parse_formula;

    fn mont(sentence: &str) -> Formula {
        montague_formula(sentence, &builtin("montague").unwrap()).unwrap()
    }

    #[test]
    fn alice_sleeps() {
        assert_eq!(mont("Alice sleeps"), parse_formula("sleeps(Alice)").unwrap());
    }

    #[test]
    fn every_man_sleeps() {
        assert!(mont("every man sleeps").alpha_eq(&parse_formula("forall y. man(y) -> sleeps(y)").unwrap()));
    }

    #[test]
    fn alice_kills_a_mortal() {
        let f = mont("Alice kills a mortal");
        assert!(f.alpha_eq(&parse_formula("exists x. mortal(x) & kills(Alice, x)").unwrap()), "{f}");
    }

    #[test]
    fn diagram_lexicons_are_rejected() {
        assert!(matches!(montague_formula("Alice sleeps", &builtin("peirce").unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn shared_fragment_agrees() {
        let (m, p) = (builtin("montague").unwrap(), builtin("peirce").unwrap());
        for s in ["every man sleeps", "Man's Not Hot", "no man is an island", "Alice sleeps"] {
            let c = cross_validate(s, &m, &p, &EquivConfig::bounded(3)).unwrap();
            assert!(c.verdict.is_equivalent(), "{s}: {} vs {}: {}", c.montague, c.peirce, c.verdict);
            assert!(matches!(c.verdict, Verdict::Equivalent { exhaustive: true, .. }), "{s}");
        }
    }

    #[test]
    fn a_wrong_reading_is_caught() {
        let (m, p) = (builtin("montague").unwrap(), builtin("peirce").unwrap());
        let c = cross_validate("every man sleeps", &m, &p, &EquivConfig::bounded(2)).unwrap();
        let wrong = parse_formula("exists x. man(x) & sleeps(x)").unwrap();
        assert!(!equivalent(&c.peirce, &wrong, &FolSignature::default(), &EquivConfig::bounded(2)).is_equivalent());
    }
}
