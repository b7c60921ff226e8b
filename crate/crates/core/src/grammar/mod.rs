//! Lexicons and applicative categorial parsing: sentences to syntax trees to
//! meaning terms to diagrams or formulas.

mod chart;
mod lexicon;

use serde_json::{json, Value as Json};

pub use chart::{meaning_of, parse_sentence, SyntaxTree};
pub use lexicon::{Coercion, Lexicon, LexiconEntry, Semantics};

use crate::error::{Error, Result};
use crate::lambda::{beta_normalize, eval_closed, Term, Value};
use crate::types::GrammarType;

/// Names of the lexicons compiled into the library.
pub const BUILTIN_LEXICONS: [&str; 5] = ["peirce", "montague", "toy", "ccg", "holes"];

/// Source text of a built-in lexicon.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "peirce" => include_str!("../../lexicons/peirce.json"),
        "montague" => include_str!("../../lexicons/montague.json"),
        "toy" => include_str!("../../lexicons/toy.json"),
        "ccg" => include_str!("../../lexicons/ccg.json"),
        "holes" => include_str!("../../lexicons/holes.json"),
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Result<Lexicon> {
    let src = builtin_source(name).ok_or_else(|| Error::MissingSymbol(format!("no built-in lexicon {name}")))?;
    Lexicon::from_json(src)
}

pub fn load_lexicon(path: impl AsRef<std::path::Path>) -> Result<Lexicon> {
    Lexicon::load(path)
}

/// One reading of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    pub tree: SyntaxTree,
    /// Beta-normal meaning.
    pub term: Term,
    pub value: Value,
}

impl Reading {
    pub fn to_json(&self) -> Json {
        json!({
            "tree": self.tree.to_json(),
            "term": self.term.to_string(),
            "value": serde_json::to_value(&self.value).expect("values serialize"),
        })
    }
}

/// Tokenize, parse at `target`, build and normalize each meaning, evaluate.
/// An empty result means the sentence has no parse.
pub fn pipeline(sentence: &str, lex: &Lexicon, target: &GrammarType) -> Result<Vec<Reading>> {
    let words = lex.tokenize(sentence)?;
    parse_sentence(&words, lex, target)?
        .into_iter()
        .map(|tree| {
            let term = beta_normalize(&meaning_of(&tree, lex)?);
            let value = eval_closed(&term, &lex.consts, lex.signature())?;
            Ok(Reading { tree, term, value })
        })
        .collect()
}

/// The first reading, or a no-parse error.
pub fn first_reading(sentence: &str, lex: &Lexicon, target: &GrammarType) -> Result<Reading> {
    pipeline(sentence, lex, target)?.into_iter().next().ok_or_else(|| Error::NoParse(sentence.to_string()))
}
