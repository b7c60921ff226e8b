use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lambda::{check, parse_term, ConstantTable, Term};
use crate::logic::FolSignature;
use crate::types::{parse_grammar_type, semantic_type_of, GrammarType, SemType, Signature};

/// One dictionary entry: a word, its grammatical type and its meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub gtype: GrammarType,
    /// Elaborated meaning; its type is the image of `gtype`.
    pub meaning: Term,
    /// The meaning as written in the lexicon file.
    pub source: String,
}

/// A declared unary rule `from ⇒ to` with a meaning of type `F(from) -> F(to)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coercion {
    pub name: String,
    pub from: GrammarType,
    pub to: GrammarType,
    pub meaning: Term,
}

/// What meanings evaluate to: diagrams over a signature or formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semantics {
    Diagrams(Signature),
    Logic(FolSignature),
}

/// An immutable, fully typechecked lexicon.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub atoms: BTreeSet<String>,
    pub assignment: BTreeMap<String, SemType>,
    pub semantics: Semantics,
    pub consts: ConstantTable,
    pub entries: Vec<LexiconEntry>,
    pub coercions: Vec<Coercion>,
    empty_sig: Signature,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLexicon {
    #[serde(default)]
    atoms: Vec<String>,
    #[serde(default)]
    assignment: BTreeMap<String, String>,
    signature: Option<Signature>,
    logic: Option<FolSignature>,
    #[serde(default)]
    coercions: Vec<RawCoercion>,
    #[serde(default)]
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoercion {
    name: String,
    from: String,
    to: String,
    meaning: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    word: String,
    #[serde(rename = "type")]
    gtype: String,
    meaning: String,
}

impl Lexicon {
    pub fn empty() -> Self {
        Lexicon {
            atoms: BTreeSet::new(),
            assignment: BTreeMap::new(),
            semantics: Semantics::Diagrams(Signature::default()),
            consts: ConstantTable::diagrams(&Signature::default()).expect("primitive table"),
            entries: Vec::new(),
            coercions: Vec::new(),
            empty_sig: Signature::default(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parses and typechecks a lexicon. Every failing entry is reported.
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::empty());
        }
        let raw: RawLexicon = serde_json::from_str(text)?;
        let mut errors = Vec::new();

        let (semantics, consts) = match (raw.signature, raw.logic) {
            (Some(_), Some(_)) => {
                return Err(Error::Lexicon(vec!["a lexicon has either \"signature\" or \"logic\", not both".into()]))
            }
            (_, Some(fol)) => {
                let t = ConstantTable::logic(&fol)?;
                (Semantics::Logic(fol), t)
            }
            (sig, None) => {
                let sig = sig.unwrap_or_default();
                let violations = sig.validate();
                if !violations.is_empty() {
                    return Err(Error::Lexicon(violations.iter().map(|v| v.to_string()).collect()));
                }
                let t = ConstantTable::diagrams(&sig)?;
                (Semantics::Diagrams(sig), t)
            }
        };

        let atoms: BTreeSet<String> = raw.atoms.into_iter().collect();
        let mut assignment = BTreeMap::new();
        for (atom, ty) in &raw.assignment {
            if !atoms.is_empty() && !atoms.contains(atom) {
                errors.push(format!("assignment for undeclared atom {atom}"));
            }
            match SemType::parse(ty) {
                Ok(t) => {
                    assignment.insert(atom.clone(), t);
                }
                Err(e) => errors.push(format!("atom {atom}: {e}")),
            }
        }
        for a in &atoms {
            if !raw.assignment.contains_key(a) {
                errors.push(format!("atom {a} has no semantic type"));
            }
        }

        let typed = |what: &str, gtype: &str, meaning: &str, errors: &mut Vec<String>| -> Option<(GrammarType, Term)> {
            let result = (|| {
                let g = parse_grammar_type(gtype)?;
                if let Some(a) = g.atoms().iter().find(|a| !atoms.is_empty() && !atoms.contains(*a)) {
                    return Err(Error::MissingSymbol(format!("undeclared atom {a}")));
                }
                let expected = semantic_type_of(&g, &assignment)?;
                let term = parse_term(meaning)?;
                let term = check(&term, &expected, &BTreeMap::new(), &consts)?;
                Ok((g, term))
            })();
            match result {
                Ok(x) => Some(x),
                Err(e) => {
                    errors.push(format!("{what}: {e}"));
                    None
                }
            }
        };

        let mut entries = Vec::new();
        for e in &raw.entries {
            if let Some((gtype, meaning)) = typed(&format!("word `{}`", e.word), &e.gtype, &e.meaning, &mut errors) {
                entries.push(LexiconEntry { word: e.word.clone(), gtype, meaning, source: e.meaning.clone() });
            }
        }

        let mut coercions = Vec::new();
        for c in &raw.coercions {
            let arrow = format!("({}) -> ({})", c.from, c.to);
            if let Some((g, meaning)) = typed(&format!("coercion `{}`", c.name), &arrow, &c.meaning, &mut errors) {
                let GrammarType::Under(from, to) = g else { unreachable!("arrow type parses as Under") };
                coercions.push(Coercion { name: c.name.clone(), from: *from, to: *to, meaning });
            }
        }

        if !errors.is_empty() {
            return Err(Error::Lexicon(errors));
        }
        Ok(Lexicon { atoms, assignment, semantics, consts, entries, coercions, empty_sig: Signature::default() })
    }

    /// The diagram signature, empty for a logic lexicon.
    pub fn signature(&self) -> &Signature {
        match &self.semantics {
            Semantics::Diagrams(s) => s,
            Semantics::Logic(_) => &self.empty_sig,
        }
    }

    pub fn entries_for<'a>(&'a self, word: &'a str) -> impl Iterator<Item = (usize, &'a LexiconEntry)> + 'a {
        self.entries.iter().enumerate().filter(move |(_, e)| e.word == word)
    }

    pub fn knows(&self, word: &str) -> bool {
        self.entries.iter().any(|e| e.word == word)
    }

    /// Splits on whitespace, then joins runs of tokens that spell a
    /// multiword entry, longest match first.
    pub fn tokenize(&self, sentence: &str) -> Result<Vec<String>> {
        let raw: Vec<&str> = sentence.split_whitespace().collect();
        let longest = self.entries.iter().map(|e| e.word.split_whitespace().count()).max().unwrap_or(1);
        let mut out = Vec::new();
        let mut unknown = Vec::new();
        let mut i = 0;
        while i < raw.len() {
            let k = (2..=longest.min(raw.len() - i))
                .rev()
                .find(|&k| self.knows(&raw[i..i + k].join(" ")))
                .unwrap_or(1);
            let tok = raw[i..i + k].join(" ");
            if !self.knows(&tok) && !unknown.contains(&tok) {
                unknown.push(tok.clone());
            }
            out.push(tok);
            i += k;
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownWords(unknown));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = r#"{
        "atoms": ["s", "n"],
        "assignment": {"s": "(1, 1)", "n": "(1, N)"},
        "signature": {"objects": ["N"], "boxes": [
            {"name": "man", "dom": [], "cod": ["N"]},
            {"name": "sleeps", "dom": ["N"], "cod": []}
        ]},
        "entries": [
            {"word": "man", "type": "n", "meaning": "man"},
            {"word": "sleeps", "type": "n → s", "meaning": "λx. sleeps ∘ x"},
            {"word": "fast asleep", "type": "n → s", "meaning": "λx. sleeps ∘ x"}
        ]
    }"#;

    #[test]
    fn loads_and_tokenizes() {
        let lex = Lexicon::from_json(MINI).unwrap();
        assert_eq!(lex.entries.len(), 3);
        assert_eq!(lex.tokenize("man  fast asleep").unwrap(), vec!["man", "fast asleep"]);
        assert_eq!(lex.tokenize("man sleeps").unwrap(), vec!["man", "sleeps"]);
        assert_eq!(lex.tokenize("woman fast sleeps"), Err(Error::UnknownWords(vec!["woman".into(), "fast".into()])));
    }

    #[test]
    fn empty_file_is_an_empty_lexicon() {
        let lex = Lexicon::from_json("  \n").unwrap();
        assert!(lex.entries.is_empty());
        assert!(lex.coercions.is_empty());
    }

    #[test]
    fn errors_name_every_bad_word() {
        let bad = MINI
            .replace(r#""meaning": "man""#, r#""meaning": "sleeps""#)
            .replace(r#""type": "n → s", "meaning": "λx. sleeps ∘ x"},"#, r#""type": "n → s", "meaning": "λx. x ∘"},"#);
        let Err(Error::Lexicon(errs)) = Lexicon::from_json(&bad) else { panic!() };
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert!(errs[0].contains("word `man`"));
        assert!(errs[1].contains("word `sleeps`"));
    }

    #[test]
    fn unknown_atoms_are_rejected() {
        let bad = MINI.replace(r#""type": "n", "meaning": "man""#, r#""type": "q", "meaning": "man""#);
        let Err(Error::Lexicon(errs)) = Lexicon::from_json(&bad) else { panic!() };
        assert!(errs[0].contains("undeclared atom q"), "{errs:?}");
    }
}
