use std::fmt;

use serde_json::{json, Value as Json};

use super::Lexicon;
use crate::error::{Error, Result};
use crate::lambda::{forget_rigid_insts, Term};
use crate::types::GrammarType;

/// A derivation in the applicative categorial grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxTree {
    Leaf {
        word: String,
        /// Index into `Lexicon::entries`.
        entry: usize,
        gtype: GrammarType,
    },
    /// `x ← y` applied to the `y` on its right.
    ApplyLeft { function: Box<SyntaxTree>, argument: Box<SyntaxTree>, gtype: GrammarType },
    /// `y → x` applied to the `y` on its left.
    ApplyRight { argument: Box<SyntaxTree>, function: Box<SyntaxTree>, gtype: GrammarType },
    Coerce { rule: String, sub: Box<SyntaxTree>, gtype: GrammarType },
}

impl SyntaxTree {
    pub fn gtype(&self) -> &GrammarType {
        match self {
            SyntaxTree::Leaf { gtype, .. }
            | SyntaxTree::ApplyLeft { gtype, .. }
            | SyntaxTree::ApplyRight { gtype, .. }
            | SyntaxTree::Coerce { gtype, .. } => gtype,
        }
    }

    pub fn words(&self) -> Vec<&str> {
        match self {
            SyntaxTree::Leaf { word, .. } => vec![word],
            SyntaxTree::ApplyLeft { function: a, argument: b, .. }
            | SyntaxTree::ApplyRight { argument: a, function: b, .. } => {
                let mut w = a.words();
                w.extend(b.words());
                w
            }
            SyntaxTree::Coerce { sub, .. } => sub.words(),
        }
    }

    /// Rule names of every coercion used, outermost first.
    pub fn coercions(&self) -> Vec<&str> {
        match self {
            SyntaxTree::Leaf { .. } => Vec::new(),
            SyntaxTree::ApplyLeft { function: a, argument: b, .. }
            | SyntaxTree::ApplyRight { argument: a, function: b, .. } => {
                let mut w = a.coercions();
                w.extend(b.coercions());
                w
            }
            SyntaxTree::Coerce { rule, sub, .. } => {
                let mut w = vec![rule.as_str()];
                w.extend(sub.coercions());
                w
            }
        }
    }

    /// Recomputes the root type bottom-up, failing on an ill-typed node.
    pub fn derive_type(&self, lex: &Lexicon) -> Result<GrammarType> {
        let bad = |msg: String| Error::Type(format!("ill-typed derivation: {msg}"));
        let t = match self {
            SyntaxTree::Leaf { word, entry, .. } => {
                let e = lex.entries.get(*entry).ok_or_else(|| bad(format!("no entry {entry}")))?;
                if &e.word != word {
                    return Err(bad(format!("entry {entry} is not `{word}`")));
                }
                e.gtype.clone()
            }
            SyntaxTree::ApplyLeft { function, argument, .. } => match function.derive_type(lex)? {
                GrammarType::Over(x, y) if *y == argument.derive_type(lex)? => *x,
                other => return Err(bad(format!("{other} cannot take an argument on the right"))),
            },
            SyntaxTree::ApplyRight { argument, function, .. } => match function.derive_type(lex)? {
                GrammarType::Under(y, x) if *y == argument.derive_type(lex)? => *x,
                other => return Err(bad(format!("{other} cannot take an argument on the left"))),
            },
            SyntaxTree::Coerce { rule, sub, .. } => {
                let c = lex
                    .coercions
                    .iter()
                    .find(|c| &c.name == rule)
                    .ok_or_else(|| bad(format!("no coercion {rule}")))?;
                if sub.derive_type(lex)? != c.from {
                    return Err(bad(format!("coercion {rule} does not apply")));
                }
                c.to.clone()
            }
        };
        if &t != self.gtype() {
            return Err(bad(format!("node records {} but derives {t}", self.gtype())));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Json {
        match self {
            SyntaxTree::Leaf { word, gtype, .. } => json!({"rule": "leaf", "type": gtype.to_string(), "word": word}),
            SyntaxTree::ApplyLeft { function, argument, gtype } => json!({
                "rule": "forward", "type": gtype.to_string(),
                "function": function.to_json(), "argument": argument.to_json(),
            }),
            SyntaxTree::ApplyRight { argument, function, gtype } => json!({
                "rule": "backward", "type": gtype.to_string(),
                "argument": argument.to_json(), "function": function.to_json(),
            }),
            SyntaxTree::Coerce { rule, sub, gtype } => json!({
                "rule": "coerce", "name": rule, "type": gtype.to_string(), "sub": sub.to_json(),
            }),
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            SyntaxTree::Leaf { word, gtype, .. } => writeln!(f, "{pad}{gtype}  \"{word}\""),
            SyntaxTree::ApplyLeft { function, argument, gtype } => {
                writeln!(f, "{pad}{gtype}  >")?;
                function.write_indented(f, depth + 1)?;
                argument.write_indented(f, depth + 1)
            }
            SyntaxTree::ApplyRight { argument, function, gtype } => {
                writeln!(f, "{pad}{gtype}  <")?;
                argument.write_indented(f, depth + 1)?;
                function.write_indented(f, depth + 1)
            }
            SyntaxTree::Coerce { rule, sub, gtype } => {
                writeln!(f, "{pad}{gtype}  [{rule}]")?;
                sub.write_indented(f, depth + 1)
            }
        }
    }
}

/// Indented text, one node per line: type, then `>` (forward), `<`
/// (backward), `[rule]` (coercion) or the quoted word.
impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

/// Closes a cell under the unary rules. A rule is not reapplied on top of
/// a chain of coercions that already used it.
fn close_unary(cell: &mut Vec<SyntaxTree>, lex: &Lexicon) {
    let mut i = 0;
    while i < cell.len() {
        for c in &lex.coercions {
            let tree = &cell[i];
            if tree.gtype() != &c.from {
                continue;
            }
            let mut t = tree;
            let mut used = false;
            while let SyntaxTree::Coerce { rule, sub, .. } = t {
                used |= rule == &c.name;
                t = sub;
            }
            if used {
                continue;
            }
            let new = SyntaxTree::Coerce { rule: c.name.clone(), sub: Box::new(tree.clone()), gtype: c.to.clone() };
            cell.push(new);
        }
        i += 1;
    }
}

/// All derivations of `target` over `words`, by CYK chart parsing with
/// forward and backward application plus the lexicon's unary rules.
///
/// Derivations come out in a fixed order: split points left to right, then
/// lexicon order within each cell.
pub fn parse_sentence(words: &[String], lex: &Lexicon, target: &GrammarType) -> Result<Vec<SyntaxTree>> {
    let unknown: Vec<String> = words.iter().filter(|w| !lex.knows(w)).cloned().collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownWords(unknown));
    }
    let n = words.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // chart[i][l - 1]: derivations of words[i..i + l]
    let mut chart: Vec<Vec<Vec<SyntaxTree>>> = vec![vec![Vec::new(); n]; n];
    for (i, w) in words.iter().enumerate() {
        let mut cell: Vec<SyntaxTree> = lex
            .entries_for(w)
            .map(|(k, e)| SyntaxTree::Leaf { word: w.clone(), entry: k, gtype: e.gtype.clone() })
            .collect();
        close_unary(&mut cell, lex);
        chart[i][0] = cell;
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let mut cell = Vec::new();
            for split in 1..len {
                let (left, right) = (&chart[i][split - 1], &chart[i + split][len - split - 1]);
                for l in left {
                    for r in right {
                        if let GrammarType::Over(x, y) = l.gtype() {
                            if **y == *r.gtype() {
                                cell.push(SyntaxTree::ApplyLeft {
                                    function: Box::new(l.clone()),
                                    argument: Box::new(r.clone()),
                                    gtype: (**x).clone(),
                                });
                            }
                        }
                        if let GrammarType::Under(y, x) = r.gtype() {
                            if **y == *l.gtype() {
                                cell.push(SyntaxTree::ApplyRight {
                                    argument: Box::new(l.clone()),
                                    function: Box::new(r.clone()),
                                    gtype: (**x).clone(),
                                });
                            }
                        }
                    }
                }
            }
            close_unary(&mut cell, lex);
            chart[i][len - 1] = cell;
        }
    }
    Ok(chart[0][n - 1].iter().filter(|t| t.gtype() == target).cloned().collect())
}

/// Folds a derivation into a meaning term: leaves give entry meanings,
/// applications give `App` nodes, coercions apply the rule's meaning.
pub fn meaning_of(tree: &SyntaxTree, lex: &Lexicon) -> Result<Term> {
    Ok(forget_rigid_insts(&fold(tree, lex)?))
}

fn fold(tree: &SyntaxTree, lex: &Lexicon) -> Result<Term> {
    Ok(match tree {
        SyntaxTree::Leaf { entry, .. } => lex
            .entries
            .get(*entry)
            .ok_or_else(|| Error::MissingSymbol(format!("lexicon entry {entry}")))?
            .meaning
            .clone(),
        SyntaxTree::ApplyLeft { function, argument, .. } | SyntaxTree::ApplyRight { argument, function, .. } => {
            Term::app(fold(function, lex)?, fold(argument, lex)?)
        }
        SyntaxTree::Coerce { rule, sub, .. } => {
            let c = lex
                .coercions
                .iter()
                .find(|c| &c.name == rule)
                .ok_or_else(|| Error::MissingSymbol(format!("coercion {rule}")))?;
            Term::app(c.meaning.clone(), fold(sub, lex)?)
        }
    })
}
