use super::{FolTerm, Formula};
use crate::error::{Error, Result};
use crate::types::is_ident_char;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Open,
    Close,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Eq,
    Forall,
    Exists,
    Top,
    Bottom,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (i, c) = chars[k];
        let next = chars.get(k + 1).map(|c| c.1);
        let single = match c {
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '~' | '¬' | '!' => Some(Tok::Not),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            '→' | '⇒' => Some(Tok::Implies),
            '=' => Some(Tok::Eq),
            '∀' => Some(Tok::Forall),
            '∃' => Some(Tok::Exists),
            '⊤' => Some(Tok::Top),
            '⊥' => Some(Tok::Bottom),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            k += 1;
        } else if c == '-' && next == Some('>') {
            out.push((i, Tok::Implies));
            k += 2;
        } else if is_ident_char(c) {
            let mut s = String::new();
            while k < chars.len() && is_ident_char(chars[k].1) {
                s.push(chars[k].1);
                k += 1;
            }
            out.push((
                i,
                match s.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "true" => Tok::Top,
                    "false" => Tok::Bottom,
                    _ => Tok::Ident(s),
                },
            ));
        } else {
            return Err(Error::syntax(i, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    bound: Vec<String>,
}

/// Parses ASCII (`exists x. man(x) & ~hot(x)`) or Unicode
/// (`∃x. man(x) ∧ ¬hot(x)`) formulae. Identifiers bound by a quantifier are
/// variables; any other term identifier is a constant.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len(), bound: Vec::new() };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(Error::syntax(p.here(), "trailing input"));
    }
    Ok(f)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(Error::syntax(self.here(), format!("expected {t:?}")))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if matches!(self.peek(), Some(Tok::Forall | Tok::Exists)) {
            return self.quantified();
        }
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> Result<Formula> {
        let universal = self.peek() == Some(&Tok::Forall);
        self.pos += 1;
        let mut vars = Vec::new();
        while let Some(Tok::Ident(v)) = self.peek() {
            vars.push(v.clone());
            self.pos += 1;
        }
        if vars.is_empty() {
            return Err(Error::syntax(self.here(), "expected a variable"));
        }
        self.expect(Tok::Dot)?;
        self.bound.extend(vars.iter().cloned());
        let body = self.formula()?;
        self.bound.truncate(self.bound.len() - vars.len());
        Ok(vars.iter().rev().fold(body, |b, v| {
            if universal {
                Formula::forall(v, b)
            } else {
                Formula::exists(v, b)
            }
        }))
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Or) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Forall | Tok::Exists) => self.quantified(),
            Some(Tok::Top) => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::Close)?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat(&Tok::Eq) {
                    let lhs = self.term_of(name);
                    let rhs = self.term()?;
                    return Ok(Formula::eq(lhs, rhs));
                }
                let mut args = Vec::new();
                if self.eat(&Tok::Open) && !self.eat(&Tok::Close) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::Close) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(Formula::Atom { pred: name, args })
            }
            _ => Err(Error::syntax(self.here(), "expected a formula")),
        }
    }

    fn term_of(&self, name: String) -> FolTerm {
        if self.bound.contains(&name) {
            FolTerm::Var(name)
        } else {
            FolTerm::Const(name)
        }
    }

    fn term(&mut self) -> Result<FolTerm> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(self.term_of(name))
            }
            _ => Err(Error::syntax(self.here(), "expected a term")),
        }
    }
}
