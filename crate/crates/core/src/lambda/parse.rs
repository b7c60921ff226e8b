//! Surface syntax for lexicon meanings.

use std::collections::BTreeMap;

use super::{names, Term};
use crate::error::{Error, Result};
use crate::types::{is_ident_char, ObjExpr, Ty};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    Open,
    Close,
    Comma,
    Compose,
    Seq,
    Tensor,
    And,
    Or,
    Implies,
    Not,
    Forall,
    Exists,
    Transpose,
    Top,
    Bottom,
}

fn word_char(c: char) -> bool {
    is_ident_char(c) && c != 'λ' && c != 'ᵀ'
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (i, c) = chars[k];
        let next = chars.get(k + 1).map(|c| c.1);
        let two = match (c, next) {
            ('-', Some('>')) => Some(Tok::Implies),
            ('>', Some('>')) => Some(Tok::Seq),
            ('<', Some('<')) => Some(Tok::Compose),
            ('^', Some('T')) => Some(Tok::Transpose),
            _ => None,
        };
        if let Some(t) = two {
            out.push((i, t));
            k += 2;
            continue;
        }
        let one = match c {
            'λ' | '\\' => Some(Tok::Lambda),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            ',' => Some(Tok::Comma),
            '∘' => Some(Tok::Compose),
            ';' => Some(Tok::Seq),
            '⊗' | '@' => Some(Tok::Tensor),
            '∧' | '&' => Some(Tok::And),
            '∨' | '|' => Some(Tok::Or),
            '→' => Some(Tok::Implies),
            '¬' | '~' => Some(Tok::Not),
            '∀' => Some(Tok::Forall),
            '∃' => Some(Tok::Exists),
            'ᵀ' => Some(Tok::Transpose),
            '⊤' => Some(Tok::Top),
            '⊥' => Some(Tok::Bottom),
            _ => None,
        };
        if let Some(t) = one {
            out.push((i, t));
            k += 1;
        } else if c.is_whitespace() {
            k += 1;
        } else if word_char(c) {
            let mut s = String::new();
            while k < chars.len() && word_char(chars[k].1) {
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

/// Parses a meaning term. Identifiers bound by `λ` or a quantifier become
/// variables; every other identifier names a constant.
///
/// ```
/// use peircelex::lambda::parse_term;
/// let t = parse_term(r"\f x. f (f x)").unwrap();
/// assert_eq!(t.to_string(), "λf x. f(f(x))");
/// ```
pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len(), bound: Vec::new() };
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return Err(Error::syntax(p.here(), "unexpected trailing input"));
    }
    Ok(t)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.1)
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

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(Error::syntax(self.here(), format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(Error::syntax(self.here(), format!("expected {what}"))),
        }
    }

    fn starts_binder(&self) -> bool {
        match self.peek() {
            Some(Tok::Lambda) => true,
            Some(Tok::Forall | Tok::Exists) => self.peek_at(1) != Some(&Tok::Open),
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Term> {
        if self.starts_binder() {
            self.binder()
        } else {
            self.implies()
        }
    }

    fn binder(&mut self) -> Result<Term> {
        let kind = self.peek().cloned();
        self.pos += 1;
        let mut vars = Vec::new();
        while let Some(Tok::Ident(v)) = self.peek() {
            vars.push(v.clone());
            self.pos += 1;
        }
        if vars.is_empty() {
            return Err(Error::syntax(self.here(), "expected a bound variable"));
        }
        self.expect(Tok::Dot, "'.' after bound variables")?;
        self.bound.extend(vars.iter().cloned());
        let body = self.term();
        self.bound.truncate(self.bound.len() - vars.len());
        let body = body?;
        Ok(vars.iter().rev().fold(body, |b, v| {
            let lam = Term::lam(v, b);
            match kind {
                Some(Tok::Forall) => Term::app(Term::constant(names::FORALL), lam),
                Some(Tok::Exists) => Term::app(Term::constant(names::EXISTS), lam),
                _ => lam,
            }
        }))
    }

    fn implies(&mut self) -> Result<Term> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.term()?;
            return Ok(Term::apps(Term::constant(names::IMPLIES), [lhs, rhs]));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        op: Tok,
        next: fn(&mut Self) -> Result<Term>,
        build: fn(Term, Term) -> Term,
    ) -> Result<Term> {
        let mut t = next(self)?;
        while self.eat(&op) {
            let rhs = if self.starts_binder() { self.binder()? } else { next(self)? };
            t = build(t, rhs);
        }
        Ok(t)
    }

    fn or(&mut self) -> Result<Term> {
        self.left_assoc(Tok::Or, Self::and, |a, b| Term::apps(Term::constant(names::OR), [a, b]))
    }

    fn and(&mut self) -> Result<Term> {
        self.left_assoc(Tok::And, Self::seq, |a, b| Term::apps(Term::constant(names::AND), [a, b]))
    }

    fn seq(&mut self) -> Result<Term> {
        self.left_assoc(Tok::Seq, Self::compose, Term::compose)
    }

    fn compose(&mut self) -> Result<Term> {
        self.left_assoc(Tok::Compose, Self::tensor, |a, b| Term::compose(b, a))
    }

    fn tensor(&mut self) -> Result<Term> {
        self.left_assoc(Tok::Tensor, Self::unary, |a, b| Term::apps(Term::constant(names::TENSOR), [a, b]))
    }

    fn unary(&mut self) -> Result<Term> {
        if self.eat(&Tok::Not) {
            let arg = self.unary()?;
            return Ok(Term::app(Term::constant(names::NOT), arg));
        }
        if self.starts_binder() {
            return self.binder();
        }
        self.application()
    }

    fn application(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        loop {
            match self.peek() {
                Some(Tok::Open) => {
                    self.pos += 1;
                    loop {
                        let arg = self.term()?;
                        t = Term::app(t, arg);
                        if self.eat(&Tok::Close) {
                            break;
                        }
                        self.expect(Tok::Comma, "',' or ')'")?;
                    }
                }
                Some(Tok::Transpose) => {
                    self.pos += 1;
                    t = Term::app(Term::constant(names::TRANSPOSE), t);
                }
                Some(Tok::Ident(_) | Tok::Top | Tok::Bottom) => {
                    let mut arg = self.primary()?;
                    while self.eat(&Tok::Transpose) {
                        arg = Term::app(Term::constant(names::TRANSPOSE), arg);
                    }
                    t = Term::app(t, arg);
                }
                _ => return Ok(t),
            }
        }
    }

    fn objects(&mut self) -> Result<Ty> {
        let mut objs = Vec::new();
        while let Some(Tok::Ident(s)) = self.peek().cloned() {
            self.pos += 1;
            if s != "1" {
                objs.push(s);
            }
        }
        Ok(Ty(objs))
    }

    fn number(&mut self) -> Result<usize> {
        let at = self.here();
        self.ident("a number")?.parse().map_err(|_| Error::syntax(at, "expected a number"))
    }

    fn object(&mut self) -> Result<ObjExpr> {
        let o = self.ident("an object")?;
        Ok(ObjExpr::concrete(&Ty(vec![o])))
    }

    fn special(&mut self, name: &str) -> Result<Term> {
        let mut inst = BTreeMap::new();
        let mut indices = Vec::new();
        self.expect(Tok::Open, "'('")?;
        match name {
            names::ID => {
                inst.insert("x".to_string(), ObjExpr::concrete(&self.objects()?));
            }
            names::SPIDER => {
                indices.push(self.number()?);
                self.expect(Tok::Comma, "','")?;
                indices.push(self.number()?);
                if self.eat(&Tok::Comma) {
                    inst.insert("a".to_string(), self.object()?);
                }
            }
            names::CUP | names::CAP => {
                inst.insert("a".to_string(), self.object()?);
            }
            _ => {
                inst.insert("a".to_string(), self.object()?);
                self.expect(Tok::Comma, "','")?;
                inst.insert("b".to_string(), self.object()?);
            }
        }
        self.expect(Tok::Close, "')'")?;
        Ok(Term::Const { name: name.to_string(), indices, inst })
    }

    fn primary(&mut self) -> Result<Term> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                if self.bound.contains(&s) {
                    return Ok(Term::Var(s));
                }
                let special = [names::ID, names::SPIDER, names::CUP, names::CAP, names::SWAP];
                if special.contains(&s.as_str()) && self.peek() == Some(&Tok::Open) {
                    return self.special(&s);
                }
                Ok(Term::constant(&s))
            }
            Some(Tok::Forall) => {
                self.pos += 1;
                Ok(Term::constant(names::FORALL))
            }
            Some(Tok::Exists) => {
                self.pos += 1;
                Ok(Term::constant(names::EXISTS))
            }
            Some(Tok::Top) => {
                self.pos += 1;
                Ok(Term::constant(names::TOP))
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(Term::constant(names::BOTTOM))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::Close, "')'")?;
                Ok(t)
            }
            _ => Err(Error::syntax(at, "expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn composition_orders_agree() {
        assert_eq!(t("b ∘ a"), t("a ; b"));
        assert_eq!(t("b << a"), t("a >> b"));
        assert_eq!(t("b ∘ a"), Term::compose(Term::constant("a"), Term::constant("b")));
    }

    #[test]
    fn call_and_juxtaposition() {
        assert_eq!(t("f(a, b)"), t("f a b"));
        assert_eq!(t("λf x. f (f x)"), t(r"\f x. f(f(x))"));
        assert_eq!(t("P(kills)ᵀ"), t("(P kills)^T"));
        assert_eq!(t("(λx. x) car"), Term::app(t("λx. x"), Term::constant("car")));
    }

    #[test]
    fn bound_names_are_variables() {
        assert_eq!(t("λf. f ∘ man").free_vars().len(), 0);
        assert_eq!(t("f ∘ man").free_vars().len(), 0);
        let q = t("∀x. man x → sleeps x");
        assert_eq!(q, Term::app(Term::constant("forall"), t("λx. man x → sleeps x")));
    }

    #[test]
    fn special_forms() {
        let Term::Const { indices, inst, .. } = t("spider(2, 1)") else { panic!() };
        assert_eq!(indices, vec![2, 1]);
        assert!(inst.is_empty());
        let Term::Const { inst, .. } = t("id(N S)") else { panic!() };
        assert_eq!(inst["x"], ObjExpr::concrete(&Ty::of(&["N", "S"])));
        let Term::Const { inst, .. } = t("id(1)") else { panic!() };
        assert_eq!(inst["x"], ObjExpr::default());
    }

    #[test]
    fn negation_and_quantifiers_nest() {
        assert_eq!(t("¬∃x. p x"), Term::app(Term::constant("not"), t("∃x. p x")));
        assert_eq!(t("g x ∧ ∃y. p y").spine().1.len(), 2);
    }

    #[test]
    fn errors_have_positions() {
        assert_eq!(parse_term("λ. x"), Err(Error::Syntax { pos: 2, msg: "expected a bound variable".into() }));
        assert!(matches!(parse_term("f(a"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_term("a ∘"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_term("spider(x, 1)"), Err(Error::Syntax { pos: 7, .. })));
        assert!(matches!(parse_term("a $ b"), Err(Error::Syntax { pos: 2, .. })));
    }
}
