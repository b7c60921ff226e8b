//! Grammatical types, object lists, monoidal signatures with holes, and the
//! semantic types of the lambda calculus over diagrams (or formulae).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Object lists and shapes
// ---------------------------------------------------------------------------

/// A list of generating objects. The empty list is the monoidal unit `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ty(pub Vec<String>);

impl Ty {
    pub fn unit() -> Self {
        Ty(Vec::new())
    }

    pub fn of(objs: &[&str]) -> Self {
        Ty(objs.iter().map(|s| s.to_string()).collect())
    }

    /// Parses `1`, `N`, `N S N`.
    pub fn parse(text: &str) -> Result<Self> {
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            [] | ["1"] => Ok(Ty::unit()),
            ws => {
                if let Some(bad) = ws.iter().find(|w| !is_ident(w)) {
                    return Err(Error::syntax(0, format!("bad object name {bad:?} in type {text:?}")));
                }
                Ok(Ty(ws.iter().map(|w| w.to_string()).collect()))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Ty) -> Ty {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Ty(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Ty {
        Ty(self.0[start..end].to_vec())
    }

    pub fn reversed(&self) -> Ty {
        Ty(self.0.iter().rev().cloned().collect())
    }

    pub fn repeat(obj: &str, n: usize) -> Ty {
        Ty(vec![obj.to_string(); n])
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.0.join(" "))
        }
    }
}

/// A pair of object lists: the input and output of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(Ty, Ty)", into = "(Ty, Ty)")]
pub struct Shape {
    pub dom: Ty,
    pub cod: Ty,
}

impl Shape {
    pub fn new(dom: Ty, cod: Ty) -> Self {
        Shape { dom, cod }
    }
}

impl From<(Ty, Ty)> for Shape {
    fn from((dom, cod): (Ty, Ty)) -> Self {
        Shape { dom, cod }
    }
}

impl From<Shape> for (Ty, Ty) {
    fn from(s: Shape) -> Self {
        (s.dom, s.cod)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dom, self.cod)
    }
}

// ---------------------------------------------------------------------------
// Monoidal signature with holes
// ---------------------------------------------------------------------------

/// A generating box. `holes` lists the shapes of the diagrams it can hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDecl {
    pub name: String,
    #[serde(default)]
    pub dom: Ty,
    #[serde(default)]
    pub cod: Ty,
    #[serde(default)]
    pub holes: Vec<Shape>,
    /// Denotes exactly one individual; used to read state-style proper nouns
    /// as first-order constants.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub singleton: bool,
    /// Predicate argument position of each port (dom ports then cod ports).
    /// Defaults to the identity permutation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<usize>>,
}

impl BoxDecl {
    pub fn new(name: &str, dom: Ty, cod: Ty) -> Self {
        BoxDecl { name: name.to_string(), dom, cod, holes: Vec::new(), singleton: false, args: None }
    }

    pub fn with_holes(mut self, holes: Vec<Shape>) -> Self {
        self.holes = holes;
        self
    }

    pub fn singleton(mut self) -> Self {
        self.singleton = true;
        self
    }

    pub fn arity(&self) -> usize {
        self.dom.len() + self.cod.len()
    }

    /// Maps port index (dom ports, then cod ports) to predicate argument index.
    pub fn arg_position(&self, port: usize) -> usize {
        match &self.args {
            Some(perm) => perm[port],
            None => port,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Signature {
    #[serde(default)]
    pub objects: BTreeSet<String>,
    #[serde(default)]
    pub boxes: Vec<BoxDecl>,
}

/// A broken signature invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownObject { item: String, object: String },
    DuplicateBox(String),
    BadArgOrder(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownObject { item, object } => {
                write!(f, "unknown-object {object} (in {item})")
            }
            Violation::DuplicateBox(b) => write!(f, "duplicate-box {b}"),
            Violation::BadArgOrder(b) => write!(f, "bad-arg-order {b}"),
        }
    }
}

impl Signature {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(objects: I) -> Self {
        Signature { objects: objects.into_iter().map(Into::into).collect(), boxes: Vec::new() }
    }

    pub fn with_box(mut self, b: BoxDecl) -> Self {
        self.boxes.push(b);
        self
    }

    pub fn get(&self, name: &str) -> Option<&BoxDecl> {
        self.boxes.iter().find(|b| b.name == name)
    }

    pub fn check_ty(&self, ty: &Ty) -> Result<()> {
        match ty.0.iter().find(|o| !self.objects.contains(*o)) {
            Some(o) => Err(Error::MissingSymbol(format!("unknown object {o}"))),
            None => Ok(()),
        }
    }

    pub fn singletons(&self) -> BTreeSet<String> {
        self.boxes.iter().filter(|b| b.singleton).map(|b| b.name.clone()).collect()
    }

    /// Lists every broken invariant; empty iff the signature is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for b in &self.boxes {
            if !seen.insert(b.name.as_str()) {
                out.push(Violation::DuplicateBox(b.name.clone()));
            }
            let holes = b.holes.iter().flat_map(|h| h.dom.0.iter().chain(h.cod.0.iter()));
            for o in b.dom.0.iter().chain(b.cod.0.iter()).chain(holes) {
                if !self.objects.contains(o) {
                    let v = Violation::UnknownObject { item: b.name.clone(), object: o.clone() };
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            if let Some(perm) = &b.args {
                let mut sorted = perm.clone();
                sorted.sort_unstable();
                if sorted != (0..b.arity()).collect::<Vec<_>>() {
                    out.push(Violation::BadArgOrder(b.name.clone()));
                }
            }
        }
        out
    }
}

/// Free-function form of [`Signature::validate`].
pub fn validate_signature(sig: &Signature) -> Vec<Violation> {
    sig.validate()
}

// ---------------------------------------------------------------------------
// Grammatical types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrammarType {
    Atom(String),
    /// `result ← argument`: expects its argument on the right.
    Over(Box<GrammarType>, Box<GrammarType>),
    /// `argument → result`: expects its argument on the left.
    Under(Box<GrammarType>, Box<GrammarType>),
}

impl GrammarType {
    pub fn atom(name: &str) -> Self {
        GrammarType::Atom(name.to_string())
    }

    pub fn over(result: GrammarType, argument: GrammarType) -> Self {
        GrammarType::Over(Box::new(result), Box::new(argument))
    }

    pub fn under(argument: GrammarType, result: GrammarType) -> Self {
        GrammarType::Under(Box::new(argument), Box::new(result))
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_grammar_type(text)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            GrammarType::Atom(a) => {
                out.insert(a.clone());
            }
            GrammarType::Over(x, y) | GrammarType::Under(x, y) => {
                x.collect_atoms(out);
                y.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for GrammarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(t: &GrammarType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                GrammarType::Atom(a) => write!(f, "{a}"),
                _ => write!(f, "({t})"),
            }
        }
        match self {
            GrammarType::Atom(a) => write!(f, "{a}"),
            GrammarType::Over(x, y) => {
                child(x, f)?;
                write!(f, " ← ")?;
                child(y, f)
            }
            GrammarType::Under(y, x) => {
                child(y, f)?;
                write!(f, " → ")?;
                child(x, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum GTok {
    Ident(String),
    Left,
    Right,
    Open,
    Close,
}

fn lex_grammar(text: &str) -> Result<Vec<(usize, GTok)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '(' => {
                it.next();
                out.push((i, GTok::Open));
            }
            ')' => {
                it.next();
                out.push((i, GTok::Close));
            }
            '←' => {
                it.next();
                out.push((i, GTok::Left));
            }
            '→' => {
                it.next();
                out.push((i, GTok::Right));
            }
            '<' | '-' => {
                it.next();
                match (c, it.next()) {
                    ('<', Some((_, '-'))) => out.push((i, GTok::Left)),
                    ('-', Some((_, '>'))) => out.push((i, GTok::Right)),
                    _ => return Err(Error::syntax(i, "expected `<-` or `->`")),
                }
            }
            c if is_ident_char(c) => {
                let mut s = String::new();
                while let Some(&(_, c)) = it.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    s.push(c);
                    it.next();
                }
                out.push((i, GTok::Ident(s)));
            }
            other => return Err(Error::syntax(i, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// Parses `n`, `(p → s) ← p`, `(n <- n) <- (n <- n)`. The arrows are
/// non-associative: `a ← b ← c` is rejected.
pub fn parse_grammar_type(text: &str) -> Result<GrammarType> {
    let toks = lex_grammar(text)?;
    let mut pos = 0;
    let t = parse_gt_expr(&toks, &mut pos, text.len())?;
    if pos < toks.len() {
        return Err(Error::syntax(toks[pos].0, "trailing input"));
    }
    Ok(t)
}

fn parse_gt_expr(toks: &[(usize, GTok)], pos: &mut usize, end: usize) -> Result<GrammarType> {
    let lhs = parse_gt_primary(toks, pos, end)?;
    let op = match toks.get(*pos) {
        Some((_, GTok::Left)) => GTok::Left,
        Some((_, GTok::Right)) => GTok::Right,
        _ => return Ok(lhs),
    };
    *pos += 1;
    let rhs = parse_gt_primary(toks, pos, end)?;
    if let Some((i, GTok::Left | GTok::Right)) = toks.get(*pos) {
        return Err(Error::syntax(*i, "`←` and `→` do not associate; add parentheses"));
    }
    Ok(match op {
        GTok::Left => GrammarType::over(lhs, rhs),
        _ => GrammarType::under(lhs, rhs),
    })
}

fn parse_gt_primary(toks: &[(usize, GTok)], pos: &mut usize, end: usize) -> Result<GrammarType> {
    match toks.get(*pos) {
        Some((_, GTok::Ident(a))) => {
            *pos += 1;
            Ok(GrammarType::Atom(a.clone()))
        }
        Some((_, GTok::Open)) => {
            *pos += 1;
            let t = parse_gt_expr(toks, pos, end)?;
            match toks.get(*pos) {
                Some((_, GTok::Close)) => {
                    *pos += 1;
                    Ok(t)
                }
                Some((i, _)) => Err(Error::syntax(*i, "expected `)`")),
                None => Err(Error::syntax(end, "expected `)`")),
            }
        }
        Some((i, _)) => Err(Error::syntax(*i, "expected an atom or `(`")),
        None => Err(Error::syntax(end, "unexpected end of input")),
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '#'
}

pub(crate) fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char)
}

// ---------------------------------------------------------------------------
// Semantic types
// ---------------------------------------------------------------------------

/// One component of a shape inside a semantic type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjItem {
    Obj(String),
    /// A list variable bound by an enclosing `∏` (or a rigid skolem).
    Param(String),
    /// A unification variable standing for an unknown object list.
    Meta(u32),
}

/// An object list that may contain list variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ObjExpr(pub Vec<ObjItem>);

impl ObjExpr {
    pub fn concrete(ty: &Ty) -> Self {
        ObjExpr(ty.0.iter().map(|o| ObjItem::Obj(o.clone())).collect())
    }

    pub fn param(name: &str) -> Self {
        ObjExpr(vec![ObjItem::Param(name.to_string())])
    }

    pub fn meta(m: u32) -> Self {
        ObjExpr(vec![ObjItem::Meta(m)])
    }

    pub fn concat(&self, other: &ObjExpr) -> ObjExpr {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        ObjExpr(v)
    }

    /// `Some` when the list mentions no variables.
    pub fn as_ty(&self) -> Option<Ty> {
        self.0
            .iter()
            .map(|i| match i {
                ObjItem::Obj(o) => Some(o.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Ty)
    }
}

impl fmt::Display for ObjExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|i| match i {
                ObjItem::Obj(o) | ObjItem::Param(o) => o.clone(),
                ObjItem::Meta(m) => format!("?{m}"),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShapeExpr {
    pub dom: ObjExpr,
    pub cod: ObjExpr,
}

impl ShapeExpr {
    pub fn new(dom: ObjExpr, cod: ObjExpr) -> Self {
        ShapeExpr { dom, cod }
    }

    pub fn concrete(shape: &Shape) -> Self {
        ShapeExpr { dom: ObjExpr::concrete(&shape.dom), cod: ObjExpr::concrete(&shape.cod) }
    }
}

/// Types of the lambda calculus: diagram homsets `(x, y)`, functions,
/// shape-polymorphic products `∏x. A`, and the logical sorts `φ`, `τ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemType {
    Diag(ShapeExpr),
    Arrow(Box<SemType>, Box<SemType>),
    Forall(String, Box<SemType>),
    Form,
    Term,
    /// Unification variable (only appears during and after inference).
    Meta(u32),
}

impl SemType {
    pub fn diag(dom: &Ty, cod: &Ty) -> Self {
        SemType::Diag(ShapeExpr::new(ObjExpr::concrete(dom), ObjExpr::concrete(cod)))
    }

    pub fn arrow(a: SemType, b: SemType) -> Self {
        SemType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, body: SemType) -> Self {
        SemType::Forall(v.to_string(), Box::new(body))
    }

    pub fn parse(text: &str) -> Result<Self> {
        SemTypeParser::new(text)?.parse_all()
    }

    /// `true` for the ΛL sorts and any type built from them.
    pub fn mentions_logic(&self) -> bool {
        match self {
            SemType::Form | SemType::Term => true,
            SemType::Arrow(a, b) => a.mentions_logic() || b.mentions_logic(),
            SemType::Forall(_, b) => b.mentions_logic(),
            _ => false,
        }
    }

    pub fn mentions_diagrams(&self) -> bool {
        match self {
            SemType::Diag(_) => true,
            SemType::Arrow(a, b) => a.mentions_diagrams() || b.mentions_diagrams(),
            SemType::Forall(_, b) => b.mentions_diagrams(),
            _ => false,
        }
    }

    /// Renames bound parameters to `x0, x1, ...` in binder order so that
    /// alpha-equivalent types compare equal.
    pub fn canonical(&self) -> SemType {
        fn go(t: &SemType, env: &mut Vec<(String, String)>, next: &mut usize) -> SemType {
            match t {
                SemType::Diag(s) => {
                    let ren = |e: &ObjExpr| {
                        ObjExpr(
                            e.0.iter()
                                .map(|i| match i {
                                    ObjItem::Param(p) => match env.iter().rev().find(|(a, _)| a == p) {
                                        Some((_, b)) => ObjItem::Param(b.clone()),
                                        None => i.clone(),
                                    },
                                    _ => i.clone(),
                                })
                                .collect(),
                        )
                    };
                    SemType::Diag(ShapeExpr::new(ren(&s.dom), ren(&s.cod)))
                }
                SemType::Arrow(a, b) => SemType::arrow(go(a, env, next), go(b, env, next)),
                SemType::Forall(v, b) => {
                    let fresh = format!("x{next}");
                    *next += 1;
                    env.push((v.clone(), fresh.clone()));
                    let body = go(b, env, next);
                    env.pop();
                    SemType::Forall(fresh, Box::new(body))
                }
                other => other.clone(),
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Diag(s) => write!(f, "({}, {})", s.dom, s.cod),
            SemType::Arrow(a, b) => match **a {
                SemType::Arrow(..) | SemType::Forall(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
            SemType::Forall(v, b) => write!(f, "∏{v}. {b}"),
            SemType::Form => write!(f, "φ"),
            SemType::Term => write!(f, "τ"),
            SemType::Meta(m) => write!(f, "'t{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum STok {
    Ident(String),
    Open,
    Close,
    Comma,
    Dot,
    Arrow,
    Forall,
}

struct SemTypeParser {
    toks: Vec<(usize, STok)>,
    pos: usize,
    end: usize,
    bound: Vec<String>,
}

impl SemTypeParser {
    fn new(text: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (i, c) = chars[k];
            match c {
                c if c.is_whitespace() => k += 1,
                '(' => {
                    toks.push((i, STok::Open));
                    k += 1
                }
                ')' => {
                    toks.push((i, STok::Close));
                    k += 1
                }
                ',' => {
                    toks.push((i, STok::Comma));
                    k += 1
                }
                '.' => {
                    toks.push((i, STok::Dot));
                    k += 1
                }
                '→' => {
                    toks.push((i, STok::Arrow));
                    k += 1
                }
                '∏' | 'Π' | '∀' => {
                    toks.push((i, STok::Forall));
                    k += 1
                }
                '-' if chars.get(k + 1).map(|c| c.1) == Some('>') => {
                    toks.push((i, STok::Arrow));
                    k += 2
                }
                c if is_ident_char(c) => {
                    let mut s = String::new();
                    while k < chars.len() && is_ident_char(chars[k].1) {
                        s.push(chars[k].1);
                        k += 1;
                    }
                    if s == "forall" {
                        toks.push((i, STok::Forall));
                    } else {
                        toks.push((i, STok::Ident(s)));
                    }
                }
                other => return Err(Error::syntax(i, format!("unexpected character {other:?}"))),
            }
        }
        Ok(SemTypeParser { toks, pos: 0, end: text.len(), bound: Vec::new() })
    }

    fn peek(&self) -> Option<&STok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn expect(&mut self, t: STok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::syntax(self.here(), format!("expected {t:?}")))
        }
    }

    fn parse_all(mut self) -> Result<SemType> {
        let t = self.parse_ty()?;
        if self.pos < self.toks.len() {
            return Err(Error::syntax(self.here(), "trailing input"));
        }
        Ok(t)
    }

    fn parse_ty(&mut self) -> Result<SemType> {
        if self.peek() == Some(&STok::Forall) {
            self.pos += 1;
            let mut vars = Vec::new();
            while let Some(STok::Ident(v)) = self.peek() {
                vars.push(v.clone());
                self.pos += 1;
            }
            if vars.is_empty() {
                return Err(Error::syntax(self.here(), "expected a bound variable"));
            }
            self.expect(STok::Dot)?;
            let n = vars.len();
            self.bound.extend(vars.iter().cloned());
            let body = self.parse_ty()?;
            self.bound.truncate(self.bound.len() - n);
            return Ok(vars.into_iter().rev().fold(body, |b, v| SemType::Forall(v, Box::new(b))));
        }
        let lhs = self.parse_atom()?;
        if self.peek() == Some(&STok::Arrow) {
            self.pos += 1;
            let rhs = self.parse_ty()?;
            return Ok(SemType::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn has_top_level_comma(&self) -> bool {
        let mut depth = 0usize;
        for (_, t) in &self.toks[self.pos..] {
            match t {
                STok::Open => depth += 1,
                STok::Close if depth == 0 => return false,
                STok::Close => depth -= 1,
                STok::Comma if depth == 0 => return true,
                _ => {}
            }
        }
        false
    }

    fn parse_atom(&mut self) -> Result<SemType> {
        match self.peek().cloned() {
            Some(STok::Ident(s)) => {
                self.pos += 1;
                match s.as_str() {
                    "φ" | "phi" | "t" => Ok(SemType::Form),
                    "τ" | "tau" | "e" => Ok(SemType::Term),
                    _ => Err(Error::syntax(self.here(), format!("unknown type {s:?}"))),
                }
            }
            Some(STok::Open) => {
                self.pos += 1;
                if self.has_top_level_comma() {
                    let dom = self.parse_objs()?;
                    self.expect(STok::Comma)?;
                    let cod = self.parse_objs()?;
                    self.expect(STok::Close)?;
                    Ok(SemType::Diag(ShapeExpr::new(dom, cod)))
                } else {
                    let t = self.parse_ty()?;
                    self.expect(STok::Close)?;
                    Ok(t)
                }
            }
            _ => Err(Error::syntax(self.here(), "expected a type")),
        }
    }

    fn parse_objs(&mut self) -> Result<ObjExpr> {
        let mut items = Vec::new();
        while let Some(STok::Ident(s)) = self.peek().cloned() {
            self.pos += 1;
            if s == "1" {
                continue;
            }
            if self.bound.contains(&s) {
                items.push(ObjItem::Param(s));
            } else {
                items.push(ObjItem::Obj(s));
            }
        }
        Ok(ObjExpr(items))
    }
}

/// Image of a grammatical type under an atom assignment. Both `x ← y` and
/// `y → x` go to `F(y) -> F(x)`.
pub fn semantic_type_of(t: &GrammarType, assignment: &BTreeMap<String, SemType>) -> Result<SemType> {
    match t {
        GrammarType::Atom(a) => assignment
            .get(a)
            .cloned()
            .ok_or_else(|| Error::MissingSymbol(format!("no semantic type assigned to atom {a}"))),
        GrammarType::Over(x, y) | GrammarType::Under(y, x) => Ok(SemType::arrow(
            semantic_type_of(y, assignment)?,
            semantic_type_of(x, assignment)?,
        )),
    }
}
