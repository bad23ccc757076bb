//! Block-format input documents.
//!
//! ```text
//! cdga S2 { gen e2 : deg 2, wt 2; gen e3 : deg 3, wt 4; d e3 = e2^2; window 0..12; }
//! dgla L { gen v1 : deg -1, wt -2; d v1 = 0; }
//! fdalgebra H { basis 1 : deg 0, wt 0; basis u : deg 2, wt 2; unit 1; mul u*u = 0; }
//! map phi : A -> B { send x = y + 1/2 z^2; }
//! mc tau : H, L { coeff u, v1 = -1; }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::exactlin::{axpy, Scalar, SparseVec};
use crate::freecga::{CdgaMorphism, CdgaPresentation, CgaElement, FreeCga, Generator};
use crate::freelie::{DglaPresentation, FreeLie, LieElement};
use crate::graded::{BasisElement, DegreeWindow, GradedSlice};
use crate::ooinfty::{basis_vec, FdAlgebra, FreeToFdMap};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    const SYMS: [&str; 15] = ["..", "->", "{", "}", "[", "]", "(", ")", ",", ";", ":", "=", "+", "-", "*"];
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let at = |tok| Token { tok, line: ln + 1, col };
            if c.is_ascii_digit() {
                let s = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let v: String = chars[s..i].iter().collect();
                out.push(at(Tok::Int(v.parse().map_err(|_| Error::Parse { line: ln + 1, col, msg: format!("integer `{v}` too large") })?)));
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let s = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push(at(Tok::Ident(chars[s..i].iter().collect())));
                continue;
            }
            if c == '/' || c == '^' {
                out.push(at(Tok::Sym(if c == '/' { "/" } else { "^" })));
                i += 1;
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push(at(Tok::Sym(s)));
                    i += s.chars().count();
                }
                None => return Err(Error::Parse { line: ln + 1, col, msg: format!("unexpected character `{c}`") }),
            }
        }
    }
    Ok(out)
}

/// Parsed expression: a sum of `coefficient * factor * factor ...`.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Atom(String, u32),
    Bracket(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, Default)]
pub struct Expr {
    pub terms: Vec<(Scalar, Vec<Factor>)>,
    pub line: usize,
    pub col: usize,
}

// Positions are for diagnostics only.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Parse { line, col, msg: msg.into() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{k}`")),
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.is_sym("-");
        if neg {
            self.pos += 1;
        }
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected an integer"),
        }
    }

    fn scalar(&mut self) -> Result<Scalar> {
        let n = self.int()?;
        if self.is_sym("/") {
            self.pos += 1;
            let d = self.int()?;
            if d == 0 {
                return self.err("zero denominator");
            }
            return Ok(Scalar::new(n.into(), d.into()));
        }
        Ok(Scalar::from_integer(n.into()))
    }

    /// A basis label: a name with an optional `^k`, or the integer `1`.
    fn label(&mut self) -> Result<String> {
        if let Some(Tok::Int(1)) = self.peek() {
            self.pos += 1;
            return Ok("1".into());
        }
        let mut s = self.ident()?;
        if self.is_sym("^") {
            self.pos += 1;
            let k = self.int()?;
            write!(s, "^{k}").unwrap();
        }
        Ok(s)
    }

    fn factor(&mut self) -> Result<Factor> {
        if self.is_sym("[") {
            self.pos += 1;
            let a = self.expr()?;
            self.sym(",")?;
            let b = self.expr()?;
            self.sym("]")?;
            return Ok(Factor::Bracket(Box::new(a), Box::new(b)));
        }
        if self.is_sym("(") {
            return self.err("parentheses are not supported; expand the expression");
        }
        let name = self.ident()?;
        let mut k = 1;
        if self.is_sym("^") {
            self.pos += 1;
            let (line, col) = self.here();
            let v = self.int()?;
            if v < 1 {
                return Err(Error::Parse { line, col, msg: "exponent must be positive".into() });
            }
            k = v as u32;
        }
        Ok(Factor::Atom(name, k))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_))) || self.is_sym("[")
    }

    fn term(&mut self, sign: Scalar) -> Result<(Scalar, Vec<Factor>)> {
        let mut c = sign;
        let mut factors = Vec::new();
        if let Some(Tok::Int(_)) = self.peek() {
            c *= self.scalar()?;
            if self.is_sym("*") {
                self.pos += 1;
            } else if !self.starts_factor() {
                return Ok((c, factors));
            }
        }
        factors.push(self.factor()?);
        while self.is_sym("*") {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok((c, factors))
    }

    fn expr(&mut self) -> Result<Expr> {
        let (line, col) = self.here();
        let mut e = Expr { terms: Vec::new(), line, col };
        let mut sign = Scalar::one();
        if self.is_sym("-") {
            self.pos += 1;
            sign = -sign;
        }
        loop {
            e.terms.push(self.term(sign)?);
            if self.is_sym("+") {
                sign = Scalar::one();
            } else if self.is_sym("-") {
                sign = -Scalar::one();
            } else {
                break;
            }
            self.pos += 1;
        }
        Ok(e)
    }

    fn bidegree(&mut self) -> Result<(i32, i32)> {
        self.sym(":")?;
        self.keyword("deg")?;
        let d = self.int()?;
        self.sym(",")?;
        self.keyword("wt")?;
        let w = self.int()?;
        self.sym(";")?;
        Ok((d as i32, w as i32))
    }

    fn window(&mut self) -> Result<DegreeWindow> {
        let (line, col) = self.here();
        let a = self.int()?;
        self.sym("..")?;
        let b = self.int()?;
        self.sym(";")?;
        DegreeWindow::new(a as i32, b as i32).map_err(|e| Error::Parse { line, col, msg: e.to_string() })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapBlock {
    pub name: String,
    pub source: String,
    pub target: String,
    pub sends: Vec<(String, Expr)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McBlock {
    pub name: String,
    pub algebra: String,
    pub lie: String,
    /// `(basis label of A, element of L, coefficient)`.
    pub coeffs: Vec<(String, Expr, Scalar)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Cdga(CdgaPresentation),
    Dgla(DglaPresentation),
    Fd(FdAlgebra),
    Map(MapBlock),
    Mc(McBlock),
}

impl Block {
    pub fn name(&self) -> &str {
        match self {
            Block::Cdga(p) => &p.name,
            Block::Dgla(p) => &p.name,
            Block::Fd(a) => &a.name,
            Block::Map(m) => &m.name,
            Block::Mc(m) => &m.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Block::Cdga(_) => "cdga",
            Block::Dgla(_) => "dgla",
            Block::Fd(_) => "fdalgebra",
            Block::Map(_) => "map",
            Block::Mc(_) => "mc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Document {
    pub blocks: Vec<Block>,
}

fn perr<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

fn cga_expr(a: &FreeCga, e: &Expr) -> Result<CgaElement> {
    let mut out = CgaElement::zero();
    for (c, fs) in &e.terms {
        let mut t = a.constant(c.clone());
        for f in fs {
            match f {
                Factor::Atom(n, k) => {
                    let i = a.index_of(n).ok_or_else(|| Error::Parse { line: e.line, col: e.col, msg: format!("unknown generator `{n}`") })?;
                    t = a.mul(&t, &a.pow(&a.gen(i), *k));
                }
                Factor::Bracket(..) => return perr(e.line, e.col, "brackets are not allowed in a cdga expression"),
            }
        }
        out.add_scaled(&Scalar::one(), &t);
    }
    Ok(out)
}

pub fn lie_expr(l: &FreeLie, e: &Expr) -> Result<LieElement> {
    let mut out = LieElement::zero();
    for (c, fs) in &e.terms {
        if fs.len() != 1 {
            return perr(e.line, e.col, if fs.is_empty() { "constants are not Lie elements" } else { "products are not allowed in a dgla expression; use [x,y]" });
        }
        let t = match &fs[0] {
            Factor::Atom(n, 1) => {
                let i = l.index_of(n).ok_or_else(|| Error::Parse { line: e.line, col: e.col, msg: format!("unknown generator `{n}`") })?;
                l.gen(i)
            }
            Factor::Atom(..) => return perr(e.line, e.col, "powers are not allowed in a dgla expression"),
            Factor::Bracket(x, y) => l.bracket(&lie_expr(l, x)?, &lie_expr(l, y)?),
        };
        out.add_scaled(c, &t);
    }
    Ok(out)
}

fn fd_label(fs: &[Factor]) -> Option<String> {
    match fs {
        [] => Some("1".into()),
        [Factor::Atom(n, 1)] => Some(n.clone()),
        [Factor::Atom(n, k)] => Some(format!("{n}^{k}")),
        _ => None,
    }
}

pub fn fd_expr(space: &GradedSlice, e: &Expr) -> Result<SparseVec> {
    let mut out = SparseVec::new();
    for (c, fs) in &e.terms {
        let Some(l) = fd_label(fs) else { return perr(e.line, e.col, "expected a linear combination of basis elements") };
        let i = space.index_of(&l).ok_or_else(|| Error::Parse { line: e.line, col: e.col, msg: format!("unknown basis element `{l}`") })?;
        axpy(&mut out, c, &basis_vec(i));
    }
    Ok(out)
}

fn is_zero_expr(e: &Expr) -> bool {
    e.terms.iter().all(|(c, fs)| c.is_zero() && fs.is_empty())
}

pub fn parse(text: &str) -> Result<Document> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut doc = Document::default();
    let mut names = HashSet::new();
    while p.peek().is_some() {
        let (line, col) = p.here();
        let kind = p.ident()?;
        let name = p.ident()?;
        if !names.insert(name.clone()) {
            return Err(Error::DuplicateName(name));
        }
        let block = match kind.as_str() {
            "cdga" | "dgla" => {
                p.sym("{")?;
                let mut gens: Vec<Generator> = Vec::new();
                let mut ds: Vec<(String, Expr)> = Vec::new();
                let mut window = None;
                while !p.is_sym("}") {
                    let (l, c) = p.here();
                    match p.ident()?.as_str() {
                        "gen" => {
                            let n = p.ident()?;
                            if gens.iter().any(|g| g.name == n) {
                                return Err(Error::DuplicateName(n));
                            }
                            let (d, w) = p.bidegree()?;
                            gens.push(Generator::new(n, d, w));
                        }
                        "d" => {
                            let n = p.ident()?;
                            p.sym("=")?;
                            let e = p.expr()?;
                            p.sym(";")?;
                            ds.push((n, e));
                        }
                        "window" => window = Some(p.window()?),
                        other => return perr(l, c, format!("unexpected `{other}` in a {kind} block")),
                    }
                }
                p.sym("}")?;
                if kind == "cdga" {
                    let window = window.unwrap_or(DegreeWindow { min: 0, max: 2 * gens.iter().map(|g| g.degree).max().unwrap_or(0) + 8 });
                    let alg = FreeCga::new(gens.clone())?;
                    let mut d = BTreeMap::new();
                    for (n, e) in &ds {
                        if alg.index_of(n).is_none() {
                            return perr(e.line, e.col, format!("d of unknown generator `{n}`"));
                        }
                        if d.insert(n.clone(), cga_expr(&alg, e)?).is_some() {
                            return Err(Error::DuplicateName(format!("d {n}")));
                        }
                    }
                    Block::Cdga(CdgaPresentation::new(name, gens, &d, window)?)
                } else {
                    let window = window.unwrap_or(DegreeWindow { min: 2 * gens.iter().map(|g| g.degree).min().unwrap_or(-1) - 8, max: -1 });
                    let lie = FreeLie::new(gens.clone())?;
                    let mut d = BTreeMap::new();
                    for (n, e) in &ds {
                        if lie.index_of(n).is_none() {
                            return perr(e.line, e.col, format!("d of unknown generator `{n}`"));
                        }
                        let v = if is_zero_expr(e) { LieElement::zero() } else { lie_expr(&lie, e)? };
                        if d.insert(n.clone(), v).is_some() {
                            return Err(Error::DuplicateName(format!("d {n}")));
                        }
                    }
                    Block::Dgla(DglaPresentation::new(name, gens, &d, window)?)
                }
            }
            "fdalgebra" => {
                let commutative = !matches!(p.peek(), Some(Tok::Ident(s)) if s == "assoc");
                if !commutative {
                    p.pos += 1;
                }
                p.sym("{")?;
                let mut basis: Vec<BasisElement> = Vec::new();
                let mut unit = None;
                let mut muls = Vec::new();
                let mut ds = Vec::new();
                while !p.is_sym("}") {
                    let (l, c) = p.here();
                    match p.ident()?.as_str() {
                        "basis" => {
                            let n = p.label()?;
                            if basis.iter().any(|b| b.label == n) {
                                return Err(Error::DuplicateName(n));
                            }
                            let (d, w) = p.bidegree()?;
                            basis.push(BasisElement::new(n, d, w));
                        }
                        "unit" => {
                            unit = Some(p.label()?);
                            p.sym(";")?;
                        }
                        "mul" => {
                            let a = p.label()?;
                            p.sym("*")?;
                            let b = p.label()?;
                            p.sym("=")?;
                            let e = p.expr()?;
                            p.sym(";")?;
                            muls.push((a, b, e));
                        }
                        "d" => {
                            let a = p.label()?;
                            p.sym("=")?;
                            let e = p.expr()?;
                            p.sym(";")?;
                            ds.push((a, e));
                        }
                        other => return perr(l, c, format!("unexpected `{other}` in a fdalgebra block")),
                    }
                }
                p.sym("}")?;
                let Some(unit) = unit else { return perr(line, col, format!("fdalgebra {name} has no unit")) };
                let space = GradedSlice::from_basis(basis.clone())?;
                let mut prods = Vec::new();
                for (a, b, e) in &muls {
                    prods.push((a.clone(), b.clone(), fd_expr(&space, e)?));
                }
                let mut dv = Vec::new();
                for (a, e) in &ds {
                    dv.push((a.clone(), fd_expr(&space, e)?));
                }
                Block::Fd(FdAlgebra::from_table(&name, basis, &unit, &prods, &dv, commutative)?)
            }
            "map" => {
                p.sym(":")?;
                let source = p.ident()?;
                p.sym("->")?;
                let target = p.ident()?;
                p.sym("{")?;
                let mut sends = Vec::new();
                while !p.is_sym("}") {
                    p.keyword("send")?;
                    let n = p.ident()?;
                    p.sym("=")?;
                    let e = p.expr()?;
                    p.sym(";")?;
                    sends.push((n, e));
                }
                p.sym("}")?;
                Block::Map(MapBlock { name, source, target, sends })
            }
            "mc" => {
                p.sym(":")?;
                let algebra = p.ident()?;
                p.sym(",")?;
                let lie = p.ident()?;
                p.sym("{")?;
                let mut coeffs = Vec::new();
                while !p.is_sym("}") {
                    p.keyword("coeff")?;
                    let a = p.label()?;
                    p.sym(",")?;
                    let x = p.expr()?;
                    p.sym("=")?;
                    let c = p.scalar()?;
                    p.sym(";")?;
                    coeffs.push((a, x, c));
                }
                p.sym("}")?;
                Block::Mc(McBlock { name, algebra, lie, coeffs })
            }
            other => return perr(line, col, format!("unknown block kind `{other}`")),
        };
        doc.blocks.push(block);
    }
    doc.validate()?;
    Ok(doc)
}

/// Either kind of map a `map` block can denote.
pub enum ResolvedMap {
    Cdga(CdgaMorphism),
    ToFd(FreeToFdMap),
}

impl Document {
    pub fn get(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name() == name)
    }

    /// The named block, or the first block of one of `kinds`.
    pub fn pick(&self, name: Option<&str>, kinds: &[&str]) -> Result<&Block> {
        let b = match name {
            Some(n) => self.get(n).ok_or_else(|| Error::UnknownName(n.to_string()))?,
            None => self.blocks.iter().find(|b| kinds.contains(&b.kind())).ok_or_else(|| Error::Usage(format!("no {} block in the input", kinds.join(" or "))))?,
        };
        if !kinds.contains(&b.kind()) {
            return Err(Error::Usage(format!("block {} is a {}, expected {}", b.name(), b.kind(), kinds.join(" or "))));
        }
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        for b in &self.blocks {
            match b {
                Block::Map(_) => {
                    self.resolve_map(b)?;
                }
                Block::Mc(m) => {
                    match self.get(&m.algebra) {
                        Some(Block::Fd(_)) => {}
                        _ => return Err(Error::UnknownName(format!("fdalgebra {}", m.algebra))),
                    }
                    match self.get(&m.lie) {
                        Some(Block::Dgla(_)) => {}
                        _ => return Err(Error::UnknownName(format!("dgla {}", m.lie))),
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn resolve_map(&self, b: &Block) -> Result<ResolvedMap> {
        let Block::Map(m) = b else { return Err(Error::Usage(format!("{} is not a map", b.name()))) };
        let Some(Block::Cdga(src)) = self.get(&m.source) else { return Err(Error::UnknownName(format!("cdga {}", m.source))) };
        for (n, e) in &m.sends {
            if src.algebra.index_of(n).is_none() {
                return perr(e.line, e.col, format!("`{n}` is not a generator of {}", m.source));
            }
        }
        match self.get(&m.target) {
            Some(Block::Cdga(tgt)) => {
                let mut images = BTreeMap::new();
                for (n, e) in &m.sends {
                    images.insert(n.clone(), cga_expr(&tgt.algebra, e)?);
                }
                Ok(ResolvedMap::Cdga(CdgaMorphism::new(src.clone(), tgt.clone(), &images)?))
            }
            Some(Block::Fd(a)) => {
                let mut images = vec![SparseVec::new(); src.gens().len()];
                for (n, e) in &m.sends {
                    images[src.algebra.index_of(n).unwrap()] = fd_expr(&a.space, e)?;
                }
                Ok(ResolvedMap::ToFd(FreeToFdMap { source: src.clone(), target: a.clone(), images }))
            }
            _ => Err(Error::UnknownName(format!("cdga or fdalgebra {}", m.target))),
        }
    }
}

fn emit_expr(e: &Expr) -> String {
    let mut out = String::new();
    for (k, (c, fs)) in e.terms.iter().enumerate() {
        let body: Vec<String> = fs
            .iter()
            .map(|f| match f {
                Factor::Atom(n, 1) => n.clone(),
                Factor::Atom(n, k) => format!("{n}^{k}"),
                Factor::Bracket(a, b) => format!("[{},{}]", emit_expr(a), emit_expr(b)),
            })
            .collect();
        let neg = c < &Scalar::zero();
        if k > 0 {
            out.push_str(if neg { " - " } else { " + " });
        } else if neg {
            out.push('-');
        }
        let a = if neg { -c.clone() } else { c.clone() };
        if body.is_empty() {
            write!(out, "{a}").unwrap();
        } else if a.is_one() {
            out.push_str(&body.join("*"));
        } else {
            write!(out, "{a}*{}", body.join("*")).unwrap();
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn fd_vec(space: &GradedSlice, v: &SparseVec) -> String {
    crate::freecga::format_terms(v.iter().map(|(&i, c)| (space.label(i).to_string(), c)))
}

/// Text form of a document; `parse(emit(d))` reproduces `d`.
pub fn emit(doc: &Document) -> String {
    let mut out = String::new();
    for b in &doc.blocks {
        match b {
            Block::Cdga(p) => {
                let s = p.to_string();
                let s = s.strip_suffix('}').unwrap_or(&s);
                writeln!(out, "{s}  window {};\n}}", p.window).unwrap();
            }
            Block::Dgla(p) => {
                let s = p.to_string();
                let s = s.strip_suffix('}').unwrap_or(&s);
                writeln!(out, "{s}  window {};\n}}", p.window).unwrap();
            }
            Block::Fd(a) => {
                writeln!(out, "fdalgebra {}{} {{", a.name, if a.commutative { "" } else { " assoc" }).unwrap();
                for i in 0..a.dim() {
                    writeln!(out, "  basis {} : deg {}, wt {};", a.space.label(i), a.space.degree(i), a.space.weight(i)).unwrap();
                }
                writeln!(out, "  unit {};", a.space.label(a.unit)).unwrap();
                for i in 0..a.dim() {
                    for j in 0..a.dim() {
                        if i == a.unit || j == a.unit {
                            continue;
                        }
                        let v = a.product(i, j);
                        if !v.is_empty() {
                            writeln!(out, "  mul {}*{} = {};", a.space.label(i), a.space.label(j), fd_vec(&a.space, &v)).unwrap();
                        }
                    }
                }
                for i in 0..a.dim() {
                    let v = a.apply_d(&basis_vec(i));
                    if !v.is_empty() {
                        writeln!(out, "  d {} = {};", a.space.label(i), fd_vec(&a.space, &v)).unwrap();
                    }
                }
                writeln!(out, "}}").unwrap();
            }
            Block::Map(m) => {
                writeln!(out, "map {} : {} -> {} {{", m.name, m.source, m.target).unwrap();
                for (n, e) in &m.sends {
                    writeln!(out, "  send {n} = {};", emit_expr(e)).unwrap();
                }
                writeln!(out, "}}").unwrap();
            }
            Block::Mc(m) => {
                writeln!(out, "mc {} : {}, {} {{", m.name, m.algebra, m.lie).unwrap();
                for (a, x, c) in &m.coeffs {
                    writeln!(out, "  coeff {a}, {} = {c};", emit_expr(x)).unwrap();
                }
                writeln!(out, "}}").unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;

    const CP2: &str = "
# H*(CP^2) and its Quillen model
fdalgebra H {
  basis 1 : deg 0, wt 0;
  basis u : deg 2, wt 2;
  basis u^2 : deg 4, wt 4;
  unit 1;
  mul u*u = u^2;
}
dgla L { gen v1 : deg -1, wt -2; gen v2 : deg -3, wt -4; d v2 = 1/2 [v1,v1]; }
cdga M { gen x : deg 2, wt 2; gen y : deg 5, wt 6; d y = x^3; window 0..14; }
map phi : M -> H { send x = u; }
mc tau : H, L { coeff u, v1 = -1; }
";

    #[test]
    fn one_generator_dgla() {
        let d = parse("dgla L { gen v1 : deg -1, wt -2; d v1 = 0; }").unwrap();
        let Block::Dgla(p) = &d.blocks[0] else { panic!() };
        assert_eq!(p.gens().len(), 1);
        assert!(p.d[0].is_zero());
    }

    #[test]
    fn cp2_document() {
        let d = parse(CP2).unwrap();
        assert_eq!(d.blocks.len(), 5);
        let Block::Dgla(l) = &d.blocks[1] else { panic!() };
        let v1 = l.lie.gen(l.lie.index_of("v1").unwrap());
        assert_eq!(l.d[l.lie.index_of("v2").unwrap()], l.lie.bracket(&v1, &v1).scale(&frac(1, 2)));
        assert!(l.check().passed);
        let ResolvedMap::ToFd(f) = d.resolve_map(&d.blocks[3]).unwrap() else { panic!() };
        assert_eq!(f.check().get("chain_map"), Some(true));
    }

    #[test]
    fn round_trip() {
        let d = parse(CP2).unwrap();
        let t = emit(&d);
        let again = parse(&t).unwrap();
        assert_eq!(again, d, "{t}");
        assert_eq!(emit(&again), t);
    }

    #[test]
    fn errors_carry_location() {
        match parse("cdga A {\n  gen v :\n}") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (3, 1)),
            other => panic!("{other:?}"),
        }
        match parse("cdga A { gen v : deg 2; }") {
            Err(Error::Parse { line: 1, msg, .. }) => assert!(msg.contains("`,`"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("cdga A { gen v : deg 2, wt 2; gen v : deg 2, wt 2; }"), Err(Error::DuplicateName(_))));
        assert!(matches!(parse("cdga A { gen v : deg 2, wt 2; d w = v; }"), Err(Error::Parse { .. })));
        assert!(matches!(parse("cdga A { gen v : deg 2, wt 2; } $"), Err(Error::Parse { col: 33, .. })));
    }
}
