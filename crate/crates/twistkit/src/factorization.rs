//! Curve expressions, factorizations, exact evaluation and the text format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::freegroup::{GroupError, MarkedClass};
use crate::invariants::{signed_transvection, transvect, IntMatrix};
use crate::surface::{multi_twist_target, table, Label, SurfaceError, TwistTable};

pub const DEFAULT_DEPTH_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorizationError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown label '{name}'")]
    UnknownLabel { line: usize, col: usize, name: String },
    #[error("curve expression depth {depth} exceeds limit {limit}")]
    Depth { depth: usize, limit: usize },
    #[error("hole count mismatch: expected {expected}, found {found}")]
    KMismatch { expected: usize, found: usize },
    #[error("empty factorization")]
    Empty,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A signed twist used as a conjugator.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Atom {
    pub sign: i8,
    pub curve: CurveExpr,
}

/// `[a_1 … a_m](base)`: the image of a base curve under t_{a_1} ⋯ t_{a_m}, outermost first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct CurveExpr {
    pub base: Label,
    pub conj: Vec<Atom>,
}

impl CurveExpr {
    pub fn label(base: Label) -> CurveExpr {
        CurveExpr { base, conj: Vec::new() }
    }

    /// Apply the atoms to `inner`, flattening and cancelling adjacent inverse atoms.
    pub fn conjugated(atoms: impl IntoIterator<Item = Atom>, inner: &CurveExpr) -> CurveExpr {
        let mut conj: Vec<Atom> = Vec::new();
        for a in atoms.into_iter().chain(inner.conj.iter().cloned()) {
            match conj.last() {
                Some(last) if last.curve == a.curve && last.sign == -a.sign => {
                    conj.pop();
                }
                _ => conj.push(a),
            }
        }
        CurveExpr { base: inner.base, conj }
    }

    pub fn depth(&self) -> usize {
        self.conj.iter().map(|a| a.curve.depth() + 1).max().unwrap_or(0)
    }

    pub fn is_label(&self) -> bool {
        self.conj.is_empty()
    }

    /// Every label mentioned anywhere in the expression.
    pub fn labels(&self, out: &mut Vec<Label>) {
        out.push(self.base);
        for a in &self.conj {
            a.curve.labels(out);
        }
    }

    /// Rewrite labels; `None` removes atoms (and signals removal of the whole curve at the base).
    pub fn map_labels(&self, f: &dyn Fn(Label) -> Option<Label>) -> Option<CurveExpr> {
        let base = f(self.base)?;
        let atoms: Vec<Atom> = self
            .conj
            .iter()
            .filter_map(|a| a.curve.map_labels(f).map(|curve| Atom { sign: a.sign, curve }))
            .collect();
        Some(CurveExpr::conjugated(atoms, &CurveExpr::label(base)))
    }
}

impl fmt::Display for CurveExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conj.is_empty() {
            return write!(f, "{}", self.base);
        }
        write!(f, "[")?;
        for (i, a) in self.conj.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, "]({})", self.base)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "~")?;
        }
        write!(f, "{}", self.curve)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TwistFactor {
    pub sign: i8,
    pub curve: CurveExpr,
}

impl TwistFactor {
    pub fn positive(curve: CurveExpr) -> TwistFactor {
        TwistFactor { sign: 1, curve }
    }

    pub fn as_atom(&self) -> Atom {
        Atom { sign: self.sign, curve: self.curve.clone() }
    }
}

impl fmt::Display for TwistFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "~")?;
        }
        write!(f, "{}", self.curve)
    }
}

/// Twist factors in written order; the rightmost factor acts first.
#[derive(Clone, Debug)]
pub struct Factorization {
    table: Arc<TwistTable>,
    factors: Vec<TwistFactor>,
}

impl PartialEq for Factorization {
    fn eq(&self, other: &Factorization) -> bool {
        self.k() == other.k() && self.factors == other.factors
    }
}

impl Eq for Factorization {}

impl Factorization {
    pub fn new(table: Arc<TwistTable>, factors: Vec<TwistFactor>) -> Result<Factorization, FactorizationError> {
        let f = Factorization { table, factors };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), FactorizationError> {
        for fac in &self.factors {
            let depth = fac.curve.depth();
            if depth > DEFAULT_DEPTH_LIMIT {
                return Err(FactorizationError::Depth { depth, limit: DEFAULT_DEPTH_LIMIT });
            }
            let mut ls = Vec::new();
            fac.curve.labels(&mut ls);
            for l in ls {
                self.table.get(l)?;
            }
        }
        Ok(())
    }

    /// Same table, new factors.
    pub fn with_factors(&self, factors: Vec<TwistFactor>) -> Factorization {
        Factorization { table: self.table.clone(), factors }
    }

    /// t_{δ_1} ⋯ t_{δ_k} written as a factorization.
    pub fn boundary(table: Arc<TwistTable>) -> Factorization {
        let factors = (1..=table.k()).map(|j| TwistFactor::positive(CurveExpr::label(Label::De(j as u32)))).collect();
        Factorization { table, factors }
    }

    pub fn k(&self) -> usize {
        self.table.k()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[TwistFactor] {
        &self.factors
    }

    pub fn table(&self) -> &Arc<TwistTable> {
        &self.table
    }

    pub fn signs(&self) -> Vec<i8> {
        self.factors.iter().map(|f| f.sign).collect()
    }

    pub fn class_of(&self, e: &CurveExpr) -> Result<Vec<i64>, FactorizationError> {
        let mut v = self.table.get(e.base)?.hclass.clone();
        for a in e.conj.iter().rev() {
            let c = self.class_of(&a.curve)?;
            v = transvect(&c, a.sign, &v);
        }
        Ok(v)
    }

    /// Homology classes of the factor curves.
    pub fn classes(&self) -> Result<Vec<Vec<i64>>, FactorizationError> {
        self.factors.iter().map(|f| self.class_of(&f.curve)).collect()
    }

    /// Product of the factor transvections on H₁ (rightmost acts first).
    pub fn homology_shadow(&self) -> Result<IntMatrix, FactorizationError> {
        let mut m = IntMatrix::identity(self.k() + 1);
        for (c, f) in self.classes()?.iter().zip(&self.factors) {
            m = m.mul(&signed_transvection(c, f.sign));
        }
        Ok(m)
    }

    pub fn eval_product(&self) -> Result<MarkedClass, FactorizationError> {
        Evaluator::new(&self.table).product(&self.factors)
    }

    pub fn verify(&self) -> Result<bool, FactorizationError> {
        Ok(self.eval_product()? == multi_twist_target(&self.table)?)
    }

    pub fn to_text(&self) -> String {
        format(self)
    }
}

/// Evaluates curve expressions against one table, caching conjugated twists.
pub struct Evaluator<'a> {
    table: &'a TwistTable,
    depth_limit: usize,
    cache: HashMap<CurveExpr, MarkedClass>,
}

impl<'a> Evaluator<'a> {
    pub fn new(table: &'a TwistTable) -> Evaluator<'a> {
        Evaluator { table, depth_limit: DEFAULT_DEPTH_LIMIT, cache: HashMap::new() }
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Evaluator<'a> {
        self.depth_limit = limit;
        self
    }

    /// The right-handed twist about `e`: W · T_base · W⁻¹ with W the conjugator product.
    pub fn curve(&mut self, e: &CurveExpr) -> Result<MarkedClass, FactorizationError> {
        let depth = e.depth();
        if depth > self.depth_limit {
            return Err(FactorizationError::Depth { depth, limit: self.depth_limit });
        }
        self.curve_inner(e)
    }

    fn curve_inner(&mut self, e: &CurveExpr) -> Result<MarkedClass, FactorizationError> {
        if e.conj.is_empty() {
            return Ok(self.table.get(e.base)?.twist.clone());
        }
        if let Some(m) = self.cache.get(e) {
            return Ok(m.clone());
        }
        let k = self.table.k();
        let mut w = MarkedClass::identity(k);
        for a in &e.conj {
            let t = self.curve_inner(&a.curve)?;
            let t = if a.sign < 0 { t.inverse() } else { t };
            w = MarkedClass::compose(&w, &t)?;
        }
        let base = &self.table.get(e.base)?.twist;
        let m = MarkedClass::conjugate(&w, base)?;
        self.cache.insert(e.clone(), m.clone());
        Ok(m)
    }

    pub fn factor(&mut self, f: &TwistFactor) -> Result<MarkedClass, FactorizationError> {
        let t = self.curve(&f.curve)?;
        Ok(if f.sign < 0 { t.inverse() } else { t })
    }

    pub fn product(&mut self, factors: &[TwistFactor]) -> Result<MarkedClass, FactorizationError> {
        let mut acc = MarkedClass::identity(self.table.k());
        for f in factors {
            acc = MarkedClass::compose(&acc, &self.factor(f)?)?;
        }
        Ok(acc)
    }
}

pub fn eval_curve(table: &TwistTable, e: &CurveExpr) -> Result<MarkedClass, FactorizationError> {
    Evaluator::new(table).curve(e)
}

pub fn eval_product(f: &Factorization) -> Result<MarkedClass, FactorizationError> {
    f.eval_product()
}

pub fn verify_relation(f: &Factorization) -> Result<bool, FactorizationError> {
    f.verify()
}

pub fn homology_shadow(f: &Factorization) -> Result<IntMatrix, FactorizationError> {
    f.homology_shadow()
}

pub type Aliases = BTreeMap<String, CurveExpr>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> FactorizationError {
    FactorizationError::Syntax { line, col, msg: msg.into() }
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, FactorizationError> {
        let mut toks = Vec::new();
        let mut end = (1, 1);
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap();
            let chars: Vec<char> = line.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                let col = i + 1;
                if c.is_whitespace() {
                    i += 1;
                } else if c.is_ascii_alphabetic() {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    toks.push((Tok::Ident(chars[start..i].iter().collect()), ln + 1, col));
                } else if c.is_ascii_digit() {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let n = s.parse().map_err(|_| syntax(ln + 1, col, "integer too large"))?;
                    toks.push((Tok::Int(n), ln + 1, col));
                } else if "*~[]();".contains(c) {
                    toks.push((Tok::Sym(c), ln + 1, col));
                    i += 1;
                } else {
                    return Err(syntax(ln + 1, col, format!("unexpected character '{}'", c)));
                }
            }
            end = (ln + 1, chars.len() + 1);
        }
        Ok(Lexer { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), FactorizationError> {
        let (l, col) = self.here();
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            _ => Err(syntax(l, col, format!("expected '{}'", c))),
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), FactorizationError> {
        let (l, col) = self.here();
        match self.next() {
            Some(Tok::Ident(s)) if s == w => Ok(()),
            _ => Err(syntax(l, col, format!("expected '{}'", w))),
        }
    }

    fn expect_int(&mut self) -> Result<u64, FactorizationError> {
        let (l, col) = self.here();
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            _ => Err(syntax(l, col, "expected integer")),
        }
    }
}

fn is_label_syntax(s: &str) -> bool {
    s == "be"
        || (s.len() > 2
            && ["al", "si", "de"].contains(&&s[..2])
            && s[2..].chars().all(|c| c.is_ascii_digit()))
}

struct Parser<'a> {
    lx: Lexer,
    aliases: Option<&'a Aliases>,
}

impl Parser<'_> {
    fn header(&mut self) -> Result<usize, FactorizationError> {
        self.lx.expect_word("surface")?;
        self.lx.expect_word("genus")?;
        let (l, col) = self.lx.here();
        if self.lx.expect_int()? != 1 {
            return Err(syntax(l, col, "only genus 1 is supported"));
        }
        self.lx.expect_word("holes")?;
        let k = self.lx.expect_int()? as usize;
        self.lx.expect_sym(';')?;
        Ok(k)
    }

    fn curve(&mut self, depth: usize) -> Result<CurveExpr, FactorizationError> {
        if depth > DEFAULT_DEPTH_LIMIT {
            return Err(FactorizationError::Depth { depth, limit: DEFAULT_DEPTH_LIMIT });
        }
        let (l, col) = self.lx.here();
        match self.lx.next() {
            Some(Tok::Sym('[')) => {
                let mut atoms = Vec::new();
                loop {
                    match self.lx.peek() {
                        Some(Tok::Sym(']')) => break,
                        None => return Err(syntax(l, col, "unclosed '['")),
                        _ => {}
                    }
                    let sign = if self.lx.peek() == Some(&Tok::Sym('~')) {
                        self.lx.next();
                        -1
                    } else {
                        1
                    };
                    atoms.push(Atom { sign, curve: self.curve(depth + 1)? });
                }
                if atoms.is_empty() {
                    return Err(syntax(l, col, "empty conjugator"));
                }
                self.lx.expect_sym(']')?;
                self.lx.expect_sym('(')?;
                let inner = self.curve(depth)?;
                self.lx.expect_sym(')')?;
                let e = CurveExpr::conjugated(atoms, &inner);
                let d = e.depth();
                if d > DEFAULT_DEPTH_LIMIT {
                    return Err(FactorizationError::Depth { depth: d, limit: DEFAULT_DEPTH_LIMIT });
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if is_label_syntax(&name) {
                    let label = name.parse().map_err(|_| FactorizationError::UnknownLabel { line: l, col, name: name.clone() })?;
                    return Ok(CurveExpr::label(label));
                }
                match self.aliases.and_then(|a| a.get(&name)) {
                    Some(e) => Ok(e.clone()),
                    None => Err(FactorizationError::UnknownLabel { line: l, col, name }),
                }
            }
            _ => Err(syntax(l, col, "expected a curve")),
        }
    }

    fn factor(&mut self) -> Result<TwistFactor, FactorizationError> {
        let sign = if self.lx.peek() == Some(&Tok::Sym('~')) {
            self.lx.next();
            -1
        } else {
            1
        };
        Ok(TwistFactor { sign, curve: self.curve(0)? })
    }

    fn factors(&mut self) -> Result<Vec<TwistFactor>, FactorizationError> {
        let mut out = vec![self.factor()?];
        while self.lx.peek() == Some(&Tok::Sym('*')) {
            self.lx.next();
            out.push(self.factor()?);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), FactorizationError> {
        if self.lx.peek().is_some() {
            let (l, col) = self.lx.here();
            return Err(syntax(l, col, "trailing input"));
        }
        Ok(())
    }
}

/// Parse just a curve expression (used for alias definitions).
pub fn parse_curve(text: &str, aliases: Option<&Aliases>) -> Result<CurveExpr, FactorizationError> {
    let mut p = Parser { lx: Lexer::new(text)?, aliases };
    let e = p.curve(0)?;
    p.finish()?;
    Ok(e)
}

/// Header and factors without binding to a table.
pub fn parse_unbound(text: &str, aliases: Option<&Aliases>) -> Result<(usize, Vec<TwistFactor>), FactorizationError> {
    let mut p = Parser { lx: Lexer::new(text)?, aliases };
    let k = p.header()?;
    let fs = p.factors()?;
    p.finish()?;
    Ok((k, fs))
}

/// Parse against the shipped table for the declared hole count.
pub fn parse(text: &str) -> Result<Factorization, FactorizationError> {
    parse_with(text, None)
}

pub fn parse_with(text: &str, aliases: Option<&Aliases>) -> Result<Factorization, FactorizationError> {
    let (k, factors) = parse_unbound(text, aliases)?;
    Factorization::new(table(k)?, factors)
}

/// Parse against a given table; the header must agree with it.
pub fn parse_in(text: &str, t: Arc<TwistTable>, aliases: Option<&Aliases>) -> Result<Factorization, FactorizationError> {
    let (k, factors) = parse_unbound(text, aliases)?;
    if k != t.k() {
        return Err(FactorizationError::KMismatch { expected: t.k(), found: k });
    }
    Factorization::new(t, factors)
}

pub fn format(f: &Factorization) -> String {
    let body: Vec<String> = f.factors.iter().map(|x| x.to_string()).collect();
    format!("surface genus 1 holes {}; {}", f.k(), body.join(" * "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unbound(text: &str) -> (usize, Vec<TwistFactor>) {
        parse_unbound(text, None).unwrap()
    }

    #[test]
    fn grammar_examples() {
        let (k, fs) = unbound("surface genus 1 holes 8; al5 * [~al5 al4](be)");
        assert_eq!(k, 8);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[1].curve.to_string(), "[~al5 al4](be)");
        let (_, fs) = unbound("surface genus 1 holes 2; ~al1");
        assert_eq!(fs[0].sign, -1);
        let (_, fs) = unbound("surface genus 1 holes 8; [[al1](be)](si3)");
        assert_eq!(fs[0].curve.depth(), 2);
        assert_eq!(fs[0].curve.base, Label::Si(3));
    }

    #[test]
    fn nested_conjugation_flattens() {
        let (_, fs) = unbound("surface genus 1 holes 8; [~al5]([al4](be)) * [al1 ~al1](be)");
        assert_eq!(fs[0].curve.to_string(), "[~al5 al4](be)");
        assert_eq!(fs[1].curve.to_string(), "be");
    }

    #[test]
    fn comments_and_whitespace() {
        let (k, fs) = unbound("# a comment\nsurface genus 1\n holes 3 ;  # more\n de1*de2 *\n de3");
        assert_eq!(k, 3);
        assert_eq!(fs.len(), 3);
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_unbound("surface genus 1 holes 3; al1 * ", None) {
            Err(FactorizationError::Syntax { line: 1, .. }) => {}
            other => panic!("{:?}", other),
        }
        match parse_unbound("surface genus 1 holes 3;\n al1 * xx2", None) {
            Err(FactorizationError::UnknownLabel { line: 2, col: 8, name }) => assert_eq!(name, "xx2"),
            other => panic!("{:?}", other),
        }
        assert!(parse_unbound("surface genus 2 holes 3; al1", None).is_err());
        assert!(parse_unbound("surface genus 1 holes 3; []( al1)", None).is_err());
        assert!(parse_unbound("surface genus 1 holes 3; al1 al2", None).is_err());
    }

    #[test]
    fn depth_limit_enforced() {
        let mut s = "be".to_string();
        for _ in 0..17 {
            s = format!("[{}](be)", s);
        }
        let text = format!("surface genus 1 holes 1; {}", s);
        assert!(matches!(parse_unbound(&text, None), Err(FactorizationError::Depth { .. })));
    }

    #[test]
    fn aliases_resolve() {
        let mut a = Aliases::new();
        a.insert("beta4".into(), parse_curve("[al4](be)", None).unwrap());
        let e = parse_curve("[~al5](beta4)", Some(&a)).unwrap();
        assert_eq!(e.to_string(), "[~al5 al4](be)");
        assert!(parse_curve("beta4", None).is_err());
    }
}
