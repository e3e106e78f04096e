//! Free groups, certified automorphisms and marked mapping classes.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("hole count mismatch: {0} vs {1}")]
    KMismatch(usize, usize),
    #[error("automorphism certificate failed at generator {0}")]
    Certificate(usize),
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("bad word token '{0}'")]
    Token(String),
}

/// A letter: generator index and exponent sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub sign: i8,
}

impl Letter {
    fn code(self) -> i16 {
        let g = self.gen as i16 + 1;
        if self.sign < 0 {
            -g
        } else {
            g
        }
    }

    fn from_code(c: i16) -> Letter {
        Letter { gen: (c.unsigned_abs() - 1) as usize, sign: if c < 0 { -1 } else { 1 } }
    }
}

/// A freely reduced word. Letters are stored as signed codes `±(gen + 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    codes: Vec<i16>,
}

// Append `codes` (or their inverse) to a reduced stack, cancelling as we go.
fn push_codes(stack: &mut Vec<i16>, codes: &[i16], inverted: bool) {
    let mut push = |c: i16| {
        if stack.last() == Some(&-c) {
            stack.pop();
        } else {
            stack.push(c);
        }
    };
    if inverted {
        for &c in codes.iter().rev() {
            push(-c);
        }
    } else {
        for &c in codes {
            push(c);
        }
    }
}

pub fn gen_name(g: usize) -> String {
    match g {
        0 => "x".into(),
        1 => "y".into(),
        _ => format!("z{}", g - 1),
    }
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word { rank, codes: Vec::new() }
    }

    pub fn gen(g: usize, rank: usize) -> Result<Word, GroupError> {
        Word::reduce(&[(g, 1)], rank)
    }

    /// Freely reduce a raw letter sequence.
    pub fn reduce(letters: &[(usize, i8)], rank: usize) -> Result<Word, GroupError> {
        let mut stack = Vec::with_capacity(letters.len());
        for &(g, s) in letters {
            if g >= rank {
                return Err(GroupError::IndexOutOfRange { index: g, rank });
            }
            push_codes(&mut stack, &[Letter { gen: g, sign: s }.code()], false);
        }
        Ok(Word { rank, codes: stack })
    }

    pub(crate) fn from_codes(codes: &[i16], rank: usize) -> Word {
        let mut stack = Vec::with_capacity(codes.len());
        push_codes(&mut stack, codes, false);
        Word { rank, codes: stack }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.codes.iter().map(|&c| Letter::from_code(c))
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, GroupError> {
        if self.rank != other.rank {
            return Err(GroupError::RankMismatch(self.rank, other.rank));
        }
        let mut stack = self.codes.clone();
        push_codes(&mut stack, &other.codes, false);
        Ok(Word { rank: self.rank, codes: stack })
    }

    pub fn inverse(&self) -> Word {
        Word { rank: self.rank, codes: self.codes.iter().rev().map(|c| -c).collect() }
    }

    /// `g · w · g⁻¹`, reduced.
    pub fn conjugate(g: &Word, w: &Word) -> Result<Word, GroupError> {
        g.multiply(w)?.multiply(&g.inverse())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut stack = Vec::new();
        for _ in 0..n.unsigned_abs() {
            push_codes(&mut stack, &base.codes, false);
        }
        Word { rank: self.rank, codes: stack }
    }

    /// Exponent sum of each generator.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for l in self.letters() {
            v[l.gen] += l.sign as i64;
        }
        v
    }

    /// Kill generator `g` and renumber the ones above it.
    pub fn delete_gen(&self, g: usize) -> Word {
        let gc = g as i16 + 1;
        let codes: Vec<i16> = self
            .codes
            .iter()
            .filter(|c| c.abs() != gc)
            .map(|&c| if c.abs() > gc { c - c.signum() } else { c })
            .collect();
        Word::from_codes(&codes, self.rank - 1)
    }

    /// Substitute a word for each generator.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, GroupError> {
        if images.len() != self.rank {
            return Err(GroupError::ImageCount { expected: self.rank, got: images.len() });
        }
        let rank = images.first().map_or(self.rank, |w| w.rank);
        let mut stack = Vec::new();
        for &c in &self.codes {
            let img = &images[(c.unsigned_abs() - 1) as usize];
            if img.rank != rank {
                return Err(GroupError::RankMismatch(rank, img.rank));
            }
            push_codes(&mut stack, &img.codes, c < 0);
        }
        Ok(Word { rank, codes: stack })
    }

    /// Parse space separated generator names; upper case means inverse, `1` is the empty word.
    pub fn parse(text: &str, rank: usize) -> Result<Word, GroupError> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let first = tok.chars().next().unwrap();
            let sign = if first.is_ascii_uppercase() { -1 } else { 1 };
            let g = match (first.to_ascii_lowercase(), &tok[1..]) {
                ('x', "") => 0,
                ('y', "") => 1,
                ('z', n) => match n.parse::<usize>() {
                    Ok(i) if i >= 1 => i + 1,
                    _ => return Err(GroupError::Token(tok.into())),
                },
                _ => return Err(GroupError::Token(tok.into())),
            };
            raw.push((g, sign));
        }
        Word::reduce(&raw, rank)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.codes.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = gen_name(l.gen);
            if l.sign < 0 {
                write!(f, "{}", name.to_ascii_uppercase())?;
            } else {
                write!(f, "{}", name)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

/// An automorphism of the free group together with its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CertifiedAut {
    rank: usize,
    forward: Vec<Word>,
    backward: Vec<Word>,
}

fn apply_images(images: &[Word], w: &Word) -> Word {
    let mut stack = Vec::with_capacity(w.len() * 2);
    for &c in &w.codes {
        push_codes(&mut stack, &images[(c.unsigned_abs() - 1) as usize].codes, c < 0);
    }
    Word { rank: w.rank, codes: stack }
}

impl CertifiedAut {
    pub fn new(forward: Vec<Word>, backward: Vec<Word>) -> Result<CertifiedAut, GroupError> {
        let rank = forward.len();
        if backward.len() != rank {
            return Err(GroupError::ImageCount { expected: rank, got: backward.len() });
        }
        for w in forward.iter().chain(&backward) {
            if w.rank != rank {
                return Err(GroupError::RankMismatch(rank, w.rank));
            }
        }
        let a = CertifiedAut { rank, forward, backward };
        a.verify()?;
        Ok(a)
    }

    pub fn identity(rank: usize) -> CertifiedAut {
        let gens: Vec<Word> = (0..rank).map(|g| Word::from_codes(&[g as i16 + 1], rank)).collect();
        CertifiedAut { rank, forward: gens.clone(), backward: gens }
    }

    pub fn verify(&self) -> Result<(), GroupError> {
        for g in 0..self.rank {
            let want = [g as i16 + 1];
            if apply_images(&self.backward, &self.forward[g]).codes != want
                || apply_images(&self.forward, &self.backward[g]).codes != want
            {
                return Err(GroupError::Certificate(g));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn forward(&self) -> &[Word] {
        &self.forward
    }

    pub fn backward(&self) -> &[Word] {
        &self.backward
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(g, w)| w.codes == [g as i16 + 1])
    }

    pub fn apply(&self, w: &Word) -> Result<Word, GroupError> {
        if w.rank != self.rank {
            return Err(GroupError::RankMismatch(self.rank, w.rank));
        }
        Ok(apply_images(&self.forward, w))
    }

    pub fn apply_inverse(&self, w: &Word) -> Result<Word, GroupError> {
        if w.rank != self.rank {
            return Err(GroupError::RankMismatch(self.rank, w.rank));
        }
        Ok(apply_images(&self.backward, w))
    }

    /// Apply `a1` first, then `a2`.
    pub fn compose(a2: &CertifiedAut, a1: &CertifiedAut) -> Result<CertifiedAut, GroupError> {
        if a1.rank != a2.rank {
            return Err(GroupError::RankMismatch(a2.rank, a1.rank));
        }
        let forward = a1.forward.iter().map(|w| apply_images(&a2.forward, w)).collect();
        let backward = a2.backward.iter().map(|w| apply_images(&a1.backward, w)).collect();
        let a = CertifiedAut { rank: a1.rank, forward, backward };
        a.verify()?;
        Ok(a)
    }

    pub fn inverse(&self) -> CertifiedAut {
        CertifiedAut { rank: self.rank, forward: self.backward.clone(), backward: self.forward.clone() }
    }

    /// Integer matrix of the induced map on the abelianization, columns = images of generators.
    pub fn abelianization(&self) -> Vec<Vec<i64>> {
        let cols: Vec<Vec<i64>> = self.forward.iter().map(|w| w.abelianize()).collect();
        (0..self.rank).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }
}

/// A boundary fixing mapping class of the k-holed torus: the action on π₁
/// (basepoint on boundary 1) plus the displacement loops of reference arcs
/// to boundaries 2..k.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MarkedClass {
    k: usize,
    theta: CertifiedAut,
    arcs: Vec<Word>,
}

impl MarkedClass {
    pub fn new(k: usize, theta: CertifiedAut, arcs: Vec<Word>) -> Result<MarkedClass, GroupError> {
        if theta.rank() != k + 1 {
            return Err(GroupError::RankMismatch(k + 1, theta.rank()));
        }
        if arcs.len() != k.saturating_sub(1) {
            return Err(GroupError::ImageCount { expected: k.saturating_sub(1), got: arcs.len() });
        }
        if let Some(w) = arcs.iter().find(|w| w.rank != k + 1) {
            return Err(GroupError::RankMismatch(k + 1, w.rank));
        }
        Ok(MarkedClass { k, theta, arcs })
    }

    pub fn identity(k: usize) -> MarkedClass {
        MarkedClass {
            k,
            theta: CertifiedAut::identity(k + 1),
            arcs: vec![Word::identity(k + 1); k.saturating_sub(1)],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn theta(&self) -> &CertifiedAut {
        &self.theta
    }

    /// Arc word for boundary `i` (2..=k).
    pub fn arc(&self, i: usize) -> &Word {
        &self.arcs[i - 2]
    }

    pub fn arcs(&self) -> &[Word] {
        &self.arcs
    }

    pub fn is_identity(&self) -> bool {
        self.theta.is_identity() && self.arcs.iter().all(|w| w.is_empty())
    }

    /// Apply `m1` first, then `m2`.
    pub fn compose(m2: &MarkedClass, m1: &MarkedClass) -> Result<MarkedClass, GroupError> {
        if m1.k != m2.k {
            return Err(GroupError::KMismatch(m2.k, m1.k));
        }
        let theta = CertifiedAut::compose(&m2.theta, &m1.theta)?;
        let arcs = m1
            .arcs
            .iter()
            .zip(&m2.arcs)
            .map(|(u1, u2)| {
                let mut stack = apply_images(&m2.theta.forward, u1).codes;
                push_codes(&mut stack, &u2.codes, false);
                Word { rank: u1.rank, codes: stack }
            })
            .collect();
        Ok(MarkedClass { k: m1.k, theta, arcs })
    }

    pub fn inverse(&self) -> MarkedClass {
        let arcs = self.arcs.iter().map(|u| apply_images(&self.theta.backward, &u.inverse())).collect();
        MarkedClass { k: self.k, theta: self.theta.inverse(), arcs }
    }

    /// `a · b · a⁻¹`.
    pub fn conjugate(a: &MarkedClass, b: &MarkedClass) -> Result<MarkedClass, GroupError> {
        MarkedClass::compose(&MarkedClass::compose(a, b)?, &a.inverse())
    }

    pub fn pow(&self, n: i64) -> Result<MarkedClass, GroupError> {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = MarkedClass::identity(self.k);
        for _ in 0..n.unsigned_abs() {
            acc = MarkedClass::compose(&acc, &base)?;
        }
        Ok(acc)
    }

    pub fn commutes_with(&self, other: &MarkedClass) -> Result<bool, GroupError> {
        Ok(MarkedClass::compose(self, other)? == MarkedClass::compose(other, self)?)
    }

    /// Product in written order: the rightmost element acts first.
    pub fn product<'a>(k: usize, items: impl IntoIterator<Item = &'a MarkedClass>) -> Result<MarkedClass, GroupError> {
        let mut acc = MarkedClass::identity(k);
        for m in items {
            acc = MarkedClass::compose(&acc, m)?;
        }
        Ok(acc)
    }

    /// Image under capping hole `i`: generator z_i dies, arc i is dropped.
    /// Returns `None` when θ(z_i) is not killed, i.e. the class does not descend.
    pub fn cap(&self, i: usize) -> Option<MarkedClass> {
        if i < 2 || i >= self.k {
            return None;
        }
        let g = i + 1;
        if !self.theta.forward[g].delete_gen(g).is_empty() || !self.theta.backward[g].delete_gen(g).is_empty() {
            return None;
        }
        let keep = |v: &[Word]| -> Vec<Word> {
            v.iter().enumerate().filter(|(j, _)| *j != g).map(|(_, w)| w.delete_gen(g)).collect()
        };
        let theta = CertifiedAut::new(keep(&self.theta.forward), keep(&self.theta.backward)).ok()?;
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .filter(|(j, _)| j + 2 != i)
            .map(|(_, w)| w.delete_gen(g))
            .collect();
        Some(MarkedClass { k: self.k - 1, theta, arcs })
    }
}

impl fmt::Display for MarkedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, w) in self.theta.forward.iter().enumerate() {
            writeln!(f, "{} -> {}", gen_name(g), w)?;
        }
        for (j, w) in self.arcs.iter().enumerate() {
            writeln!(f, "arc {} -> {}", j + 2, w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, rank: usize) -> Word {
        Word::parse(s, rank).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Word::reduce(&[(0, 1), (0, -1), (1, 1)], 2).unwrap(), w("y", 2));
        assert!(Word::reduce(&[], 2).unwrap().is_empty());
        assert!(Word::reduce(&[(0, 1), (1, 1), (1, -1), (0, -1)], 2).unwrap().is_empty());
        assert_eq!(
            Word::reduce(&[(2, 1)], 2),
            Err(GroupError::IndexOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn multiply_examples() {
        assert!(w("x", 3).multiply(&w("X", 3)).unwrap().is_empty());
        assert_eq!(w("x", 3).multiply(&w("1", 3)).unwrap(), w("x", 3));
        assert_eq!(w("x y", 3).multiply(&w("Y z1", 3)).unwrap(), w("x z1", 3));
        assert_eq!(w("x", 3).multiply(&w("x", 2)), Err(GroupError::RankMismatch(3, 2)));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(Word::conjugate(&w("y", 2), &w("x", 2)).unwrap(), w("y x Y", 2));
        assert_eq!(Word::conjugate(&w("1", 2), &w("x", 2)).unwrap(), w("x", 2));
        assert_eq!(Word::conjugate(&w("x", 2), &w("x", 2)).unwrap(), w("x", 2));
    }

    fn alpha1() -> CertifiedAut {
        // x -> x, y -> y x
        CertifiedAut::new(vec![w("x", 2), w("y x", 2)], vec![w("x", 2), w("y X", 2)]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = CertifiedAut::identity(2);
        assert_eq!(id.apply(&w("x y", 2)).unwrap(), w("x y", 2));
        assert_eq!(alpha1().apply(&w("y", 2)).unwrap(), w("y x", 2));
        assert_eq!(alpha1().apply(&w("Y", 2)).unwrap(), w("X Y", 2));
    }

    #[test]
    fn bad_certificate_rejected() {
        let r = CertifiedAut::new(vec![w("x", 2), w("y x", 2)], vec![w("x", 2), w("y x", 2)]);
        assert!(matches!(r, Err(GroupError::Certificate(_))));
    }

    #[test]
    fn compose_order() {
        let a = alpha1();
        let b = CertifiedAut::new(vec![w("x Y", 2), w("y", 2)], vec![w("x y", 2), w("y", 2)]).unwrap();
        let ba = CertifiedAut::compose(&b, &a).unwrap();
        let ab = CertifiedAut::compose(&a, &b).unwrap();
        assert_ne!(ab, ba);
        // "ba" applies a first: y -> y x -> y (x Y)
        assert_eq!(ba.apply(&w("y", 2)).unwrap(), w("y x Y", 2));
        assert_eq!(CertifiedAut::compose(&a, &a.inverse()).unwrap(), CertifiedAut::identity(2));
        assert_eq!(CertifiedAut::compose(&CertifiedAut::identity(2), &a).unwrap(), a);
    }

    #[test]
    fn boundary_twist_arcs() {
        // theta trivial, arc 2 displaced by the loop around hole 2
        let k = 3;
        let d = w("z2", 4);
        let t = MarkedClass::new(
            k,
            CertifiedAut::identity(4),
            vec![d.clone(), Word::identity(4)],
        )
        .unwrap();
        let t2 = MarkedClass::compose(&t, &t).unwrap();
        assert!(t2.theta().is_identity());
        assert_eq!(t2.arc(2), &d.pow(2));
        assert_eq!(t.inverse().arc(2), &d.pow(-1));
        assert!(MarkedClass::compose(&t, &t.inverse()).unwrap().is_identity());
        assert_eq!(t.inverse().inverse(), t);
        assert_eq!(MarkedClass::identity(3).inverse(), MarkedClass::identity(3));
    }

    #[test]
    fn word_text_roundtrip() {
        let x = w("x Y z3 Z1 y", 5);
        assert_eq!(x.to_string(), "x Y z3 Z1 y");
        assert_eq!(Word::parse(&x.to_string(), 5).unwrap(), x);
        assert_eq!(Word::identity(3).to_string(), "1");
        assert!(Word::parse("q", 3).is_err());
    }

    #[test]
    fn delete_gen_renumbers() {
        assert_eq!(w("x z1 z2 Z3", 5).delete_gen(3), w("x z1 Z2", 4));
    }
}
