//! The k-holed torus model, base curve twist tables and their validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::freegroup::{CertifiedAut, GroupError, MarkedClass, Word};
use crate::invariants::transvection;

pub const MAX_HOLES: usize = 9;
pub const TABLES_ENV: &str = "TWISTKIT_TABLES";

static EMBEDDED_TABLES: &str = include_str!("../data/tables.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("hole count {0} outside 1..=9")]
    KOutOfRange(usize),
    #[error("unknown curve label '{0}'")]
    UnknownLabel(String),
    #[error("no twist table for k = {0}")]
    NoTable(usize),
    #[error("table data line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot cap hole {hole} of a {k}-holed surface here")]
    CapIndex { hole: usize, k: usize },
    #[error("reading table data: {0}")]
    Io(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Al(u32),
    Be,
    Si(u32),
    De(u32),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Al(i) => write!(f, "al{}", i),
            Label::Be => write!(f, "be"),
            Label::Si(i) => write!(f, "si{}", i),
            Label::De(i) => write!(f, "de{}", i),
        }
    }
}

impl FromStr for Label {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Label, SurfaceError> {
        if s == "be" {
            return Ok(Label::Be);
        }
        let bad = || SurfaceError::UnknownLabel(s.to_string());
        if s.len() < 3 || !s.is_char_boundary(2) {
            return Err(bad());
        }
        let (head, num) = s.split_at(2);
        if num.starts_with('+') {
            return Err(bad());
        }
        let n: u32 = num.parse().map_err(|_| bad())?;
        match head {
            "al" => Ok(Label::Al(n)),
            "si" => Ok(Label::Si(n)),
            "de" => Ok(Label::De(n)),
            _ => Err(bad()),
        }
    }
}

/// Generators x, y, z_1..z_{k-1}; boundary words b_1..b_k.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceModel {
    pub k: usize,
    pub boundary_words: Vec<Word>,
}

impl SurfaceModel {
    pub fn rank(&self) -> usize {
        self.k + 1
    }

    pub fn basis(&self) -> Vec<String> {
        (0..self.rank()).map(crate::freegroup::gen_name).collect()
    }
}

pub fn build_model(k: usize) -> Result<SurfaceModel, SurfaceError> {
    if !(1..=MAX_HOLES).contains(&k) {
        return Err(SurfaceError::KOutOfRange(k));
    }
    let rank = k + 1;
    let mut boundary_words: Vec<Word> = (1..k).map(|i| Word::gen(i + 1, rank)).collect::<Result<_, _>>()?;
    let last = if k == 1 {
        "X y x Y".to_string()
    } else {
        let mut s: Vec<String> = (2..k).rev().map(|j| format!("Z{}", j)).collect();
        s.push("y x Y Z1 X".into());
        s.join(" ")
    };
    boundary_words.push(Word::parse(&last, rank)?);
    Ok(SurfaceModel { k, boundary_words })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseCurve {
    pub label: Label,
    pub twist: MarkedClass,
    pub twist_inv: MarkedClass,
    pub hclass: Vec<i64>,
    pub disjoint_with: BTreeSet<Label>,
    pub intersects_once: BTreeSet<Label>,
}

impl BaseCurve {
    pub fn new(label: Label, twist: MarkedClass, hclass: Vec<i64>) -> BaseCurve {
        let twist_inv = twist.inverse();
        BaseCurve {
            label,
            twist,
            twist_inv,
            hclass,
            disjoint_with: BTreeSet::new(),
            intersects_once: BTreeSet::new(),
        }
    }

    pub fn signed_twist(&self, sign: i8) -> &MarkedClass {
        if sign < 0 {
            &self.twist_inv
        } else {
            &self.twist
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistTable {
    pub model: SurfaceModel,
    pub curves: BTreeMap<Label, BaseCurve>,
}

impl TwistTable {
    pub fn k(&self) -> usize {
        self.model.k
    }

    pub fn get(&self, label: Label) -> Result<&BaseCurve, SurfaceError> {
        self.curves.get(&label).ok_or_else(|| SurfaceError::UnknownLabel(label.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.curves.keys().copied()
    }

    /// Serialize in the shipped text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("table {}\n", self.k());
        for c in self.curves.values() {
            out += &format!("curve {}\n", c.label);
            out += &format!("  hclass {}\n", join(c.hclass.iter()));
            for w in c.twist.theta().forward() {
                out += &format!("  image {}\n", w);
            }
            for w in c.twist.theta().backward() {
                out += &format!("  inverse {}\n", w);
            }
            for w in c.twist.arcs() {
                out += &format!("  arc {}\n", w);
            }
            out += &format!("  disjoint {}\n", join(c.disjoint_with.iter()));
            out += &format!("  once {}\n", join(c.intersects_once.iter()));
        }
        out += "end\n";
        out
    }

    /// Semantic capping of hole `i` (2..=k-1): z_i dies, δ_i disappears, later δ's shift down.
    pub fn cap(&self, i: usize) -> Result<TwistTable, SurfaceError> {
        let k = self.k();
        if i < 2 || i >= k {
            return Err(SurfaceError::CapIndex { hole: i, k });
        }
        let relabel = |l: Label| -> Option<Label> {
            match l {
                Label::De(j) if j as usize == i => None,
                Label::De(j) if j as usize > i => Some(Label::De(j - 1)),
                other => Some(other),
            }
        };
        let mut curves = BTreeMap::new();
        for c in self.curves.values() {
            let Some(label) = relabel(c.label) else { continue };
            let twist = c.twist.cap(i).ok_or(SurfaceError::CapIndex { hole: i, k })?;
            let mut hclass = c.hclass.clone();
            hclass.remove(i + 1);
            let mut nc = BaseCurve::new(label, twist, hclass);
            nc.disjoint_with = c.disjoint_with.iter().filter_map(|&l| relabel(l)).collect();
            nc.intersects_once = c.intersects_once.iter().filter_map(|&l| relabel(l)).collect();
            curves.insert(label, nc);
        }
        Ok(TwistTable { model: build_model(k - 1)?, curves })
    }
}

fn join<T: fmt::Display>(it: impl Iterator<Item = T>) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn tables_to_text(tables: &[&TwistTable]) -> String {
    let mut out = String::from("twistkit-tables 1\n");
    for t in tables {
        out += &t.to_text();
    }
    out
}

/// Parse the table data format.
pub fn parse_tables(text: &str) -> Result<BTreeMap<usize, TwistTable>, SurfaceError> {
    struct Pending {
        label: Label,
        hclass: Vec<i64>,
        image: Vec<Word>,
        inverse: Vec<Word>,
        arc: Vec<Word>,
        disjoint: BTreeSet<Label>,
        once: BTreeSet<Label>,
    }
    let mut tables = BTreeMap::new();
    let mut current: Option<TwistTable> = None;
    let mut pending: Option<Pending> = None;
    let mut seen_header = false;

    let finish = |p: Pending, t: &mut TwistTable, line: usize| -> Result<(), SurfaceError> {
        let err = |msg: String| SurfaceError::Parse { line, msg };
        let theta = CertifiedAut::new(p.image, p.inverse).map_err(|e| err(format!("{}: {}", p.label, e)))?;
        let twist = MarkedClass::new(t.k(), theta, p.arc).map_err(|e| err(format!("{}: {}", p.label, e)))?;
        if p.hclass.len() != t.k() + 1 {
            return Err(err(format!("{}: hclass has wrong length", p.label)));
        }
        let mut c = BaseCurve::new(p.label, twist, p.hclass);
        c.disjoint_with = p.disjoint;
        c.intersects_once = p.once;
        t.curves.insert(p.label, c);
        Ok(())
    };

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: &str| SurfaceError::Parse { line, msg: msg.to_string() };
        let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        if !seen_header {
            if key != "twistkit-tables" || rest != "1" {
                return Err(err("expected header 'twistkit-tables 1'"));
            }
            seen_header = true;
            continue;
        }
        match key {
            "table" => {
                if current.is_some() {
                    return Err(err("nested table"));
                }
                let k: usize = rest.parse().map_err(|_| err("bad hole count"))?;
                current = Some(TwistTable { model: build_model(k)?, curves: BTreeMap::new() });
            }
            "curve" | "end" => {
                let t = current.as_mut().ok_or_else(|| err("curve outside table"))?;
                if let Some(p) = pending.take() {
                    finish(p, t, line)?;
                }
                if key == "curve" {
                    pending = Some(Pending {
                        label: rest.parse()?,
                        hclass: Vec::new(),
                        image: Vec::new(),
                        inverse: Vec::new(),
                        arc: Vec::new(),
                        disjoint: BTreeSet::new(),
                        once: BTreeSet::new(),
                    });
                } else {
                    let t = current.take().unwrap();
                    tables.insert(t.k(), t);
                }
            }
            _ => {
                let rank = current.as_ref().ok_or_else(|| err("data outside table"))?.k() + 1;
                let p = pending.as_mut().ok_or_else(|| err("data outside curve"))?;
                match key {
                    "hclass" => {
                        p.hclass = rest
                            .split_whitespace()
                            .map(|s| s.parse().map_err(|_| err("bad integer")))
                            .collect::<Result<_, _>>()?
                    }
                    "image" => p.image.push(Word::parse(rest, rank)?),
                    "inverse" => p.inverse.push(Word::parse(rest, rank)?),
                    "arc" => p.arc.push(Word::parse(rest, rank)?),
                    "disjoint" => p.disjoint = rest.split_whitespace().map(|s| s.parse()).collect::<Result<_, _>>()?,
                    "once" => p.once = rest.split_whitespace().map(|s| s.parse()).collect::<Result<_, _>>()?,
                    _ => return Err(err("unknown keyword")),
                }
            }
        }
    }
    if current.is_some() {
        return Err(SurfaceError::Parse { line: text.lines().count(), msg: "unterminated table".into() });
    }
    Ok(tables)
}

type TableSet = BTreeMap<usize, Arc<TwistTable>>;

fn loaded() -> &'static Result<TableSet, SurfaceError> {
    static TABLES: OnceLock<Result<TableSet, SurfaceError>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let text = match std::env::var_os(TABLES_ENV) {
            Some(path) => std::fs::read_to_string(&path)
                .map_err(|e| SurfaceError::Io(format!("{}: {}", path.to_string_lossy(), e)))?,
            None => EMBEDDED_TABLES.to_string(),
        };
        Ok(parse_tables(&text)?.into_iter().map(|(k, t)| (k, Arc::new(t))).collect())
    })
}

/// The shipped twist table for `k` holes (or the file named by `TWISTKIT_TABLES`).
pub fn table(k: usize) -> Result<Arc<TwistTable>, SurfaceError> {
    if !(1..=MAX_HOLES).contains(&k) {
        return Err(SurfaceError::KOutOfRange(k));
    }
    let set = loaded().as_ref().map_err(|e| e.clone())?;
    set.get(&k).cloned().ok_or(SurfaceError::NoTable(k))
}

/// t_{δ_1} ⋯ t_{δ_k}.
pub fn multi_twist_target(table: &TwistTable) -> Result<MarkedClass, SurfaceError> {
    let k = table.k();
    let mut parts = Vec::with_capacity(k);
    for j in 1..=k {
        parts.push(&table.get(Label::De(j as u32))?.twist);
    }
    Ok(MarkedClass::product(k, parts)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: String, passed: bool) {
        self.checks.push(Check { name, passed });
    }
}

fn braid(a: &MarkedClass, b: &MarkedClass) -> bool {
    let k = a.k();
    match (MarkedClass::product(k, [a, b, a]), MarkedClass::product(k, [b, a, b])) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Check the declared relations among base twists.
pub fn validate_base_relations(table: &TwistTable) -> ValidationReport {
    let mut r = ValidationReport::default();
    for c in table.curves.values() {
        for l in &c.intersects_once {
            if c.label < *l {
                let ok = table.get(*l).map(|d| braid(&c.twist, &d.twist)).unwrap_or(false);
                r.push(format!("braid {} {}", c.label, l), ok);
            }
        }
        for l in &c.disjoint_with {
            if c.label < *l {
                let ok = table
                    .get(*l)
                    .ok()
                    .and_then(|d| c.twist.commutes_with(&d.twist).ok())
                    .unwrap_or(false);
                r.push(format!("commute {} {}", c.label, l), ok);
            }
        }
    }
    for j in 1..=table.k() {
        let Ok(d) = table.get(Label::De(j as u32)) else {
            r.push(format!("de{} present", j), false);
            continue;
        };
        let central = table.curves.values().all(|c| d.twist.commutes_with(&c.twist).unwrap_or(false));
        r.push(format!("de{} central", j), central);
    }
    for c in table.curves.values() {
        let ab = c.twist.theta().abelianization();
        r.push(format!("homology {}", c.label), transvection_matches(&ab, &c.hclass));
    }
    if table.k() == 1 {
        r.push("chain (al1 be)^6 = de1".into(), chain_check(table).unwrap_or(false));
    }
    r
}

fn transvection_matches(ab: &[Vec<i64>], hclass: &[i64]) -> bool {
    let t = transvection(hclass);
    ab.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, v)| *t.get(i, j) == num_bigint::BigInt::from(*v)))
}

fn chain_check(table: &TwistTable) -> Result<bool, SurfaceError> {
    let a = &table.get(Label::Al(1))?.twist;
    let b = &table.get(Label::Be)?.twist;
    let ab = MarkedClass::compose(a, b)?;
    Ok(ab.pow(6)? == table.get(Label::De(1))?.twist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_roundtrip() {
        for s in ["al1", "be", "si12", "de9"] {
            assert_eq!(s.parse::<Label>().unwrap().to_string(), s);
        }
        for s in ["al", "bee", "xx1", "si+1", "b", "de-1"] {
            assert!(s.parse::<Label>().is_err(), "{}", s);
        }
    }

    #[test]
    fn model_ranks() {
        assert_eq!(build_model(1).unwrap().rank(), 2);
        assert_eq!(build_model(1).unwrap().boundary_words[0].to_string(), "X y x Y");
        let m8 = build_model(8).unwrap();
        assert_eq!(m8.rank(), 9);
        assert_eq!(m8.boundary_words.len(), 8);
        assert_eq!(m8.boundary_words[6].to_string(), "z7");
        assert_eq!(build_model(9).unwrap().rank(), 10);
        assert!(build_model(0).is_err());
        assert!(build_model(10).is_err());
    }

    #[test]
    fn boundary_classes_sum_to_zero() {
        for k in 1..=9 {
            let m = build_model(k).unwrap();
            let mut s = vec![0; k + 1];
            for b in &m.boundary_words {
                for (a, v) in s.iter_mut().zip(b.abelianize()) {
                    *a += v;
                }
            }
            assert!(s.iter().all(|&v| v == 0), "k = {}", k);
        }
    }
}
