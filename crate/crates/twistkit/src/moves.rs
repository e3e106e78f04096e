//! Elementary moves on factorizations, derivation scripts and Hurwitz search.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::factorization::{parse_in, Aliases, Atom, CurveExpr, Evaluator, Factorization, FactorizationError, TwistFactor};
use crate::freegroup::MarkedClass;
use crate::surface::{Label, SurfaceError, TwistTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoveError {
    #[error("position {pos} out of range for {len} factors")]
    Position { pos: usize, len: usize },
    #[error("factors at {pos} and {} do not commute", pos + 1)]
    NotCommuting { pos: usize },
    #[error("the product does not commute with the rotated block")]
    NotCentral,
    #[error("factor {pos} is not '{name}'")]
    Alias { pos: usize, name: String },
    #[error("unknown alias '{0}'")]
    UnknownAlias(String),
    #[error("cannot cap hole {hole} of a {k}-holed factorization")]
    Cap { hole: usize, k: usize },
    #[error(transparent)]
    Factorization(#[from] FactorizationError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Positions are 1-based: position i refers to the pair (f_i, f_{i+1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    SlideRight(usize),
    SlideLeft(usize),
    SwapCommuting(usize),
    /// Move the last r factors to the front (negative r: the first |r| to the back).
    Rotate(i64),
    GlobalConj(Atom),
    ExpandAlias(usize, String),
    FoldAlias(usize, String),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::SlideRight(i) => write!(f, "slide_right {}", i),
            Move::SlideLeft(i) => write!(f, "slide_left {}", i),
            Move::SwapCommuting(i) => write!(f, "swap_commuting {}", i),
            Move::Rotate(r) => write!(f, "rotate {}", r),
            Move::GlobalConj(a) => write!(f, "global_conj {}", a),
            Move::ExpandAlias(i, n) => write!(f, "expand_alias {} {}", i, n),
            Move::FoldAlias(i, n) => write!(f, "fold_alias {} {}", i, n),
        }
    }
}

/// How `rotate` establishes that the product commutes with the moved block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Centrality {
    Check,
    /// The caller guarantees the product is central (e.g. a verified relation).
    Assume,
}

fn pair_index(f: &Factorization, i: usize) -> Result<usize, MoveError> {
    if i == 0 || i >= f.len() {
        return Err(MoveError::Position { pos: i, len: f.len() });
    }
    Ok(i - 1)
}

/// (f_i, f_{i+1}) ↦ (t_{f_i}(f_{i+1}), f_i).
pub fn slide_right(f: &Factorization, i: usize) -> Result<Factorization, MoveError> {
    let j = pair_index(f, i)?;
    let mut fs = f.factors().to_vec();
    let (a, b) = (fs[j].clone(), fs[j + 1].clone());
    fs[j] = TwistFactor { sign: b.sign, curve: CurveExpr::conjugated([a.as_atom()], &b.curve) };
    fs[j + 1] = a;
    Ok(f.with_factors(fs))
}

/// (f_i, f_{i+1}) ↦ (f_{i+1}, t_{f_{i+1}}⁻¹(f_i)).
pub fn slide_left(f: &Factorization, i: usize) -> Result<Factorization, MoveError> {
    let j = pair_index(f, i)?;
    let mut fs = f.factors().to_vec();
    let (a, b) = (fs[j].clone(), fs[j + 1].clone());
    let atom = Atom { sign: -b.sign, curve: b.curve.clone() };
    fs[j] = b;
    fs[j + 1] = TwistFactor { sign: a.sign, curve: CurveExpr::conjugated([atom], &a.curve) };
    Ok(f.with_factors(fs))
}

pub fn swap_commuting(f: &Factorization, i: usize) -> Result<Factorization, MoveError> {
    let j = pair_index(f, i)?;
    let fs = f.factors();
    let declared = fs[j].curve.is_label()
        && fs[j + 1].curve.is_label()
        && f.table().get(fs[j].curve.base)?.disjoint_with.contains(&fs[j + 1].curve.base);
    if !declared {
        let mut ev = Evaluator::new(f.table());
        let (a, b) = (ev.factor(&fs[j])?, ev.factor(&fs[j + 1])?);
        if !a.commutes_with(&b).map_err(FactorizationError::from)? {
            return Err(MoveError::NotCommuting { pos: i });
        }
    }
    let mut fs = fs.to_vec();
    fs.swap(j, j + 1);
    Ok(f.with_factors(fs))
}

pub fn rotate(f: &Factorization, r: i64, centrality: Centrality) -> Result<Factorization, MoveError> {
    let n = f.len() as i64;
    if n == 0 {
        return Ok(f.clone());
    }
    let r = r.rem_euclid(n) as usize;
    if r == 0 {
        return Ok(f.clone());
    }
    let split = f.len() - r;
    if centrality == Centrality::Check {
        let mut ev = Evaluator::new(f.table());
        let whole = ev.product(f.factors())?;
        let block = ev.product(&f.factors()[split..])?;
        if !whole.commutes_with(&block).map_err(FactorizationError::from)? {
            return Err(MoveError::NotCentral);
        }
    }
    let mut fs = f.factors()[split..].to_vec();
    fs.extend_from_slice(&f.factors()[..split]);
    Ok(f.with_factors(fs))
}

/// Conjugate every factor by the twist `c`; the product is unchanged when it is central.
pub fn global_conj(f: &Factorization, c: &Atom) -> Result<Factorization, MoveError> {
    let mut ls = Vec::new();
    c.curve.labels(&mut ls);
    for l in ls {
        f.table().get(l)?;
    }
    let fs = f
        .factors()
        .iter()
        .map(|x| TwistFactor { sign: x.sign, curve: CurveExpr::conjugated([c.clone()], &x.curve) })
        .collect();
    Ok(f.with_factors(fs))
}

fn alias_check(f: &Factorization, i: usize, name: &str, aliases: &Aliases) -> Result<(), MoveError> {
    if i == 0 || i > f.len() {
        return Err(MoveError::Position { pos: i, len: f.len() });
    }
    let e = aliases.get(name).ok_or_else(|| MoveError::UnknownAlias(name.into()))?;
    if &f.factors()[i - 1].curve != e {
        return Err(MoveError::Alias { pos: i, name: name.into() });
    }
    Ok(())
}

/// Cap hole `i` (2..=k-1): factors about δ_i disappear and later δ's are renumbered.
pub fn cap(f: &Factorization, i: usize) -> Result<Factorization, MoveError> {
    let k = f.k();
    if i < 2 || i >= k {
        return Err(MoveError::Cap { hole: i, k });
    }
    let table = Arc::new(f.table().cap(i)?);
    let relabel = |l: Label| match l {
        Label::De(j) if j as usize == i => None,
        Label::De(j) if j as usize > i => Some(Label::De(j - 1)),
        other => Some(other),
    };
    let fs = f
        .factors()
        .iter()
        .filter_map(|x| x.curve.map_labels(&relabel).map(|curve| TwistFactor { sign: x.sign, curve }))
        .collect();
    Ok(Factorization::new(table, fs)?)
}

/// Apply one move. Alias moves only check that the factor matches the alias.
pub fn apply(f: &Factorization, m: &Move, aliases: &Aliases, centrality: Centrality) -> Result<Factorization, MoveError> {
    match m {
        Move::SlideRight(i) => slide_right(f, *i),
        Move::SlideLeft(i) => slide_left(f, *i),
        Move::SwapCommuting(i) => swap_commuting(f, *i),
        Move::Rotate(r) => rotate(f, *r, centrality),
        Move::GlobalConj(c) => global_conj(f, c),
        Move::ExpandAlias(i, n) | Move::FoldAlias(i, n) => {
            alias_check(f, *i, n, aliases)?;
            Ok(f.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Move(Move),
    Checkpoint(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivationScript {
    pub name: String,
    pub start: String,
    pub target: String,
    pub steps: Vec<(usize, Step)>,
}

impl DerivationScript {
    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.steps.iter().filter_map(|(_, s)| match s {
            Step::Move(m) => Some(m),
            Step::Checkpoint(_) => None,
        })
    }

    pub fn checkpoints(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().filter_map(|(_, s)| match s {
            Step::Checkpoint(c) => Some(c.as_str()),
            Step::Move(_) => None,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {msg}")]
pub struct ScriptError {
    pub line: usize,
    pub msg: String,
}

fn parse_pos(line: usize, s: Option<&str>) -> Result<usize, ScriptError> {
    s.and_then(|s| s.parse().ok()).ok_or_else(|| ScriptError { line, msg: "expected a position".into() })
}

fn parse_move(line: usize, kw: &str, rest: &str) -> Result<Move, ScriptError> {
    let mut it = rest.split_whitespace();
    let m = match kw {
        "slide_right" => Move::SlideRight(parse_pos(line, it.next())?),
        "slide_left" => Move::SlideLeft(parse_pos(line, it.next())?),
        "swap_commuting" => Move::SwapCommuting(parse_pos(line, it.next())?),
        "rotate" => Move::Rotate(
            it.next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| ScriptError { line, msg: "expected a rotation amount".into() })?,
        ),
        "global_conj" => {
            let text = rest.trim();
            let (sign, body) = match text.strip_prefix('~') {
                Some(b) => (-1, b),
                None => (1, text),
            };
            let curve = crate::factorization::parse_curve(body, None)
                .map_err(|e| ScriptError { line, msg: e.to_string() })?;
            return Ok(Move::GlobalConj(Atom { sign, curve }));
        }
        "expand_alias" | "fold_alias" => {
            let i = parse_pos(line, it.next())?;
            let name = it.next().ok_or_else(|| ScriptError { line, msg: "expected an alias name".into() })?;
            if kw == "expand_alias" {
                Move::ExpandAlias(i, name.into())
            } else {
                Move::FoldAlias(i, name.into())
            }
        }
        _ => return Err(ScriptError { line, msg: format!("unknown directive '{}'", kw) }),
    };
    if it.next().is_some() {
        return Err(ScriptError { line, msg: "trailing input".into() });
    }
    Ok(m)
}

/// Parse one or more scripts. Each begins with `script NAME`.
pub fn parse_scripts(text: &str) -> Result<Vec<DerivationScript>, ScriptError> {
    let mut out: Vec<DerivationScript> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        if kw == "script" {
            out.push(DerivationScript {
                name: rest.trim().into(),
                start: String::new(),
                target: String::new(),
                steps: Vec::new(),
            });
            continue;
        }
        let cur = out.last_mut().ok_or_else(|| ScriptError { line, msg: "expected 'script NAME'".into() })?;
        match kw {
            "start" => cur.start = rest.trim().into(),
            "target" => cur.target = rest.trim().into(),
            "checkpoint" => cur.steps.push((line, Step::Checkpoint(rest.trim().into()))),
            _ => cur.steps.push((line, Step::Move(parse_move(line, kw, rest)?))),
        }
    }
    for s in &out {
        if s.start.is_empty() || s.target.is_empty() {
            return Err(ScriptError { line: 0, msg: format!("script {} needs start and target", s.name) });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct StepReport {
    pub line: usize,
    pub step: String,
    pub ok: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ReplayReport {
    pub script: String,
    pub steps: Vec<StepReport>,
    pub moves: usize,
    pub checkpoints: usize,
    pub matches_target: bool,
    pub certified: bool,
}

/// Replay from `start`, checking the product after every move, each checkpoint
/// syntactically, and the final factorization against `target`.
pub fn replay(script: &DerivationScript, start: &Factorization, target: &Factorization, aliases: &Aliases) -> ReplayReport {
    let mut rep = ReplayReport {
        script: script.name.clone(),
        steps: Vec::new(),
        moves: 0,
        checkpoints: 0,
        matches_target: false,
        certified: false,
    };
    let mut ev = Evaluator::new(start.table());
    let Ok(p0) = ev.product(start.factors()) else {
        rep.steps.push(StepReport { line: 0, step: "start".into(), ok: false, detail: Some("start does not evaluate".into()) });
        return rep;
    };
    let mut cur = start.clone();
    for (line, step) in &script.steps {
        let (label, res) = match step {
            Step::Move(m) => {
                rep.moves += 1;
                let r = apply(&cur, m, aliases, Centrality::Check).map_err(|e| e.to_string()).and_then(|next| {
                    match ev.product(next.factors()) {
                        Ok(p) if p == p0 => Ok(next),
                        Ok(_) => Err("product changed".to_string()),
                        Err(e) => Err(e.to_string()),
                    }
                });
                (m.to_string(), r)
            }
            Step::Checkpoint(text) => {
                rep.checkpoints += 1;
                let r = match parse_in(text, start.table().clone(), Some(aliases)) {
                    Ok(expect) if expect == cur => Ok(cur.clone()),
                    Ok(_) => Err(format!("checkpoint mismatch, have {}", cur.to_text())),
                    Err(e) => Err(e.to_string()),
                };
                ("checkpoint".to_string(), r)
            }
        };
        match res {
            Ok(next) => {
                cur = next;
                rep.steps.push(StepReport { line: *line, step: label, ok: true, detail: None });
            }
            Err(e) => {
                rep.steps.push(StepReport { line: *line, step: label, ok: false, detail: Some(e) });
                return rep;
            }
        }
    }
    rep.matches_target = &cur == target;
    rep.certified = rep.matches_target;
    rep
}

/// Which moves the search may use. Slides are always allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveSet {
    pub rotate: bool,
    pub global_conj: bool,
}

impl MoveSet {
    pub const STRICT: MoveSet = MoveSet { rotate: false, global_conj: false };
    pub const BROAD: MoveSet = MoveSet { rotate: true, global_conj: true };
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Found { path: Vec<Move>, result: Factorization },
    NotFound { nodes: u64 },
}

/// Interns twists by their mapping class and caches conjugation.
struct Interner {
    classes: Vec<MarkedClass>,
    inverses: Vec<MarkedClass>,
    index: HashMap<MarkedClass, u32>,
    conj: HashMap<(u32, i8, u32), u32>,
}

impl Interner {
    fn intern(&mut self, m: MarkedClass) -> u32 {
        if let Some(&id) = self.index.get(&m) {
            return id;
        }
        let id = self.classes.len() as u32;
        self.inverses.push(m.inverse());
        self.classes.push(m.clone());
        self.index.insert(m, id);
        id
    }

    /// Id of the twist about t_a^s(b).
    fn conj(&mut self, a: u32, s: i8, b: u32) -> u32 {
        if let Some(&id) = self.conj.get(&(a, s, b)) {
            return id;
        }
        let (x, xi) = if s > 0 {
            (&self.classes[a as usize], &self.inverses[a as usize])
        } else {
            (&self.inverses[a as usize], &self.classes[a as usize])
        };
        let m = MarkedClass::product(x.k(), [x, &self.classes[b as usize], xi]).expect("same k");
        let id = self.intern(m);
        self.conj.insert((a, s, b), id);
        id
    }
}

type State = Vec<(i8, u32)>;

struct Search<'a> {
    interner: &'a Mutex<Interner>,
    target: State,
    target_counts: HashMap<(i8, u32), usize>,
    conj_atoms: Vec<(Atom, i8, u32)>,
    moves: MoveSet,
    nodes: u64,
}

impl Search<'_> {
    fn h(&self, s: &State) -> usize {
        if self.moves.global_conj {
            return usize::from(s != &self.target);
        }
        let mut counts = self.target_counts.clone();
        let mut hit = 0;
        for x in s {
            if let Some(c) = counts.get_mut(x) {
                if *c > 0 {
                    *c -= 1;
                    hit += 1;
                }
            }
        }
        let missing = s.len() - hit;
        if missing == 0 && s != &self.target {
            1
        } else {
            missing
        }
    }

    fn successors(&self, s: &State) -> Vec<(Move, State)> {
        let n = s.len();
        let mut out = Vec::new();
        let mut it = self.interner.lock().expect("interner lock");
        for j in 0..n.saturating_sub(1) {
            let (a, b) = (s[j], s[j + 1]);
            let mut t = s.clone();
            t[j] = (b.0, it.conj(a.1, a.0, b.1));
            t[j + 1] = a;
            out.push((Move::SlideRight(j + 1), t));
            let mut t = s.clone();
            t[j] = b;
            t[j + 1] = (a.0, it.conj(b.1, -b.0, a.1));
            out.push((Move::SlideLeft(j + 1), t));
        }
        if self.moves.rotate {
            for r in 1..n {
                let mut t = s.clone();
                t.rotate_right(r);
                out.push((Move::Rotate(r as i64), t));
            }
        }
        if self.moves.global_conj {
            for (atom, sign, id) in &self.conj_atoms {
                let t = s.iter().map(|&(fs, f)| (fs, it.conj(*id, *sign, f))).collect();
                out.push((Move::GlobalConj(atom.clone()), t));
            }
        }
        out
    }

    /// Depth-first search bounded by `bound`, with a table of the best remaining budget per state.
    fn dfs(&mut self, s: &State, g: usize, bound: usize, seen: &mut HashMap<State, usize>, path: &mut Vec<Move>) -> bool {
        self.nodes += 1;
        if s == &self.target {
            return true;
        }
        if g + self.h(s) > bound {
            return false;
        }
        let left = bound - g;
        match seen.get(s) {
            Some(&l) if l >= left => return false,
            _ => {
                seen.insert(s.clone(), left);
            }
        }
        for (m, t) in self.successors(s) {
            path.push(m);
            if self.dfs(&t, g + 1, bound, seen, path) {
                return true;
            }
            path.pop();
        }
        false
    }
}

/// Iterative deepening search from `from` to `to` (factor by factor equal twists).
/// Returns a shortest path within `budget`; `jobs` > 1 explores first moves in parallel
/// and picks the first successful branch in move order, so the answer does not depend on scheduling.
pub fn hurwitz_search(from: &Factorization, to: &Factorization, budget: usize, moves: MoveSet, jobs: usize) -> Result<SearchOutcome, MoveError> {
    if from.k() != to.k() || from.len() != to.len() {
        return Err(MoveError::Factorization(FactorizationError::KMismatch { expected: from.k(), found: to.k() }));
    }
    let table: &TwistTable = from.table();
    let mut ev = Evaluator::new(table);
    let mut interner = Interner { classes: Vec::new(), inverses: Vec::new(), index: HashMap::new(), conj: HashMap::new() };
    let state = |f: &Factorization, ev: &mut Evaluator, it: &mut Interner| -> Result<State, MoveError> {
        f.factors()
            .iter()
            .map(|x| Ok((x.sign, it.intern(ev.curve(&x.curve)?))))
            .collect()
    };
    let start = state(from, &mut ev, &mut interner)?;
    let target = state(to, &mut ev, &mut interner)?;
    let mut conj_atoms = Vec::new();
    if moves.global_conj {
        for l in table.labels() {
            let id = interner.intern(table.get(l)?.twist.clone());
            for sign in [1i8, -1] {
                conj_atoms.push((Atom { sign, curve: CurveExpr::label(l) }, sign, id));
            }
        }
    }
    let mut target_counts = HashMap::new();
    for x in &target {
        *target_counts.entry(*x).or_insert(0) += 1;
    }
    let interner = Mutex::new(interner);
    let mk = || Search {
        interner: &interner,
        target: target.clone(),
        target_counts: target_counts.clone(),
        conj_atoms: conj_atoms.clone(),
        moves,
        nodes: 0,
    };
    let mut nodes = 0u64;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    for bound in 0..=budget {
        let found = if jobs <= 1 || bound == 0 {
            let mut s = mk();
            let mut path = Vec::new();
            let ok = s.dfs(&start, 0, bound, &mut HashMap::new(), &mut path);
            nodes += s.nodes;
            ok.then_some(path)
        } else {
            let first = mk();
            if start == target {
                Some(Vec::new())
            } else if first.h(&start) > bound {
                None
            } else {
                let succ = first.successors(&start);
                let results: Vec<(Option<Vec<Move>>, u64)> = pool.install(|| {
                    succ.par_iter()
                        .map(|(m, t)| {
                            let mut s = mk();
                            let mut path = vec![m.clone()];
                            let ok = s.dfs(t, 1, bound, &mut HashMap::new(), &mut path);
                            (ok.then_some(path), s.nodes)
                        })
                        .collect()
                });
                nodes += results.iter().map(|r| r.1).sum::<u64>();
                results.into_iter().find_map(|r| r.0)
            }
        };
        if let Some(path) = found {
            let mut f = from.clone();
            for m in &path {
                f = apply(&f, m, &Aliases::new(), Centrality::Assume)?;
            }
            return Ok(SearchOutcome::Found { path, result: f });
        }
    }
    Ok(SearchOutcome::NotFound { nodes })
}

/// True when the factors of `a` and `b` are the same twists position by position.
pub fn factorwise_equal(a: &Factorization, b: &Factorization) -> Result<bool, MoveError> {
    if a.k() != b.k() || a.len() != b.len() {
        return Ok(false);
    }
    let mut ea = Evaluator::new(a.table());
    let mut eb = Evaluator::new(b.table());
    for (x, y) in a.factors().iter().zip(b.factors()) {
        if ea.factor(x)? != eb.factor(y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::parse;

    fn f(text: &str) -> Factorization {
        parse(text).unwrap()
    }

    #[test]
    fn slide_examples() {
        let x = f("surface genus 1 holes 8; [al1](be) * si3");
        let y = slide_right(&x, 1).unwrap();
        assert_eq!(y.to_text(), "surface genus 1 holes 8; [[al1](be)](si3) * [al1](be)");
        let x = f("surface genus 1 holes 8; [al1](be) * al2");
        let y = slide_left(&x, 1).unwrap();
        assert_eq!(y.to_text(), "surface genus 1 holes 8; al2 * [~al2 al1](be)");
        assert_eq!(slide_right(&y, 1).unwrap(), x);
    }

    #[test]
    fn slides_preserve_products() {
        let x = f("surface genus 1 holes 3; al1 * be * ~al2 * [al3](be) * de2");
        let p = x.eval_product().unwrap();
        for i in 1..x.len() {
            assert_eq!(slide_right(&x, i).unwrap().eval_product().unwrap(), p);
            assert_eq!(slide_left(&x, i).unwrap().eval_product().unwrap(), p);
            assert_eq!(slide_left(&slide_right(&x, i).unwrap(), i).unwrap(), x);
            assert_eq!(slide_right(&slide_left(&x, i).unwrap(), i).unwrap(), x);
        }
    }

    #[test]
    fn commuting_slide_is_semantically_a_swap() {
        let x = f("surface genus 1 holes 8; al4 * al5");
        let y = slide_right(&x, 1).unwrap();
        assert_eq!(y.to_text(), "surface genus 1 holes 8; [al4](al5) * al4");
        let z = swap_commuting(&x, 1).unwrap();
        assert_eq!(z.to_text(), "surface genus 1 holes 8; al5 * al4");
        assert!(factorwise_equal(&y, &z).unwrap());
    }

    #[test]
    fn swap_rules() {
        let x = f("surface genus 1 holes 2; de1 * be * al1 * be");
        assert!(swap_commuting(&x, 1).is_ok());
        assert_eq!(swap_commuting(&x, 2), Err(MoveError::NotCommuting { pos: 2 }));
        assert!(matches!(swap_commuting(&x, 4), Err(MoveError::Position { .. })));
        assert!(matches!(swap_commuting(&x, 0), Err(MoveError::Position { .. })));
    }

    #[test]
    fn rotation() {
        let b = Factorization::boundary(crate::surface::table(4).unwrap());
        let r = rotate(&b, 1, Centrality::Check).unwrap();
        assert!(r.verify().unwrap());
        assert_eq!(rotate(&b, 4, Centrality::Check).unwrap(), b);
        assert_eq!(rotate(&rotate(&b, -3, Centrality::Check).unwrap(), 3, Centrality::Check).unwrap(), b);
        let x = f("surface genus 1 holes 1; al1 * be");
        assert_eq!(rotate(&x, 1, Centrality::Check), Err(MoveError::NotCentral));
    }

    #[test]
    fn boundary_caps_to_boundary() {
        let b = Factorization::boundary(crate::surface::table(5).unwrap());
        for i in 2..5 {
            let c = cap(&b, i).unwrap();
            assert_eq!(c.k(), 4);
            assert_eq!(c.to_text(), "surface genus 1 holes 4; de1 * de2 * de3 * de4");
            assert!(c.verify().unwrap());
        }
        assert!(cap(&b, 1).is_err());
        assert!(cap(&b, 5).is_err());
    }

    #[test]
    fn script_parsing() {
        let text = "script demo\nstart X\ntarget Y\n# note\nslide_right 3\nrotate -2\nglobal_conj ~[al1](be)\ncheckpoint surface genus 1 holes 1; be\nfold_alias 2 b1\n";
        let s = &parse_scripts(text).unwrap()[0];
        assert_eq!(s.moves().count(), 4);
        assert_eq!(s.checkpoints().count(), 1);
        assert_eq!(s.steps[0], (5, Step::Move(Move::SlideRight(3))));
        assert!(matches!(&s.steps[2].1, Step::Move(Move::GlobalConj(a)) if a.sign == -1));
        assert!(parse_scripts("slide_right 1").is_err());
        assert!(parse_scripts("script a\nstart X\ntarget Y\nslide_up 2").is_err());
        assert!(parse_scripts("script a\nstart X\ntarget Y\nrotate x").is_err());
    }

    #[test]
    fn search_trivial_cases() {
        let x = f("surface genus 1 holes 2; al1 * be * al2");
        match hurwitz_search(&x, &x, 3, MoveSet::STRICT, 1).unwrap() {
            SearchOutcome::Found { path, .. } => assert!(path.is_empty()),
            other => panic!("{:?}", other),
        }
        let y = slide_right(&x, 2).unwrap();
        for jobs in [1, 3] {
            match hurwitz_search(&x, &y, 3, MoveSet::STRICT, jobs).unwrap() {
                SearchOutcome::Found { path, result } => {
                    assert_eq!(path.len(), 1);
                    assert!(factorwise_equal(&result, &y).unwrap());
                }
                other => panic!("{:?}", other),
            }
        }
        let z = f("surface genus 1 holes 2; de1 * de1 * de1");
        assert!(matches!(hurwitz_search(&x, &z, 2, MoveSet::STRICT, 1).unwrap(), SearchOutcome::NotFound { .. }));
    }
}
