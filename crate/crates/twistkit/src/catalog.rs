//! The shipped relations and derivation scripts.

use std::sync::OnceLock;

use thiserror::Error;

use crate::factorization::{parse_curve, parse_with, Aliases, Factorization, FactorizationError};
use crate::moves::{parse_scripts, replay, DerivationScript, ReplayReport, ScriptError};

const RELATIONS: &str = include_str!("../catalog/relations.txt");
const SCRIPTS: &str = include_str!("../catalog/scripts.txt");

pub const NAMES: [&str; 6] = ["KO8", "T8", "KO9", "A8", "B8", "A9"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown relation '{0}'")]
    UnknownRelation(String),
    #[error("unknown script '{0}'")]
    UnknownScript(String),
    #[error("relations line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("relations line {line}: {source}")]
    Factorization { line: usize, source: FactorizationError },
    #[error(transparent)]
    Script(#[from] ScriptError),
}

#[derive(Clone, Debug)]
pub struct RelationRecord {
    pub name: String,
    pub k: usize,
    pub source: String,
    pub aliases: Aliases,
    /// Alias names in definition order.
    pub alias_order: Vec<String>,
    pub factors: Factorization,
    /// The relation line as written, with aliases.
    pub text: String,
}

/// Parse relation records.
pub fn parse_relations(text: &str) -> Result<Vec<RelationRecord>, CatalogError> {
    struct Partial {
        name: String,
        source: String,
        aliases: Aliases,
        order: Vec<String>,
    }
    let mut out = Vec::new();
    let mut cur: Option<Partial> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        if kw == "relation" {
            if cur.is_some() {
                return Err(CatalogError::Format { line, msg: "previous relation has no factorization".into() });
            }
            cur = Some(Partial { name: rest.into(), source: String::new(), aliases: Aliases::new(), order: Vec::new() });
            continue;
        }
        let Some(p) = cur.as_mut() else {
            return Err(CatalogError::Format { line, msg: "expected 'relation NAME'".into() });
        };
        match kw {
            "source" => p.source = rest.into(),
            "alias" => {
                let (name, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| CatalogError::Format { line, msg: "expected 'alias NAME = curve'".into() })?;
                let e = parse_curve(expr, Some(&p.aliases)).map_err(|source| CatalogError::Factorization { line, source })?;
                p.order.push(name.trim().into());
                p.aliases.insert(name.trim().into(), e);
            }
            "surface" => {
                let p = cur.take().unwrap();
                let factors = parse_with(body, Some(&p.aliases)).map_err(|source| CatalogError::Factorization { line, source })?;
                out.push(RelationRecord {
                    name: p.name,
                    k: factors.k(),
                    source: p.source,
                    aliases: p.aliases,
                    alias_order: p.order,
                    factors,
                    text: body.into(),
                });
            }
            _ => return Err(CatalogError::Format { line, msg: format!("unknown directive '{}'", kw) }),
        }
    }
    if cur.is_some() {
        return Err(CatalogError::Format { line: text.lines().count(), msg: "relation has no factorization".into() });
    }
    Ok(out)
}

fn relations() -> &'static Result<Vec<RelationRecord>, CatalogError> {
    static R: OnceLock<Result<Vec<RelationRecord>, CatalogError>> = OnceLock::new();
    R.get_or_init(|| parse_relations(RELATIONS))
}

pub fn all() -> Result<&'static [RelationRecord], CatalogError> {
    relations().as_ref().map(|v| v.as_slice()).map_err(|e| e.clone())
}

pub fn get(name: &str) -> Result<&'static RelationRecord, CatalogError> {
    all()?.iter().find(|r| r.name == name).ok_or_else(|| CatalogError::UnknownRelation(name.into()))
}

pub fn scripts() -> Result<&'static [DerivationScript], CatalogError> {
    static S: OnceLock<Result<Vec<DerivationScript>, ScriptError>> = OnceLock::new();
    S.get_or_init(|| parse_scripts(SCRIPTS)).as_ref().map(|v| v.as_slice()).map_err(|e| e.clone().into())
}

pub fn script(name: &str) -> Result<&'static DerivationScript, CatalogError> {
    scripts()?.iter().find(|s| s.name == name).ok_or_else(|| CatalogError::UnknownScript(name.into()))
}

/// Aliases of the start and target relations together.
pub fn script_aliases(s: &DerivationScript) -> Result<Aliases, CatalogError> {
    let mut a = get(&s.start)?.aliases.clone();
    a.extend(get(&s.target)?.aliases.clone());
    Ok(a)
}

/// Replay a script against the catalog records it names.
pub fn replay_script(s: &DerivationScript) -> Result<ReplayReport, CatalogError> {
    let aliases = script_aliases(s)?;
    Ok(replay(s, &get(&s.start)?.factors, &get(&s.target)?.factors, &aliases))
}
