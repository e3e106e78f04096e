use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twistkit::catalog::{self, parse_relations};
use twistkit::factorization::{parse, Factorization};
use twistkit::invariants::{cap_class, report, signed_transvection, sl2_shadow, IntMatrix};
use twistkit::moves::{self, hurwitz_search, parse_scripts, MoveSet, SearchOutcome};
use twistkit::surface::{table, validate_base_relations, MAX_HOLES};

#[derive(Parser)]
#[command(name = "twistkit", version, about = "Verify and manipulate Dehn twist factorizations of holed tori")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// A catalog relation: KO8, T8, KO9, A8, B8 or A9.
    #[arg(long)]
    relation: Option<String>,
    /// A factorization file (plain text or relation records).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Level {
    Homology,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Moves {
    Strict,
    Broad,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a factorization equals the boundary multi-twist.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "full")]
        level: Level,
    },
    /// Replay a derivation script.
    Replay {
        /// A catalog script: D_A8, D_B8 or D_A9.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        script: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Euler characteristic and first homology of the associated fibration.
    Invariants {
        #[command(flatten)]
        input: Input,
    },
    /// Cap off one boundary component and verify the result.
    Cap {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        hole: usize,
        #[arg(long, value_enum, default_value = "full")]
        level: Level,
    },
    /// Search for a sequence of Hurwitz moves between two factorizations.
    Search {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        budget: usize,
        #[arg(long, value_enum, default_value = "strict")]
        moves: Moves,
        /// Allow cyclic rotation on top of the strict move set.
        #[arg(long)]
        rotate: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print a factorization file in normal form.
    Fmt {
        file: PathBuf,
    },
    /// Run the base relation checks on the twist tables.
    ValidateTables {
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Exit status 1: the check ran and came out false.
struct Negative(String);

enum Failure {
    Negative(Negative),
    Error(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Error(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {}", path.display(), e)))
}

fn load_text(text: &str) -> Result<Factorization, Failure> {
    let is_record = text.lines().any(|l| l.trim_start().starts_with("relation"));
    if is_record {
        let recs = parse_relations(text)?;
        let first = recs.into_iter().next().ok_or_else(|| Failure::Error("no relation in file".into()))?;
        Ok(first.factors)
    } else {
        Ok(parse(text)?)
    }
}

fn load(input: &Input) -> Result<(String, Factorization), Failure> {
    match (&input.relation, &input.file) {
        (Some(name), _) => Ok((name.clone(), catalog::get(name)?.factors.clone())),
        (None, Some(path)) => Ok((path.display().to_string(), load_text(&read(path)?)?)),
        (None, None) => Err(Failure::Error("no input given".into())),
    }
}

/// Load a catalog name or a file path.
fn load_any(s: &str) -> Result<Factorization, Failure> {
    match catalog::get(s) {
        Ok(r) => Ok(r.factors.clone()),
        Err(_) => load_text(&read(&PathBuf::from(s))?),
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: String) {
    if json {
        println!("{}", serde_json::to_string(value).expect("report serializes"));
    } else {
        println!("{}", text);
    }
}

fn shadow_ok(f: &Factorization) -> Result<bool, Failure> {
    Ok(f.homology_shadow()?.is_identity() && sl2_shadow(f)?.is_identity())
}

#[derive(Serialize)]
struct VerifyReport {
    input: String,
    k: usize,
    factors: usize,
    level: Level,
    verified: bool,
}

fn verify(json: bool, input: &Input, level: Level) -> Result<(), Failure> {
    let (name, f) = load(input)?;
    let verified = match level {
        Level::Homology => shadow_ok(&f)?,
        Level::Full => f.verify()?,
    };
    let rep = VerifyReport { input: name.clone(), k: f.k(), factors: f.len(), level, verified };
    let lvl = match level {
        Level::Homology => "homology",
        Level::Full => "full",
    };
    emit(json, &rep, format!("{}: k={} n={} level={} verified={}", name, f.k(), f.len(), lvl, verified));
    if verified {
        Ok(())
    } else {
        Err(Failure::Negative(Negative(format!("{} is not a relation", name))))
    }
}

fn replay(json: bool, script: &Option<String>, file: &Option<PathBuf>) -> Result<(), Failure> {
    let scripts = match (script, file) {
        (Some(name), _) => vec![catalog::script(name)?.clone()],
        (None, Some(path)) => parse_scripts(&read(path)?)?,
        (None, None) => return Err(Failure::Error("no script given".into())),
    };
    let mut reports = Vec::new();
    for s in &scripts {
        reports.push(catalog::replay_script(s)?);
    }
    let mut text = Vec::new();
    for r in &reports {
        for s in &r.steps {
            let mark = if s.ok { "ok" } else { "FAIL" };
            let detail = s.detail.as_deref().map(|d| format!("  ({})", d)).unwrap_or_default();
            text.push(format!("{} line {:>3}  {:<5} {}{}", r.script, s.line, mark, s.step, detail));
        }
        text.push(format!(
            "{}: {} moves, {} checkpoints, matches target: {}, certified: {}",
            r.script, r.moves, r.checkpoints, r.matches_target, r.certified
        ));
    }
    emit(json, &reports, text.join("\n"));
    match reports.iter().find(|r| !r.certified) {
        Some(r) => Err(Failure::Negative(Negative(format!("{} is not certified", r.script)))),
        None => Ok(()),
    }
}

fn invariants(json: bool, input: &Input) -> Result<(), Failure> {
    let (name, f) = load(input)?;
    let rep = report(&f, None)?;
    let h1 = twistkit::invariants::filling_h1(&f)?;
    emit(
        json,
        &rep,
        format!("{}: k={} n={} euler={} H1={} shadow_ok={}", name, rep.k, rep.n, rep.euler, h1, rep.shadow_ok),
    );
    Ok(())
}

#[derive(Serialize)]
struct CapReport {
    input: String,
    hole: usize,
    k: usize,
    level: Level,
    verified: bool,
    factorization: Option<String>,
}

fn cap(json: bool, input: &Input, hole: usize, level: Level) -> Result<(), Failure> {
    let (name, f) = load(input)?;
    let (verified, text) = match level {
        Level::Full => {
            let c = moves::cap(&f, hole)?;
            (c.verify()?, Some(c.to_text()))
        }
        Level::Homology => {
            if hole == 0 || hole > f.k() {
                return Err(Failure::Error(format!("hole {} out of range 1..={}", hole, f.k())));
            }
            let n = f.k();
            let mut m = IntMatrix::identity(n);
            for (c, s) in f.classes()?.iter().zip(f.signs()) {
                m = m.mul(&signed_transvection(&cap_class(c, hole), s));
            }
            (m.is_identity(), None)
        }
    };
    let k = f.k() - 1;
    let rep = CapReport { input: name.clone(), hole, k, level, verified, factorization: text.clone() };
    let mut out = format!("{} capped at hole {}: k={} verified={}", name, hole, k, verified);
    if let Some(t) = text {
        out = format!("{}\n{}", out, t);
    }
    emit(json, &rep, out);
    if verified {
        Ok(())
    } else {
        Err(Failure::Negative(Negative("capped factorization does not verify".into())))
    }
}

#[derive(Serialize)]
struct SearchReport {
    from: String,
    to: String,
    budget: usize,
    found: bool,
    path: Vec<String>,
}

fn search(json: bool, from: &str, to: &str, budget: usize, moves: Moves, rotate: bool, jobs: usize) -> Result<(), Failure> {
    let (f, g) = (load_any(from)?, load_any(to)?);
    let mut set = match moves {
        Moves::Strict => MoveSet::STRICT,
        Moves::Broad => MoveSet::BROAD,
    };
    set.rotate |= rotate;
    let out = hurwitz_search(&f, &g, budget, set, jobs)?;
    let path: Vec<String> = match &out {
        SearchOutcome::Found { path, .. } => path.iter().map(|m| m.to_string()).collect(),
        SearchOutcome::NotFound { .. } => Vec::new(),
    };
    let found = matches!(out, SearchOutcome::Found { .. });
    let rep = SearchReport { from: from.into(), to: to.into(), budget, found, path: path.clone() };
    let text = if found {
        format!("found {} -> {} in {} moves\n{}", from, to, path.len(), path.join("\n"))
    } else {
        format!("no path from {} to {} within {} moves", from, to, budget)
    };
    emit(json, &rep, text);
    if found {
        Ok(())
    } else {
        Err(Failure::Negative(Negative("not found".into())))
    }
}

fn fmt(path: &PathBuf) -> Result<(), Failure> {
    println!("{}", load_text(&read(path)?)?.to_text());
    Ok(())
}

#[derive(Serialize)]
struct TableReport {
    k: usize,
    checks: usize,
    failed: Vec<String>,
}

fn validate(json: bool, k: Option<usize>) -> Result<(), Failure> {
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (1..=MAX_HOLES).collect(),
    };
    let mut reports = Vec::new();
    for k in ks {
        let r = validate_base_relations(&*table(k)?);
        let failed = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        reports.push(TableReport { k, checks: r.checks.len(), failed });
    }
    let text = reports
        .iter()
        .map(|r| format!("k={}: {} checks, {} failed {}", r.k, r.checks, r.failed.len(), r.failed.join(", ")).trim_end().to_string())
        .collect::<Vec<_>>()
        .join("\n");
    emit(json, &reports, text);
    if reports.iter().all(|r| r.failed.is_empty()) {
        Ok(())
    } else {
        Err(Failure::Negative(Negative("table validation failed".into())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let res = match &cli.cmd {
        Cmd::Verify { input, level } => verify(json, input, *level),
        Cmd::Replay { script, file } => replay(json, script, file),
        Cmd::Invariants { input } => invariants(json, input),
        Cmd::Cap { input, hole, level } => cap(json, input, *hole, *level),
        Cmd::Search { from, to, budget, moves, rotate, jobs } => search(json, from, to, *budget, *moves, *rotate, *jobs),
        Cmd::Fmt { file } => fmt(file),
        Cmd::ValidateTables { k } => validate(json, *k),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(Negative(msg))) => {
            eprintln!("{}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
