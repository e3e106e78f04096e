use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use twistkit::catalog::{self, NAMES};
use twistkit::factorization::{Atom, CurveExpr, Factorization};
use twistkit::freegroup::{MarkedClass, Word};
use twistkit::invariants::{closed_torus_matrices, filling_h1, report, sl2_shadow, snf_with, IntMatrix, PivotRule};
use twistkit::moves::{apply, cap, factorwise_equal, hurwitz_search, Centrality, Move, MoveSet, SearchOutcome};
use twistkit::surface::{table, validate_base_relations, Label};

type Outcome = Result<String, String>;

fn rel(name: &str) -> Result<&'static Factorization, String> {
    catalog::get(name).map(|r| &r.factors).map_err(|e| e.to_string())
}

fn timed(limit: Duration, t0: Instant, msg: String) -> Outcome {
    let dt = t0.elapsed();
    if dt > limit {
        Err(format!("{} but took {:.2?} (limit {:?})", msg, dt, limit))
    } else {
        Ok(format!("{} in {:.2?}", msg, dt))
    }
}

fn homology_level() -> Outcome {
    let t0 = Instant::now();
    for name in NAMES {
        let f = rel(name)?;
        let h = f.homology_shadow().map_err(|e| e.to_string())?;
        let s = sl2_shadow(f).map_err(|e| e.to_string())?;
        if !h.is_identity() || !s.is_identity() {
            return Err(format!("{}: shadow is not the identity", name));
        }
    }
    timed(Duration::from_secs(1), t0, "six shadows are the identity".into())
}

fn full_level() -> Outcome {
    let t0 = Instant::now();
    for name in NAMES {
        if !rel(name)?.verify().map_err(|e| e.to_string())? {
            return Err(format!("{} does not evaluate to the boundary multi-twist", name));
        }
    }
    timed(Duration::from_secs(10), t0, "six relations verified exactly".into())
}

fn replays() -> Outcome {
    let t0 = Instant::now();
    for (name, target) in [("D_A8", "A8"), ("D_B8", "B8"), ("D_A9", "A9")] {
        let s = catalog::script(name).map_err(|e| e.to_string())?;
        if s.target != target {
            return Err(format!("{} targets {}", name, s.target));
        }
        let rep = catalog::replay_script(s).map_err(|e| e.to_string())?;
        if !rep.certified {
            let bad = rep.steps.iter().find(|s| !s.ok);
            return Err(format!("{} not certified: {:?}", name, bad));
        }
    }
    timed(Duration::from_secs(1), t0, "three chains certified".into())
}

fn filling() -> Outcome {
    let a = filling_h1(rel("A8")?).map_err(|e| e.to_string())?;
    let b = filling_h1(rel("B8")?).map_err(|e| e.to_string())?;
    let ra = report(rel("A8")?, None).map_err(|e| e.to_string())?;
    let rb = report(rel("B8")?, None).map_err(|e| e.to_string())?;
    if a.to_string() != "0" || b.to_string() != "Z/2" || ra == rb {
        return Err(format!("H1(A8) = {}, H1(B8) = {}", a, b));
    }
    Ok(format!("H1(A8) = {}, H1(B8) = {}; reports differ", a, b))
}

fn size(e: &CurveExpr) -> usize {
    1 + e.conj.iter().map(|a| size(&a.curve)).sum::<usize>()
}

/// 1000 random moves; the walk restarts from `f` whenever the expressions grow too large.
fn random_walk(f: &Factorization, rng: &mut StdRng) -> Result<(), String> {
    let want = report(f, None).map_err(|e| e.to_string())?;
    let labels: Vec<Label> = f.table().labels().collect();
    let mut cur = f.clone();
    for step in 0..1000 {
        let n = cur.len();
        let m = match rng.gen_range(0..4) {
            0 => Move::SlideRight(rng.gen_range(1..n)),
            1 => Move::SlideLeft(rng.gen_range(1..n)),
            2 => Move::Rotate(rng.gen_range(-(n as i64) + 1..n as i64)),
            _ => Move::GlobalConj(Atom {
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
                curve: CurveExpr::label(labels[rng.gen_range(0..labels.len())]),
            }),
        };
        cur = apply(&cur, &m, &Default::default(), Centrality::Assume).map_err(|e| e.to_string())?;
        let got = report(&cur, None).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("report changed at step {} after {}", step, m));
        }
        if cur.factors().iter().map(|x| size(&x.curve)).sum::<usize>() > 400 {
            cur = f.clone();
        }
    }
    Ok(())
}

fn hurwitz() -> Outcome {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(2024);
    for name in ["A8", "B8"] {
        random_walk(rel(name)?, &mut rng).map_err(|e| format!("{}: {}", name, e))?;
    }
    let mut found = Vec::new();
    for (script, from, to) in [("D_A8", "KO8", "A8"), ("D_B8", "T8", "B8")] {
        let budget = catalog::script(script).map_err(|e| e.to_string())?.moves().count() + 2;
        let moves = MoveSet { rotate: true, global_conj: false };
        let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
        match hurwitz_search(rel(from)?, rel(to)?, budget, moves, jobs).map_err(|e| e.to_string())? {
            SearchOutcome::Found { path, result } => {
                if !factorwise_equal(&result, rel(to)?).map_err(|e| e.to_string())? {
                    return Err(format!("{} -> {}: replayed path does not reach the target", from, to));
                }
                found.push(format!("{}->{} in {} moves", from, to, path.len()));
            }
            SearchOutcome::NotFound { nodes } => {
                return Err(format!("{} -> {} not found within {} moves ({} nodes)", from, to, budget, nodes));
            }
        }
    }
    timed(Duration::from_secs(30), t0, format!("reports stable over 2x1000 random moves; {}", found.join(", ")))
}

fn capping() -> Outcome {
    let a9 = rel("A9")?;
    for i in 2..=8 {
        let c = cap(a9, i).map_err(|e| e.to_string())?;
        if c.k() != 8 || !c.verify().map_err(|e| e.to_string())? {
            return Err(format!("A9 capped at hole {} does not verify", i));
        }
    }
    let classes = a9.classes().map_err(|e| e.to_string())?;
    let holes: Vec<usize> = (1..=9).rev().collect();
    let ms = closed_torus_matrices(&classes, &a9.signs(), &holes);
    let prod = ms.iter().fold(IntMatrix::identity(2), |acc, m| acc.mul(m));
    if ms.len() != 12 || !prod.is_identity() {
        return Err("closed torus product is not the identity".into());
    }
    Ok("A9 caps at holes 2..8 verify; closed torus product of 12 transvections is I".into())
}

fn naive_reduce(mut w: Vec<(usize, i8)>) -> Vec<(usize, i8)> {
    loop {
        let Some(i) = w.windows(2).position(|p| p[0].0 == p[1].0 && p[0].1 == -p[1].1) else {
            return w;
        };
        w.drain(i..i + 2);
    }
}

fn random_class(rng: &mut StdRng, k: usize) -> MarkedClass {
    let t = table(k).unwrap();
    let labels: Vec<Label> = t.labels().collect();
    let mut acc = MarkedClass::identity(k);
    for _ in 0..rng.gen_range(0..4) {
        let c = t.get(labels[rng.gen_range(0..labels.len())]).unwrap();
        let m = c.signed_twist(if rng.gen_bool(0.5) { 1 } else { -1 });
        acc = MarkedClass::compose(&acc, m).unwrap();
    }
    acc
}

fn engine() -> Outcome {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let rank = rng.gen_range(1..5);
        let letters: Vec<(usize, i8)> =
            (0..rng.gen_range(0..40)).map(|_| (rng.gen_range(0..rank), if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let w = Word::reduce(&letters, rank).map_err(|e| e.to_string())?;
        let got: Vec<(usize, i8)> = w.letters().map(|l| (l.gen, l.sign)).collect();
        if got != naive_reduce(letters) {
            return Err("free reduction disagrees with the naive oracle".into());
        }
    }
    for _ in 0..100 {
        let k = rng.gen_range(1..5);
        let (a, b, c) = (random_class(&mut rng, k), random_class(&mut rng, k), random_class(&mut rng, k));
        let ab_c = MarkedClass::compose(&MarkedClass::compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = MarkedClass::compose(&a, &MarkedClass::compose(&b, &c).unwrap()).unwrap();
        let inv = MarkedClass::compose(&a, &a.inverse()).unwrap();
        let id = MarkedClass::compose(&MarkedClass::identity(k), &a).unwrap();
        if ab_c != a_bc || !inv.is_identity() || id != a {
            return Err("MarkedClass group laws fail".into());
        }
    }
    for _ in 0..1000 {
        let rows: Vec<Vec<i64>> = (0..6).map(|_| (0..6).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = IntMatrix::from_rows(&rows);
        let s1 = snf_with(&m, PivotRule::SmallestRowMajor);
        let s2 = snf_with(&m, PivotRule::FirstColumnMajor);
        for s in [&s1, &s2] {
            if s.u.mul(&m).mul(&s.v) != s.diag || !s.diag.is_diagonal() || !s.divisibility_chain() {
                return Err("SNF reconstruction failed".into());
            }
        }
        if s1.invariant_factors != s2.invariant_factors {
            return Err("SNF pivot orders disagree".into());
        }
    }
    for k in 1..=9 {
        let t = table(k).map_err(|e| e.to_string())?;
        let r = validate_base_relations(&t);
        if let Some(c) = r.checks.iter().find(|c| !c.passed) {
            return Err(format!("k={}: {}", k, c.name));
        }
    }
    timed(Duration::from_secs(60), t0, "reduction oracle, group laws, 1000 SNFs, tables k=1..9".into())
}

fn euler() -> Outcome {
    let a8 = report(rel("A8")?, None).map_err(|e| e.to_string())?.euler;
    let a9 = report(rel("A9")?, None).map_err(|e| e.to_string())?.euler;
    if a8 != 4 || a9 != 3 {
        return Err(format!("chi(A8) = {}, chi(A9) = {}", a8, a9));
    }
    Ok(format!("chi(A8) = {}, chi(A9) = {}", a8, a9))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("homology-level verification", homology_level),
        ("full verification", full_level),
        ("derivation replay", replays),
        ("filling invariants", filling),
        ("Hurwitz invariance and search", hurwitz),
        ("capping", capping),
        ("engine property suites", engine),
        ("Euler characteristics", euler),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {} PASS  {}: {}", i + 1, name, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {}: {}", i + 1, name, msg);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
