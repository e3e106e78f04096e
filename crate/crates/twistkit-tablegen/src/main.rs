//! Builds the twist tables shipped with twistkit from the polyline model.

mod geometry;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twistkit::freegroup::{CertifiedAut, MarkedClass, Word};
use twistkit::invariants::{cokernel, transvect, IntMatrix};
use twistkit::surface::{build_model, tables_to_text, validate_base_relations, BaseCurve, Label, TwistTable};

use geometry::{Code, Curve, Degenerate, Surf};

#[derive(Parser)]
#[command(version, about = "Generate or re-derive the shipped twist tables")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the tables for k = 1..9.
    Generate {
        #[arg(long, default_value = "crates/twistkit/data/tables.txt")]
        out: PathBuf,
    },
    /// Search the horizontal-curve family for the σ configurations.
    Search {
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
}

/// Twists of the geometric base curves in the internal basis (X, H_1..H_k), classes in x, y, z_i.
struct Raw {
    k: usize,
    be: MarkedClass,
    al: Vec<MarkedClass>,
    de: Vec<MarkedClass>,
    e: Vec<MarkedClass>,
    be_class: Vec<i64>,
    al_class: Vec<Vec<i64>>,
    de_class: Vec<Vec<i64>>,
    e_class: Vec<Vec<i64>>,
}

fn word(codes: &[Code], rank: usize) -> Word {
    let letters: Vec<(usize, i8)> = codes.iter().map(|&c| (c.unsigned_abs() as usize - 1, c.signum() as i8)).collect();
    Word::reduce(&letters, rank).expect("letters in range")
}

fn marked(surf: &Surf, c: &Curve) -> Result<MarkedClass, Degenerate> {
    let rank = surf.m.k + 1;
    let (fwd, arcs) = surf.twist(c, 1)?;
    let (bwd, _) = surf.twist(c, -1)?;
    let w = |ws: Vec<Vec<Code>>| ws.iter().map(|x| word(x, rank)).collect::<Vec<_>>();
    let theta = CertifiedAut::new(w(fwd), w(bwd)).map_err(|e| Degenerate(e.to_string()))?;
    MarkedClass::new(surf.m.k, theta, w(arcs)).map_err(|e| Degenerate(e.to_string()))
}

/// The change from the internal basis to x, y, z_i and its inverse, as generator images.
struct Basis {
    phi: Vec<Word>,
    phi_inv: Vec<Word>,
}

impl Basis {
    fn new(k: usize) -> Basis {
        let rank = k + 1;
        let p = |s: &str| Word::parse(s, rank).expect("basis word");
        let h = |j: usize| format!("z{}", j);
        let mut phi = vec![p("x"), p("Y")];
        for j in 2..k {
            let zs: Vec<String> = (2..=j).map(h).collect();
            phi.push(p(&format!("Y {}", zs.join(" "))));
        }
        if k >= 2 {
            phi.push(p("x Y Z1 X"));
        }
        // internal words are written with x for X and y, z_{j-1} for H_j
        let i = |s: &str| Word::parse(s, rank).expect("inverse word");
        let hn = |j: usize| if j == 1 { "y".to_string() } else { format!("z{}", j - 1) };
        let hi = |j: usize| hn(j).to_uppercase();
        let mut phi_inv = vec![i("x"), i("Y")];
        if k >= 2 {
            phi_inv.push(i(&format!("X {} x {}", hi(k), hn(1))));
        }
        for j in 2..k {
            phi_inv.push(i(&format!("{} {}", hi(j - 1), hn(j))));
        }
        Basis { phi, phi_inv }
    }

    fn word(&self, w: &Word) -> Word {
        w.substitute(&self.phi).expect("rank")
    }

    fn class(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (g, c) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.phi[g].abelianize()) {
                *o += c * a;
            }
        }
        out
    }

    fn convert(&self, m: &MarkedClass) -> MarkedClass {
        let th = m.theta();
        let fwd = self.phi_inv.iter().map(|s| self.word(&th.apply(s).expect("rank"))).collect();
        let bwd = self.phi_inv.iter().map(|s| self.word(&th.apply_inverse(s).expect("rank"))).collect();
        let theta = CertifiedAut::new(fwd, bwd).expect("basis change preserves the certificate");
        let arcs = m.arcs().iter().map(|u| self.word(u)).collect();
        MarkedClass::new(m.k(), theta, arcs).expect("arc count")
    }
}

fn loop_class(c: &Curve, rank: usize) -> Vec<i64> {
    word(&c.loop_word(), rank).abelianize()
}

fn raw(k: usize) -> Result<Raw, Degenerate> {
    let mut s = Surf::new(k)?;
    let rank = k + 1;
    let b = s.beta()?;
    let mut al_curves = vec![s.vertical(k)?];
    for i in 1..k {
        al_curves.push(s.vertical(i)?);
    }
    al_curves.rotate_left(1);
    let de_curves = (1..=k).map(|j| s.delta(j)).collect::<Result<Vec<_>, _>>()?;
    let e_curves = (1..=k)
        .map(|j| {
            let above: Vec<usize> = (1..=k).filter(|&i| i != j).collect();
            s.horizontal(&above)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let basis = Basis::new(k);
    let twists = |cs: &[Curve]| cs.iter().map(|c| marked(&s, c)).collect::<Result<Vec<_>, _>>();
    let classes = |cs: &[Curve]| cs.iter().map(|c| basis.class(&loop_class(c, rank))).collect::<Vec<_>>();
    Ok(Raw {
        k,
        be: marked(&s, &b)?,
        al: twists(&al_curves)?,
        de: twists(&de_curves)?,
        e: twists(&e_curves)?,
        be_class: basis.class(&loop_class(&b, rank)),
        al_class: classes(&al_curves),
        de_class: classes(&de_curves),
        e_class: classes(&e_curves),
    })
}

/// σ_label = t_{β_i}⁻¹(e_j), written (label, i, j).
fn sigma_config(k: usize) -> &'static [(u32, usize, usize)] {
    match k {
        8 => &[(3, 1, 4), (6, 1, 3), (4, 6, 1), (7, 6, 8), (5, 4, 6), (2, 2, 5), (1, 2, 4)],
        9 => &[(4, 1, 4), (7, 1, 3), (5, 7, 1), (8, 7, 9), (3, 4, 7), (6, 4, 6)],
        _ => &[],
    }
}

fn normalize(mut c: Vec<i64>) -> Vec<i64> {
    if c.iter().find(|v| **v != 0).is_some_and(|v| *v < 0) {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    c
}

fn prod(k: usize, ms: &[&MarkedClass]) -> MarkedClass {
    MarkedClass::product(k, ms.iter().copied()).expect("same k")
}

/// T_{β_i} and the class of β_i.
fn beta_i(r: &Raw, i: usize) -> (MarkedClass, Vec<i64>) {
    let a = &r.al[i - 1];
    let t = prod(r.k, &[a, &r.be, &a.inverse()]);
    (t, transvect(&r.al_class[i - 1], 1, &r.be_class))
}

fn table_for(k: usize) -> Result<TwistTable, String> {
    let r = raw(k).map_err(|d| format!("k={}: degenerate geometry: {}", k, d.0))?;
    let basis = Basis::new(k);
    let model = build_model(k).map_err(|e| e.to_string())?;
    let mut items: Vec<(Label, MarkedClass, Vec<i64>)> = Vec::new();
    items.push((Label::Be, r.be.clone(), r.be_class.clone()));
    for i in 0..k {
        items.push((Label::Al(i as u32 + 1), r.al[i].clone(), r.al_class[i].clone()));
    }
    for &(label, i, j) in sigma_config(k) {
        let (tb, cb) = beta_i(&r, i);
        let t = prod(k, &[&tb.inverse(), &r.e[j - 1], &tb]);
        items.push((Label::Si(label), t, transvect(&cb, -1, &r.e_class[j - 1])));
    }
    let mut curves = BTreeMap::new();
    for (label, m, c) in items {
        let c = normalize(c);
        curves.insert(label, BaseCurve::new(label, basis.convert(&m), c));
    }
    for j in 0..k {
        let label = Label::De(j as u32 + 1);
        let mut c = r.de_class[j].clone();
        let b = model.boundary_words[j].abelianize();
        if c.iter().zip(&b).all(|(u, v)| *u == -v) {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        curves.insert(label, BaseCurve::new(label, basis.convert(&r.de[j]), c));
    }
    let labels: Vec<Label> = curves.keys().copied().collect();
    for (n, &a) in labels.iter().enumerate() {
        for &b in &labels[n + 1..] {
            let (ta, tb) = (&curves[&a].twist, &curves[&b].twist);
            if ta.commutes_with(tb).map_err(|e| e.to_string())? {
                curves.get_mut(&a).unwrap().disjoint_with.insert(b);
                curves.get_mut(&b).unwrap().disjoint_with.insert(a);
            } else if prod(k, &[ta, tb, ta]) == prod(k, &[tb, ta, tb]) {
                curves.get_mut(&a).unwrap().intersects_once.insert(b);
                curves.get_mut(&b).unwrap().intersects_once.insert(a);
            }
        }
    }
    let table = TwistTable { model, curves };
    let report = validate_base_relations(&table);
    for c in report.checks.iter().filter(|c| !c.passed) {
        return Err(format!("k={}: check failed: {}", k, c.name));
    }
    Ok(table)
}

fn generate(out: &PathBuf) -> Result<(), String> {
    let mut tables = Vec::new();
    for k in 1..=9 {
        let t = table_for(k)?;
        eprintln!("k={}: {} curves", k, t.curves.len());
        tables.push(t);
    }
    let refs: Vec<&TwistTable> = tables.iter().collect();
    std::fs::write(out, tables_to_text(&refs)).map_err(|e| e.to_string())
}

/// One factor of a search pattern.
enum Slot {
    Al(usize),
    /// β conjugated by signed α twists, outermost first
    Beta(&'static [(i8, usize)]),
    /// one of the horizontal curves e_j, j free
    Free(usize),
}

struct Searcher<'a> {
    r: &'a Raw,
    target: MarkedClass,
}

impl Searcher<'_> {
    fn factor(&self, s: &Slot, choice: &[usize]) -> (MarkedClass, Vec<i64>) {
        let r = self.r;
        match *s {
            Slot::Al(i) => (r.al[i - 1].clone(), r.al_class[i - 1].clone()),
            Slot::Beta(conj) => {
                let (mut t, mut c) = (r.be.clone(), r.be_class.clone());
                for &(sign, a) in conj.iter().rev() {
                    let w = if sign < 0 { r.al[a - 1].inverse() } else { r.al[a - 1].clone() };
                    t = prod(r.k, &[&w, &t, &w.inverse()]);
                    c = transvect(&r.al_class[a - 1], sign, &c);
                }
                (t, c)
            }
            Slot::Free(n) => (r.e[choice[n] - 1].clone(), r.e_class[choice[n] - 1].clone()),
        }
    }

    fn shadow_ok(&self, classes: &[Vec<i64>]) -> bool {
        let n = self.r.k + 1;
        let mut basis: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        for c in classes.iter().rev() {
            basis = basis.iter().map(|v| transvect(c, 1, v)).collect();
        }
        basis.iter().enumerate().all(|(i, v)| v.iter().enumerate().all(|(j, x)| *x == (i == j) as i64))
    }

    /// All free-slot assignments whose product is the boundary multi-twist.
    fn run(&self, pattern: &[Slot], fixed: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let free = pattern.iter().filter(|s| matches!(s, Slot::Free(_))).count();
        let k = self.r.k;
        let mut out = Vec::new();
        let mut choice = vec![1; free];
        loop {
            if fixed.iter().all(|&(n, v)| choice[n] == v) {
                let fs: Vec<_> = pattern.iter().map(|s| self.factor(s, &choice)).collect();
                let classes: Vec<Vec<i64>> = fs.iter().map(|f| f.1.clone()).collect();
                if self.shadow_ok(&classes) {
                    let ms: Vec<&MarkedClass> = fs.iter().map(|f| &f.0).collect();
                    if prod(k, &ms) == self.target {
                        out.push(choice.clone());
                    }
                }
            }
            let mut n = 0;
            while n < free && choice[n] == k {
                choice[n] = 1;
                n += 1;
            }
            if n == free {
                return out;
            }
            choice[n] += 1;
        }
    }

    fn h1(&self, pattern: &[Slot], choice: &[usize]) -> String {
        let cols: Vec<Vec<i64>> = pattern.iter().map(|s| self.factor(s, choice).1).collect();
        cokernel(&IntMatrix::from_columns(self.r.k + 1, &cols)).to_string()
    }
}

fn search(k: usize) -> Result<(), String> {
    use Slot::*;
    let r = raw(k).map_err(|d| d.0)?;
    let target = prod(k, &r.de.iter().collect::<Vec<_>>());
    let s = Searcher { r: &r, target };
    let show = |name: &str, pat: &[Slot], sols: &[Vec<usize>]| {
        println!("{}: {} solution(s)", name, sols.len());
        for c in sols {
            let es: Vec<String> = c.iter().map(|j| format!("e{}", j)).collect();
            println!("  {}  H1 = {}", es.join(" "), s.h1(pat, c));
        }
    };
    match k {
        8 => {
            let a8 = [Al(5), Beta(&[(-1, 5), (1, 4)]), Al(4), Free(0), Free(1), Al(2), Beta(&[(-1, 2), (1, 1)]), Free(2), Free(3), Al(7), Beta(&[(-1, 7), (1, 6)]), Free(4)];
            let sols = s.run(&a8, &[]);
            show("A8", &a8, &sols);
            for a in &sols {
                let b8 = [Al(5), Free(0), Free(1), Al(3), Beta(&[(-1, 3), (1, 2)]), Beta(&[(1, 1), (-1, 2)]), Al(1), Free(2), Free(3), Al(7), Beta(&[(-1, 7), (1, 6)]), Beta(&[(1, 5), (-1, 6)])];
                let fixed = [(2, a[2]), (3, a[3])];
                let bs = s.run(&b8, &fixed);
                show("  B8 sharing b5 b6", &b8, &bs);
            }
        }
        9 => {
            let a9 = [Al(5), Beta(&[(-1, 5), (1, 4)]), Free(0), Free(1), Al(2), Beta(&[(-1, 2), (1, 1)]), Free(2), Free(3), Al(8), Beta(&[(-1, 8), (1, 7)]), Free(4), Free(5)];
            let sols = s.run(&a9, &[]);
            show("A9", &a9, &sols);
        }
        _ => return Err("search is defined for k = 8 and k = 9".into()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Generate { out } => generate(&out),
        Cmd::Search { k } => search(k),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}
