use std::sync::Arc;

use proptest::prelude::*;

use twistkit::factorization::{eval_curve, parse, Atom, CurveExpr, Factorization, TwistFactor};
use twistkit::freegroup::{MarkedClass, Word};
use twistkit::invariants::{cokernel, snf, IntMatrix};
use twistkit::moves::{cap, rotate, slide_left, slide_right, Centrality};
use twistkit::surface::{table, Label, TwistTable};

fn labels(k: usize) -> Vec<Label> {
    table(k).unwrap().labels().collect()
}

fn letters(rank: usize) -> impl Strategy<Value = Vec<(usize, i8)>> {
    prop::collection::vec((0..rank, prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 })), 0..30)
}

fn sign() -> impl Strategy<Value = i8> {
    prop::bool::ANY.prop_map(|b| if b { 1 } else { -1 })
}

fn curve(k: usize, depth: u32) -> impl Strategy<Value = CurveExpr> {
    let ls = labels(k);
    let leaf = prop::sample::select(ls.clone()).prop_map(CurveExpr::label);
    leaf.prop_recursive(depth, 16, 3, move |inner| {
        (prop::collection::vec((sign(), inner.clone()), 1..3), prop::sample::select(ls.clone())).prop_map(|(atoms, base)| {
            CurveExpr::conjugated(atoms.into_iter().map(|(sign, curve)| Atom { sign, curve }), &CurveExpr::label(base))
        })
    })
}

fn factorization(k: usize, depth: u32, len: std::ops::Range<usize>) -> impl Strategy<Value = Factorization> {
    prop::collection::vec((sign(), curve(k, depth)), len).prop_map(move |fs| {
        let factors = fs.into_iter().map(|(sign, curve)| TwistFactor { sign, curve }).collect();
        Factorization::new(table(k).unwrap(), factors).unwrap()
    })
}

fn class_of_word(t: &TwistTable, ws: &[(Label, i8)]) -> MarkedClass {
    let parts: Vec<&MarkedClass> = ws.iter().map(|(l, s)| t.get(*l).unwrap().signed_twist(*s)).collect();
    MarkedClass::product(t.k(), parts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_a_homomorphism(a in letters(3), b in letters(3)) {
        let wa = Word::reduce(&a, 3).unwrap();
        let wb = Word::reduce(&b, 3).unwrap();
        let ab: Vec<(usize, i8)> = a.iter().chain(b.iter()).copied().collect();
        prop_assert_eq!(Word::reduce(&ab, 3).unwrap(), wa.multiply(&wb).unwrap());
        let reduced: Vec<(usize, i8)> = wa.letters().map(|l| (l.gen, l.sign)).collect();
        prop_assert!(reduced.windows(2).all(|p| !(p[0].0 == p[1].0 && p[0].1 == -p[1].1)));
        prop_assert!(wa.multiply(&wa.inverse()).unwrap().is_empty());
    }

    #[test]
    fn word_text_roundtrip(a in letters(4)) {
        let w = Word::reduce(&a, 4).unwrap();
        prop_assert_eq!(Word::parse(&w.to_string(), 4).unwrap(), w);
    }

    #[test]
    fn twist_group_laws(
        a in prop::collection::vec((prop::sample::select(labels(3)), sign()), 0..4),
        b in prop::collection::vec((prop::sample::select(labels(3)), sign()), 0..4),
    ) {
        let t = table(3).unwrap();
        let (x, y) = (class_of_word(&t, &a), class_of_word(&t, &b));
        let xy = MarkedClass::compose(&x, &y).unwrap();
        let inv = MarkedClass::compose(&y.inverse(), &x.inverse()).unwrap();
        prop_assert!(MarkedClass::compose(&xy, &inv).unwrap().is_identity());
    }

    #[test]
    fn factorization_text_roundtrip(f in factorization(3, 4, 1..5)) {
        let text = f.to_text();
        let g = parse(&text).unwrap();
        prop_assert_eq!(g.to_text(), text);
        prop_assert_eq!(g.factors(), f.factors());
    }

    #[test]
    fn slides_preserve_the_product(f in factorization(3, 2, 2..6), i in 1usize..6, right in prop::bool::ANY) {
        let i = 1 + (i - 1) % (f.len() - 1);
        let g = if right { slide_right(&f, i) } else { slide_left(&f, i) }.unwrap();
        prop_assert_eq!(g.eval_product().unwrap(), f.eval_product().unwrap());
        prop_assert_eq!(g.homology_shadow().unwrap(), f.homology_shadow().unwrap());
    }

    #[test]
    fn capping_is_a_homomorphism(
        a in prop::collection::vec((prop::sample::select(labels(4)), sign()), 0..4),
        b in prop::collection::vec((prop::sample::select(labels(4)), sign()), 0..4),
        i in 2usize..4,
    ) {
        let t = table(4).unwrap();
        let keep = |w: &[(Label, i8)]| -> Vec<(Label, i8)> {
            w.iter().copied().filter(|(l, _)| *l != Label::De(i as u32)).collect()
        };
        let (a, b) = (keep(&a), keep(&b));
        let (x, y) = (class_of_word(&t, &a), class_of_word(&t, &b));
        let xy = MarkedClass::compose(&x, &y).unwrap().cap(i).unwrap();
        let capped = MarkedClass::compose(&x.cap(i).unwrap(), &y.cap(i).unwrap()).unwrap();
        prop_assert_eq!(xy, capped);
    }

    #[test]
    fn snf_reconstructs(rows in prop::collection::vec(prop::collection::vec(-20i64..=20, 4), 1..6)) {
        let m = IntMatrix::from_rows(&rows);
        let s = snf(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.diag.clone());
        prop_assert!(s.diag.is_diagonal());
        prop_assert!(s.divisibility_chain());
        prop_assert!(s.rank <= rows.len().min(4));
        let g = cokernel(&m);
        prop_assert_eq!(g.free_rank, rows.len() - s.rank);
    }
}

#[test]
fn rotation_needs_a_central_product() {
    let f = parse("surface genus 1 holes 2; al1 * be * al2").unwrap();
    assert!(rotate(&f, 1, Centrality::Check).is_err());
    let a8 = twistkit::catalog::get("A8").unwrap();
    let r = rotate(&a8.factors, 5, Centrality::Check).unwrap();
    assert!(r.verify().unwrap());
}

#[test]
fn wrong_beta_sign_breaks_the_braid_relations() {
    let mut t: TwistTable = (*table(4).unwrap()).clone();
    let be = t.curves.get_mut(&Label::Be).unwrap();
    std::mem::swap(&mut be.twist, &mut be.twist_inv);
    let r = twistkit::surface::validate_base_relations(&t);
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert!(failed.iter().any(|n| n.starts_with("braid") && n.contains("be")), "{:?}", failed);
    let f = parse("surface genus 1 holes 4; al1 * be").unwrap();
    let g = Factorization::new(Arc::new(t), f.factors().to_vec()).unwrap();
    assert_ne!(g.eval_product().unwrap(), f.eval_product().unwrap());
}

#[test]
fn transposed_pair_is_not_a_relation() {
    let a8 = &twistkit::catalog::get("A8").unwrap().factors;
    let t = a8.table().clone();
    let mut bad = None;
    for i in 0..a8.len() - 1 {
        let (x, y) = (&a8.factors()[i], &a8.factors()[i + 1]);
        let cx = eval_curve(&t, &x.curve).unwrap();
        let cy = eval_curve(&t, &y.curve).unwrap();
        if !cx.commutes_with(&cy).unwrap() {
            bad = Some(i);
            break;
        }
    }
    let i = bad.expect("A8 has a non-commuting adjacent pair");
    let mut fs = a8.factors().to_vec();
    fs.swap(i, i + 1);
    let g = a8.with_factors(fs);
    assert!(!g.verify().unwrap());
}

#[test]
fn capped_a9_has_eight_holes() {
    let a9 = &twistkit::catalog::get("A9").unwrap().factors;
    let c = cap(a9, 5).unwrap();
    assert_eq!(c.k(), 8);
    assert!(c.verify().unwrap());
    assert!(cap(a9, 1).is_err());
}
