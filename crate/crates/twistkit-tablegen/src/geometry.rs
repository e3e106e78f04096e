//! Polyline model of the k-holed torus and Dehn twists of based paths.
//!
//! The torus is the unit square with k square holes of half-width r = 1/(8k)
//! centred at ((j-1)/k, 1/2). Cut arcs: the line x ∈ ℤ (letter X) and the
//! pieces of y ∈ 1/2 + ℤ between consecutive holes (letters H_1..H_k).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type Pt = (Q, Q);

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn qi(n: i64) -> Q {
    q(n, 1)
}

fn floor_i(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("coordinate fits")
}

fn ceil_i(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("coordinate fits")
}

fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// Letters are signed codes: X = ±1, H_j = ±(j+1).
pub type Code = i16;

pub fn reduce(codes: impl IntoIterator<Item = Code>) -> Vec<Code> {
    let mut out: Vec<Code> = Vec::new();
    for c in codes {
        if out.last() == Some(&-c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

pub fn invert(w: &[Code]) -> Vec<Code> {
    w.iter().rev().map(|c| -c).collect()
}

#[derive(Debug)]
pub struct Degenerate(pub String);

pub struct Model {
    pub k: usize,
    pub r: Q,
    c: Vec<Q>,
    pub p: Pt,
}

impl Model {
    pub fn new(k: usize) -> Model {
        let r = q(1, 8 * k as i64);
        let c = (0..=k + 1).map(|j| q(j as i64 - 1, k as i64)).collect();
        let p = (r.clone(), q(1, 2) + &r / qi(2));
        Model { k, r, c, p }
    }

    /// Centre x-coordinate of hole j (1-based); j = k+1 is hole 1 shifted by one.
    pub fn c(&self, j: usize) -> Q {
        self.c[j].clone()
    }

    pub fn mid(&self, j: usize) -> Q {
        (self.c(j) + self.c(j + 1)) / qi(2)
    }

    /// Crossings of the segment a→b with the cut arcs, by segment parameter.
    pub fn letters_seg(&self, a: &Pt, b: &Pt) -> Result<Vec<(Q, Code)>, Degenerate> {
        let mut out = Vec::new();
        let (x0, y0) = a;
        let (x1, y1) = b;
        let half = q(1, 2);
        if x0 != x1 {
            let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
            for n in floor_i(lo) + 1..=floor_i(hi) {
                let nq = qi(n);
                if &nq == hi {
                    return Err(Degenerate("vertex on a vertical cut".into()));
                }
                let t = (&nq - x0) / (x1 - x0);
                let y = y0 + &t * (y1 - y0);
                let ym = frac(&(y - &half));
                if ym.is_zero() || ym < self.r || ym > qi(1) - &self.r {
                    return Err(Degenerate("vertical cut crossed inside hole 1".into()));
                }
                out.push((t, if x1 > x0 { 1 } else { -1 }));
            }
        }
        if y0 != y1 {
            let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            for n in floor_i(&(lo - &half)) + 1..=floor_i(&(hi - &half)) {
                let yy = qi(n) + &half;
                if &yy == lo || &yy == hi {
                    return Err(Degenerate("vertex on a horizontal cut".into()));
                }
                let t = (&yy - y0) / (y1 - y0);
                let x = x0 + &t * (x1 - x0);
                let xm = frac(&x);
                let j = (1..=self.k)
                    .find(|&j| self.c(j) + &self.r < xm && xm < self.c(j + 1) - &self.r)
                    .ok_or_else(|| Degenerate("horizontal cut crossed inside a hole".into()))?;
                let code = j as Code + 1;
                out.push((t, if y1 > y0 { code } else { -code }));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    pub fn word(&self, path: &[Pt]) -> Result<Vec<Code>, Degenerate> {
        let mut w = Vec::new();
        for s in path.windows(2) {
            w.extend(self.letters_seg(&s[0], &s[1])?.into_iter().map(|(_, l)| l));
        }
        Ok(reduce(w))
    }
}

/// Proper crossing of segments ab and cd: (s on ab, t on cd, cross(ab, cd)).
fn seg_int(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> Result<Option<(Q, Q, Q)>, Degenerate> {
    let (rx, ry) = (&b.0 - &a.0, &b.1 - &a.1);
    let (sx, sy) = (&d.0 - &c.0, &d.1 - &c.1);
    let den = &rx * &sy - &ry * &sx;
    let (cx, cy) = (&c.0 - &a.0, &c.1 - &a.1);
    if den.is_zero() {
        if (&cx * &ry - &cy * &rx).is_zero() {
            let proj = |p: &Pt| (&p.0 - &a.0) * &rx + (&p.1 - &a.1) * &ry;
            let len = &rx * &rx + &ry * &ry;
            let (p1, p2) = {
                let (u, v) = (proj(c), proj(d));
                if u < v { (u, v) } else { (v, u) }
            };
            if p2.is_negative() || p1 > len {
                return Ok(None);
            }
            return Err(Degenerate("collinear overlap".into()));
        }
        return Ok(None);
    }
    let s = (&cx * &sy - &cy * &sx) / &den;
    let t = (&cx * &ry - &cy * &rx) / &den;
    let one = qi(1);
    if s.is_negative() || s > one || t.is_negative() || t > one {
        return Ok(None);
    }
    if s.is_zero() || s == one || t.is_zero() || t == one {
        return Err(Degenerate("segments touch at an endpoint".into()));
    }
    Ok(Some((s, t, den)))
}

/// A closed curve given by a polyline whose last point is the first plus an integer period.
pub struct Curve {
    pub pts: Vec<Pt>,
    cross: Vec<(Q, Code)>,
}

impl Curve {
    pub fn new(model: &Model, pts: Vec<Pt>) -> Result<Curve, Degenerate> {
        let first = &pts[0];
        let last = &pts[pts.len() - 1];
        if !(&last.0 - &first.0).is_integer() || !(&last.1 - &first.1).is_integer() {
            return Err(Degenerate("curve does not close up".into()));
        }
        let mut cross = Vec::new();
        for (i, s) in pts.windows(2).enumerate() {
            for (t, l) in model.letters_seg(&s[0], &s[1])? {
                cross.push((qi(i as i64) + t, l));
            }
        }
        cross.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Curve { pts, cross })
    }

    /// The loop read from parameter u once around.
    fn word_from(&self, u: &Q) -> Result<Vec<Code>, Degenerate> {
        if self.cross.iter().any(|(p, _)| p == u) {
            return Err(Degenerate("curve crossing lies on a cut".into()));
        }
        let after = self.cross.iter().filter(|(p, _)| p > u).map(|x| x.1);
        let before = self.cross.iter().filter(|(p, _)| p < u).map(|x| x.1);
        Ok(after.chain(before).collect())
    }

    /// Letters of the whole loop.
    pub fn loop_word(&self) -> Vec<Code> {
        self.cross.iter().map(|x| x.1).collect()
    }
}

/// Word of the image of `path` under the twist about `curve` (sign +1 right-handed).
pub fn twist_path(model: &Model, curve: &Curve, path: &[Pt], sign: i8) -> Result<Vec<Code>, Degenerate> {
    let mut events: Vec<(Q, Vec<Code>)> = Vec::new();
    for (i, s) in path.windows(2).enumerate() {
        let (a, b) = (&s[0], &s[1]);
        let base = qi(i as i64);
        for (t, l) in model.letters_seg(a, b)? {
            events.push((&base + t, vec![l]));
        }
        for (j, cs) in curve.pts.windows(2).enumerate() {
            let (c, d) = (&cs[0], &cs[1]);
            let xs = [&a.0, &b.0];
            let ys = [&a.1, &b.1];
            let cxs = [&c.0, &d.0];
            let cys = [&c.1, &d.1];
            let min = |v: [&Q; 2]| if v[0] < v[1] { v[0].clone() } else { v[1].clone() };
            let max = |v: [&Q; 2]| if v[0] > v[1] { v[0].clone() } else { v[1].clone() };
            let tx_lo = floor_i(&(min(xs) - max(cxs))) - 1;
            let tx_hi = ceil_i(&(max(xs) - min(cxs))) + 1;
            let ty_lo = floor_i(&(min(ys) - max(cys))) - 1;
            let ty_hi = ceil_i(&(max(ys) - min(cys))) + 1;
            for tx in tx_lo..=tx_hi {
                for ty in ty_lo..=ty_hi {
                    let c2 = (&c.0 + qi(tx), &c.1 + qi(ty));
                    let d2 = (&d.0 + qi(tx), &d.1 + qi(ty));
                    let Some((s, t, den)) = seg_int(a, b, &c2, &d2)? else { continue };
                    // turn right onto the curve for a right-handed twist
                    let forward = den.is_negative() == (sign > 0);
                    let cw = curve.word_from(&(qi(j as i64) + t))?;
                    events.push((&base + s, if forward { cw } else { invert(&cw) }));
                }
            }
        }
    }
    events.sort_by(|a, b| a.0.cmp(&b.0));
    if events.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Degenerate("two events at the same point".into()));
    }
    Ok(reduce(events.into_iter().flat_map(|e| e.1)))
}

/// Generator loops, reference arcs and curve constructors for one k.
pub struct Surf {
    pub m: Model,
    pub gens: Vec<Vec<Pt>>,
    pub arcs: Vec<Vec<Pt>>,
    ncurves: i64,
}

impl Surf {
    pub fn new(k: usize) -> Result<Surf, Degenerate> {
        let m = Model::new(k);
        let r = m.r.clone();
        let p = m.p.clone();
        let mut gens = vec![vec![
            p.clone(),
            (r.clone(), q(3, 4)),
            (qi(1) + &r, q(3, 4)),
            (qi(1) + &r, p.1.clone()),
        ]];
        for j in 1..=k {
            let mj = m.mid(j);
            let top = q(3, 2) + &r * qi(4);
            gens.push(vec![
                p.clone(),
                (r.clone(), q(5, 4)),
                (mj.clone(), q(5, 4)),
                (mj, top.clone()),
                (&r * q(3, 2), top),
                (&r * q(3, 2), q(3, 2) + &r / qi(2)),
                (r.clone(), q(3, 2) + &r / qi(2)),
            ]);
        }
        for (g, path) in gens.iter().enumerate() {
            let w = m.word(path)?;
            if w != vec![g as Code + 1] {
                return Err(Degenerate(format!("generator {} reads {:?}", g, w)));
            }
        }
        let mut arcs = Vec::new();
        for j in 2..=k {
            let low = q(1, 2) + &r * qi(4);
            let xj = m.c(j) + &r / qi(3);
            let path = vec![
                p.clone(),
                (&r * q(3, 2), p.1.clone()),
                (&r * q(3, 2), low.clone()),
                (xj.clone(), low),
                (xj, q(1, 2) + &r),
            ];
            if !m.word(&path)?.is_empty() {
                return Err(Degenerate(format!("arc {} crosses a cut", j)));
            }
            arcs.push(path);
        }
        Ok(Surf { m, gens, arcs, ncurves: 0 })
    }

    fn eid(&mut self) -> Q {
        self.ncurves += 1;
        q(self.ncurves, 997)
    }

    /// (images of generators, arc words) under the twist.
    pub fn twist(&self, c: &Curve, sign: i8) -> Result<(Vec<Vec<Code>>, Vec<Vec<Code>>), Degenerate> {
        let th = self.gens.iter().map(|p| twist_path(&self.m, c, p, sign)).collect::<Result<_, _>>()?;
        let arcs = self.arcs.iter().map(|p| twist_path(&self.m, c, p, sign)).collect::<Result<_, _>>()?;
        Ok((th, arcs))
    }

    pub fn beta(&mut self) -> Result<Curve, Degenerate> {
        let e = self.eid();
        let k = self.m.k as i64;
        let x = q(1, 3 * k) + &e / qi(7);
        let y = q(1, 10) + &e / qi(5);
        Curve::new(&self.m, vec![(x.clone(), y.clone()), (x + qi(1), y)])
    }

    /// Vertical curve in the gap after hole i; i = k is the gap across x = 1.
    pub fn vertical(&mut self, i: usize) -> Result<Curve, Degenerate> {
        let e = self.eid();
        let m = &self.m;
        let gap = if i < m.k { m.mid(i) } else { m.mid(m.k) - qi(1) };
        let x = gap + &m.r / qi(7) + &e * &m.r / qi(3);
        let pts = vec![(x.clone(), q(3, 10) + &e / qi(3)), (x, q(13, 10) + &e / qi(3))];
        Curve::new(m, pts)
    }

    /// Horizontal curve passing above the holes in `above` and below the rest.
    pub fn horizontal(&mut self, above: &[usize]) -> Result<Curve, Degenerate> {
        let e = self.eid();
        let m = &self.m;
        let r = &m.r;
        let g = q(1, 4 * m.k as i64);
        let mut pts = Vec::new();
        for j in 1..=m.k {
            let off = r * qi(3) + &e * r / qi(3);
            let h = if above.contains(&j) { q(1, 2) + off } else { q(1, 2) - off };
            pts.push((m.c(j) - &g + &e * r / qi(11), h.clone()));
            pts.push((m.c(j) + &g - &e * r / qi(13), h));
        }
        let first = pts[0].clone();
        pts.push((first.0 + qi(1), first.1));
        Curve::new(m, pts)
    }

    /// Square around hole j.
    pub fn delta(&mut self, j: usize) -> Result<Curve, Degenerate> {
        let e = self.eid();
        let m = &self.m;
        let c = m.c(j);
        let w = &m.r * qi(2) + &e * &m.r / qi(5);
        let y = q(1, 2);
        let pts = vec![
            (&c - &w, &y - &w),
            (&c + &w, &y - &w),
            (&c + &w, &y + &w),
            (&c - &w, &y + &w),
            (&c - &w, &y - &w),
        ];
        Curve::new(m, pts)
    }
}
