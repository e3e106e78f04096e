//! Transvections, Smith normal form and the homological invariants of factorizations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::factorization::{Factorization, FactorizationError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n_rows: usize, cols: &[Vec<i64>]) -> IntMatrix {
        let mut m = IntMatrix::zeros(n_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n_rows);
            for (i, v) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.rows) && self.rows == self.cols
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Delete row and column `i`.
    pub fn minor_at(&self, i: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows - 1, self.cols - 1);
        for (a, r) in (0..self.rows).filter(|&r| r != i).enumerate() {
            for (b, c) in (0..self.cols).filter(|&c| c != i).enumerate() {
                out.set(a, b, self.get(r, c).clone());
            }
        }
        out
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for t in 0..n - 1 {
            if a[t][t].is_zero() {
                match (t + 1..n).find(|&i| !a[i][t].is_zero()) {
                    Some(p) => {
                        a.swap(t, p);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in t + 1..n {
                for j in t + 1..n {
                    let v = &a[i][j] * &a[t][t] - &a[i][t] * &a[t][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[t][t].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    // row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = q * self.get(src, j);
            self.data[dst * self.cols + j] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = q * self.get(i, src);
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Intersection pairing on H₁ in the basis x, y, z_1..: ⟨x,y⟩ = 1, z's in the radical.
pub fn pairing(u: &[i64], v: &[i64]) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

/// v ↦ v + ⟨v,c⟩·c.
pub fn transvection(c: &[i64]) -> IntMatrix {
    signed_transvection(c, 1)
}

pub fn signed_transvection(c: &[i64], sign: i8) -> IntMatrix {
    let n = c.len();
    let mut m = IntMatrix::identity(n);
    let r = [c[1], -c[0]];
    for (i, ci) in c.iter().enumerate() {
        for (j, rj) in r.iter().enumerate() {
            let v = m.get(i, j) + BigInt::from(sign as i64 * ci * rj);
            m.set(i, j, v);
        }
    }
    m
}

/// Apply the (signed) transvection of `c` to the vector `v`.
pub fn transvect(c: &[i64], sign: i8, v: &[i64]) -> Vec<i64> {
    let p = sign as i64 * pairing(v, c);
    v.iter().zip(c).map(|(a, b)| a + p * b).collect()
}

/// J with J[0][1] = 1, J[1][0] = -1.
pub fn pairing_matrix(n: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(n, n);
    j.set(0, 1, BigInt::one());
    j.set(1, 0, -BigInt::one());
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest nonzero |entry|, ties broken in row-major order.
    SmallestRowMajor,
    /// First nonzero entry scanning column by column.
    FirstColumnMajor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub diag: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn divisibility_chain(&self) -> bool {
        self.invariant_factors.iter().all(|d| d.is_positive())
            && self.invariant_factors.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
    }
}

pub fn snf(m: &IntMatrix) -> SmithForm {
    snf_with(m, PivotRule::SmallestRowMajor)
}

pub fn snf_with(m: &IntMatrix, rule: PivotRule) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut rank = 0;
    for t in 0..r.min(c) {
        let mut first = true;
        loop {
            let pick = if first { pick_pivot(&a, t, rule) } else { local_pivot(&a, t) };
            first = false;
            let Some((p, q)) = pick else { break };
            a.swap_rows(t, p);
            u.swap_rows(t, p);
            a.swap_cols(t, q);
            v.swap_cols(t, q);
            let mut clean = true;
            for i in t + 1..r {
                if !a.get(i, t).is_zero() {
                    let q = -(a.get(i, t) / a.get(t, t));
                    a.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    clean &= a.get(i, t).is_zero();
                }
            }
            for j in t + 1..c {
                if !a.get(t, j).is_zero() {
                    let q = -(a.get(t, j) / a.get(t, t));
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    clean &= a.get(t, j).is_zero();
                }
            }
            if !clean {
                continue;
            }
            let piv = a.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    a.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_zero() {
            break;
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }
    let invariant_factors = (0..rank).map(|i| a.get(i, i).clone()).collect();
    SmithForm { invariant_factors, rank, diag: a, u, v }
}

/// Smallest nonzero entry in row t or column t, used to continue a Euclidean step.
fn local_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let cells = (t..a.rows).map(|i| (i, t)).chain((t + 1..a.cols).map(|j| (t, j)));
    cells.filter(|&(i, j)| !a.get(i, j).is_zero()).min_by_key(|&(i, j)| a.get(i, j).abs())
}

fn pick_pivot(a: &IntMatrix, t: usize, rule: PivotRule) -> Option<(usize, usize)> {
    match rule {
        PivotRule::SmallestRowMajor => {
            let mut best: Option<(usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    let x = a.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            best
        }
        PivotRule::FirstColumnMajor => {
            (t..a.cols).flat_map(|j| (t..a.rows).map(move |i| (i, j))).find(|&(i, j)| !a.get(i, j).is_zero())
        }
    }
}

/// A finitely generated abelian group ℤ^free ⊕ ⨁ ℤ/t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{}", t)).collect();
        if self.free_rank > 0 {
            parts.insert(0, if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of the integer matrix.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    let s = snf(m);
    AbelianGroup {
        free_rank: m.rows - s.rank,
        torsion: s.invariant_factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Class matrix of the factors: (k+1) × n, one column per factor.
pub fn class_matrix(f: &Factorization) -> Result<IntMatrix, FactorizationError> {
    let cols = f.classes()?;
    Ok(IntMatrix::from_columns(f.k() + 1, &cols))
}

/// H₁ of the Lefschetz fibration total space: H₁(Σ) / ⟨vanishing classes⟩.
pub fn filling_h1(f: &Factorization) -> Result<AbelianGroup, FactorizationError> {
    Ok(cokernel(&class_matrix(f)?))
}

pub fn euler_char(f: &Factorization) -> i64 {
    f.len() as i64 - f.k() as i64
}

fn block2(c: &[i64], sign: i8) -> IntMatrix {
    signed_transvection(&c[..2], sign)
}

/// Product of the x,y blocks of the factor transvections.
pub fn sl2_shadow(f: &Factorization) -> Result<IntMatrix, FactorizationError> {
    let mut m = IntMatrix::identity(2);
    for (c, s) in f.classes()?.iter().zip(f.signs()) {
        m = m.mul(&block2(c, s));
    }
    Ok(m)
}

/// Capping at the level of H₁: hole `i` in 1..=k, any index.
pub fn cap_class(c: &[i64], i: usize) -> Vec<i64> {
    let k = c.len() - 1;
    assert!((1..=k).contains(&i));
    if k == 1 {
        return c.to_vec();
    }
    if i < k {
        let mut out = c.to_vec();
        out.remove(i + 1);
        out
    } else {
        // z_{k-1} = -(z_1 + .. + z_{k-2}) once b_k dies
        let last = c[k];
        let mut out: Vec<i64> = c[..k].to_vec();
        for v in out.iter_mut().skip(2) {
            *v -= last;
        }
        out
    }
}

/// Iterated homology capping down to the closed torus: the 2×2 transvections of each factor.
pub fn closed_torus_matrices(classes: &[Vec<i64>], signs: &[i8], holes: &[usize]) -> Vec<IntMatrix> {
    let mut cs = classes.to_vec();
    for &h in holes {
        cs = cs.iter().map(|c| cap_class(c, h)).collect();
    }
    cs.iter().zip(signs).map(|(c, &s)| block2(c, s)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub k: usize,
    pub n: usize,
    pub euler: i64,
    pub h1_free_rank: usize,
    pub h1_torsion: Vec<u64>,
    pub shadow_ok: bool,
    pub verified: Option<bool>,
}

impl InvariantReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn report(f: &Factorization, verified: Option<bool>) -> Result<InvariantReport, FactorizationError> {
    let h1 = filling_h1(f)?;
    let shadow_ok = f.homology_shadow()?.is_identity() && sl2_shadow(f)?.is_identity();
    Ok(InvariantReport {
        k: f.k(),
        n: f.len(),
        euler: euler_char(f),
        h1_free_rank: h1.free_rank,
        h1_torsion: h1.torsion.iter().map(|t| t.to_u64().expect("torsion fits in u64")).collect(),
        shadow_ok,
        verified,
    })
}
