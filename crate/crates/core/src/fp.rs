//! Vectors, matrices and subspaces over a prime field `F_p`, for ranks up to 8.

use crate::mat::{Mat, MAX_RANK};
use serde::Serialize;

pub type FpVec = [u8; MAX_RANK];
const S: usize = MAX_RANK;

/// Multiplicative inverses modulo a small prime, indexed by residue.
#[derive(Clone, Debug)]
pub struct Field {
    pub p: u8,
    inv: Vec<u8>,
}

impl Field {
    pub fn new(p: u8) -> Field {
        let mut inv = vec![0u8; p as usize];
        for a in 1..p as u32 {
            for b in 1..p as u32 {
                if a * b % p as u32 == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        Field { p, inv }
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// `x += c * y` on the first `n` coordinates.
    #[inline]
    pub fn axpy(&self, x: &mut FpVec, c: u8, y: &FpVec, n: usize) {
        if c == 0 {
            return;
        }
        for i in 0..n {
            x[i] = ((x[i] as u16 + c as u16 * y[i] as u16) % self.p as u16) as u8;
        }
    }

    /// Scales so the first nonzero coordinate is 1; returns the scalar that was removed.
    #[inline]
    pub fn normalize(&self, v: &mut FpVec, n: usize) -> u8 {
        let Some(t) = (0..n).find(|&i| v[i] != 0) else {
            return 0;
        };
        let lead = v[t];
        if lead != 1 {
            let s = self.inv(lead);
            for x in v.iter_mut().take(n).skip(t) {
                *x = self.mul(*x, s);
            }
        }
        lead
    }
}

/// Reduces rows in place to reduced row-echelon form; returns pivot columns.
pub fn rref(rows: &mut Vec<FpVec>, n: usize, f: &Field) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(s) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, s);
        let inv = f.inv(rows[r][c]);
        for x in rows[r].iter_mut().take(n) {
            *x = f.mul(*x, inv);
        }
        let pivot_row = rows[r];
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let k = f.neg(rows[i][c]);
                f.axpy(&mut rows[i], k, &pivot_row, n);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Reduces `v` modulo an RREF basis; the result is zero on pivot columns.
#[inline]
pub fn reduce_mod(v: &mut FpVec, basis: &[FpVec], pivots: &[usize], n: usize, f: &Field) {
    for (row, &c) in basis.iter().zip(pivots) {
        if v[c] != 0 {
            let k = f.neg(v[c]);
            f.axpy(v, k, row, n);
        }
    }
}

/// A subspace of `F_p^r`, held as its unique RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubspaceRep {
    pub p: u8,
    pub r: u8,
    pub basis: Vec<Vec<u8>>,
}

impl SubspaceRep {
    pub fn zero(p: u8, r: usize) -> SubspaceRep {
        SubspaceRep { p, r: r as u8, basis: Vec::new() }
    }

    pub fn from_vectors(p: u8, r: usize, vecs: &[FpVec]) -> SubspaceRep {
        let f = Field::new(p);
        let mut rows = vecs.to_vec();
        rref(&mut rows, r, &f);
        SubspaceRep::from_rref(p, r, &rows)
    }

    pub fn from_rref(p: u8, r: usize, rows: &[FpVec]) -> SubspaceRep {
        SubspaceRep { p, r: r as u8, basis: rows.iter().map(|v| v[..r].to_vec()).collect() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn rows(&self) -> Vec<FpVec> {
        self.basis
            .iter()
            .map(|b| {
                let mut v = [0u8; S];
                v[..b.len()].copy_from_slice(b);
                v
            })
            .collect()
    }

    /// All nonzero vectors of the subspace.
    pub fn nonzero_vectors(&self) -> Vec<FpVec> {
        let f = Field::new(self.p);
        let rows = self.rows();
        let k = rows.len();
        let total = (self.p as usize).pow(k as u32);
        let mut out = Vec::with_capacity(total.saturating_sub(1));
        for code in 1..total {
            let mut v = [0u8; S];
            let mut c = code;
            for row in &rows {
                let a = (c % self.p as usize) as u8;
                c /= self.p as usize;
                f.axpy(&mut v, a, row, self.r as usize);
            }
            out.push(v);
        }
        out
    }

    /// The annihilator in the dual space, under the standard dot product.
    pub fn annihilator(&self) -> SubspaceRep {
        let f = Field::new(self.p);
        let r = self.r as usize;
        let rows = self.rows();
        let pivots: Vec<usize> = rows.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()).collect();
        let mut out = Vec::new();
        for c in (0..r).filter(|c| !pivots.contains(c)) {
            let mut v = [0u8; S];
            v[c] = 1;
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = f.neg(row[c]);
            }
            out.push(v);
        }
        SubspaceRep::from_vectors(self.p, r, &out)
    }

    pub fn contains(&self, v: &FpVec) -> bool {
        let f = Field::new(self.p);
        let rows = self.rows();
        let pivots: Vec<usize> = rows.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()).collect();
        let mut w = *v;
        reduce_mod(&mut w, &rows, &pivots, self.r as usize, &f);
        w.iter().all(|&x| x == 0)
    }
}

/// A matrix over `F_p` acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMat {
    pub n: u8,
    pub a: [u8; S * S],
}

impl FpMat {
    pub fn from_mat(m: &Mat, p: u8) -> FpMat {
        FpMat { n: m.n() as u8, a: m.residues(p as u32) }
    }

    #[inline]
    pub fn apply(&self, v: &FpVec, p: u8) -> FpVec {
        let n = self.n as usize;
        let mut out = [0u8; S];
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc: u32 = 0;
            let row = &self.a[i * S..i * S + n];
            for k in 0..n {
                acc += row[k] as u32 * v[k] as u32;
            }
            *o = (acc % p as u32) as u8;
        }
        out
    }

    pub fn is_scalar(&self, p: u8) -> bool {
        let n = self.n as usize;
        let d = self.a[0];
        (0..n).all(|i| (0..n).all(|j| self.a[i * S + j] == if i == j { d } else { 0 })) && !d.is_multiple_of(p)
    }
}

/// Dense indexing of the lines of `F_p^n`: the first nonzero coordinate is scaled
/// to 1, lines are grouped by that position (later positions first), and the
/// remaining tail is read as a base-`p` number.
#[derive(Clone, Debug)]
pub struct LineIndex {
    pub n: usize,
    pub p: u8,
    offsets: Vec<u32>,
    pub count: u32,
}

impl LineIndex {
    pub fn new(n: usize, p: u8) -> LineIndex {
        let mut offsets = vec![0u32; n.max(1)];
        let mut acc = 0;
        for t in (0..n).rev() {
            offsets[t] = acc;
            acc += (p as u32).pow((n - 1 - t) as u32);
        }
        LineIndex { n, p, offsets, count: acc }
    }

    /// Index of the line through a normalized nonzero vector.
    #[inline]
    pub fn index_normalized(&self, v: &[u8]) -> u32 {
        let t = v[..self.n].iter().position(|&x| x != 0).expect("zero vector has no line");
        let mut tail = 0u32;
        for &x in &v[t + 1..self.n] {
            tail = tail * self.p as u32 + x as u32;
        }
        self.offsets[t] + tail
    }

    pub fn vector(&self, idx: u32) -> FpVec {
        let mut v = [0u8; S];
        let mut t = 0;
        while t + 1 < self.n && idx < self.offsets[t] {
            t += 1;
        }
        let mut tail = idx - self.offsets[t];
        v[t] = 1;
        for i in (t + 1..self.n).rev() {
            v[i] = (tail % self.p as u32) as u8;
            tail /= self.p as u32;
        }
        v
    }
}

/// Enumerates all `k`-dimensional subspaces of `F_p^n` in RREF.
pub fn all_subspaces(n: usize, k: usize, p: u8) -> Vec<Vec<FpVec>> {
    let mut out = Vec::new();
    let mut piv = Vec::with_capacity(k);
    choose_pivots(n, k, 0, &mut piv, &mut |pivots| {
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let total = (p as u64).pow(free.len() as u32);
        for code in 0..total {
            let mut rows = vec![[0u8; S]; k];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = 1;
            }
            let mut c = code;
            for &(r, col) in &free {
                rows[r][col] = (c % p as u64) as u8;
                c /= p as u64;
            }
            out.push(rows);
        }
    });
    out
}

fn choose_pivots(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        choose_pivots(n, k, c + 1, cur, f);
        cur.pop();
    }
}
