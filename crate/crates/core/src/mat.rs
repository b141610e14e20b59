//! Small square matrices over `Z` or `Z/m`, sized for ranks up to [`MAX_RANK`].

use std::fmt;

/// Largest supported rank for group computations.
pub const MAX_RANK: usize = 8;
const S: usize = MAX_RANK;

/// An `n x n` matrix with entries in `Z` (`modulus == 0`) or in `Z/m`.
///
/// Entries are stored row-major with a fixed stride so the type is `Copy`-cheap
/// to clone and hashable without indirection.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    n: u8,
    modulus: u32,
    a: [i32; S * S],
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<i32>> = (0..self.n()).map(|i| self.row(i)).collect();
        write!(f, "Mat(m={}, {:?})", self.modulus, rows)
    }
}

impl Mat {
    pub fn zero(n: usize, modulus: u32) -> Mat {
        assert!(n <= MAX_RANK, "rank {} exceeds MAX_RANK", n);
        Mat { n: n as u8, modulus, a: [0; S * S] }
    }

    pub fn identity(n: usize, modulus: u32) -> Mat {
        let mut m = Mat::zero(n, modulus);
        for i in 0..n {
            m.a[i * S + i] = if modulus == 1 { 0 } else { 1 };
        }
        m
    }

    /// Builds a matrix from rows, reducing entries when `modulus > 0`.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], modulus: u32) -> Mat {
        let n = rows.len();
        let mut m = Mat::zero(n, modulus);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "matrix must be square");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.a[i * S + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.a[i * S + j] = self.norm(x);
    }

    #[inline]
    fn norm(&self, x: i64) -> i32 {
        if self.modulus == 0 {
            debug_assert!(x >= i32::MIN as i64 && x <= i32::MAX as i64);
            x as i32
        } else {
            x.rem_euclid(self.modulus as i64) as i32
        }
    }

    pub fn row(&self, i: usize) -> Vec<i32> {
        (0..self.n()).map(|j| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.get(i, j) as i64).collect())
            .collect()
    }

    pub fn col(&self, j: usize) -> [i32; S] {
        let mut c = [0; S];
        for (i, x) in c.iter_mut().enumerate().take(self.n()) {
            *x = self.get(i, j);
        }
        c
    }

    /// Matrix product `self * rhs` (apply `rhs` first when acting on columns).
    pub fn mul(&self, rhs: &Mat) -> Mat {
        debug_assert_eq!(self.n, rhs.n);
        debug_assert_eq!(self.modulus, rhs.modulus);
        let n = self.n();
        let mut out = Mat::zero(n, self.modulus);
        for i in 0..n {
            for j in 0..n {
                let mut acc: i64 = 0;
                for k in 0..n {
                    acc += self.a[i * S + k] as i64 * rhs.a[k * S + j] as i64;
                }
                out.a[i * S + j] = out.norm(acc);
            }
        }
        out
    }

    /// `self * v` for a column vector of length `n`.
    pub fn apply(&self, v: &[i32]) -> [i32; S] {
        let n = self.n();
        let mut out = [0i32; S];
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc: i64 = 0;
            for (k, &x) in v.iter().enumerate().take(n) {
                acc += self.a[i * S + k] as i64 * x as i64;
            }
            *o = self.norm(acc);
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut t = self.clone();
        for i in 0..self.n() {
            for j in 0..self.n() {
                t.a[j * S + i] = self.a[i * S + j];
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.n(), self.modulus)
    }

    /// Reduces an integer (or finer-modulus) matrix into `Z/m`.
    pub fn reduce(&self, m: u32) -> Mat {
        assert!(m > 0);
        assert!(self.modulus == 0 || self.modulus.is_multiple_of(m), "incompatible moduli");
        let mut out = Mat::zero(self.n(), m);
        for i in 0..self.n() {
            for j in 0..self.n() {
                out.set(i, j, self.get(i, j) as i64);
            }
        }
        out
    }

    /// Entries as residues mod `p` in `0..p`, row-major.
    pub fn residues(&self, p: u32) -> [u8; S * S] {
        let mut out = [0u8; S * S];
        for i in 0..self.n() {
            for j in 0..self.n() {
                out[i * S + j] = (self.get(i, j) as i64).rem_euclid(p as i64) as u8;
            }
        }
        out
    }

    /// Inverse over `Z` or `Z/m`, computed by unimodular row reduction.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n();
        let m = self.modulus as i64;
        let red = |x: i64| if m == 0 { x } else { x.rem_euclid(m) };
        let mut a = vec![[0i64; 2 * S]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = self.get(i, j) as i64;
            }
            a[i][n + i] = red(1);
        }
        for c in 0..n {
            loop {
                let mut best: Option<usize> = None;
                for r in c..n {
                    if a[r][c] != 0 && best.is_none_or(|b| a[r][c].abs() < a[b][c].abs()) {
                        best = Some(r);
                    }
                }
                let b = best?;
                a.swap(c, b);
                let mut done = true;
                for r in (c + 1)..n {
                    if a[r][c] != 0 {
                        let q = a[r][c] / a[c][c];
                        for k in 0..2 * n {
                            a[r][k] = red(a[r][k] - q * a[c][k]);
                        }
                        if a[r][c] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            let piv = a[c][c];
            let inv = if m == 0 {
                if piv.abs() != 1 {
                    return None;
                }
                piv
            } else {
                crate::arith::inv_mod(piv, m)?
            };
            for k in 0..2 * n {
                a[c][k] = red(a[c][k] * inv);
            }
            for r in 0..n {
                if r != c && a[r][c] != 0 {
                    let q = a[r][c];
                    for k in 0..2 * n {
                        a[r][k] = red(a[r][k] - q * a[c][k]);
                    }
                }
            }
        }
        let mut out = Mat::zero(n, self.modulus);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, a[i][n + j]);
            }
        }
        Some(out)
    }

    /// Determinant by fraction-free elimination (exact for integer matrices).
    pub fn det(&self) -> i64 {
        let rows = self.rows();
        let d = crate::lattice::det(&rows);
        if self.modulus == 0 {
            d as i64
        } else {
            (d.rem_euclid(self.modulus as i128)) as i64
        }
    }

    /// Order of the element, if at most `limit`.
    pub fn order(&self, limit: u64) -> Option<u64> {
        let id = Mat::identity(self.n(), self.modulus);
        let mut x = self.clone();
        for k in 1..=limit {
            if x == id {
                return Some(k);
            }
            x = x.mul(self);
        }
        None
    }
}
