//! Deterministic Schreier–Sims over matrix groups acting on vectors.

use crate::error::{AtlasError, Result};
use crate::mat::{Mat, MAX_RANK};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

type Vec8 = [i32; MAX_RANK];

/// The vectors a matrix group acts on, with the base used for stabilizer chains.
///
/// For exact integer groups the base should consist of vectors with small orbits
/// (simple coroots for Weyl groups); for groups over `Z/m` the standard basis.
#[derive(Clone, Debug)]
pub struct PointSpace {
    pub n: usize,
    pub modulus: u32,
    pub base: Vec<Vec8>,
}

impl PointSpace {
    pub fn standard(n: usize, modulus: u32) -> PointSpace {
        let base = (0..n)
            .map(|i| {
                let mut v = [0; MAX_RANK];
                v[i] = 1;
                v
            })
            .collect();
        PointSpace { n, modulus, base }
    }

    #[inline]
    fn key(&self, v: &Vec8) -> u64 {
        let off: i32 = if self.modulus == 0 { 128 } else { 0 };
        let mut k = 0u64;
        for &x in v.iter().take(self.n) {
            let b = x + off;
            debug_assert!((0..256).contains(&b), "point coordinate out of packing range");
            k = (k << 8) | (b as u64 & 0xff);
        }
        k
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: Vec8,
    gens: Vec<Mat>,
    orbit: Vec<Vec8>,
    pos: HashMap<u64, u32>,
    u: Vec<Mat>,
    uinv: Vec<Mat>,
    checked: HashSet<(u32, u32)>,
}

/// A base and strong generating set with explicit transversals.
#[derive(Clone, Debug)]
pub struct Chain {
    space: Arc<PointSpace>,
    identity: Mat,
    levels: Vec<Level>,
}

impl Chain {
    /// The trivial group. Levels are added only for base points some element moves.
    pub fn trivial(space: Arc<PointSpace>, modulus: u32) -> Chain {
        let identity = Mat::identity(space.n, modulus);
        Chain { space, identity, levels: Vec::new() }
    }

    /// Returns `j`, first appending a level for a base point moved by `res` when `j` is past the end.
    fn ensure_level(&mut self, j: usize, res: &Mat) -> usize {
        if j < self.levels.len() {
            return j;
        }
        let b = *self
            .space
            .base
            .iter()
            .find(|b| !self.levels.iter().any(|l| l.base == **b) && res.apply(*b) != **b)
            .expect("base is not faithful for this group");
        let mut pos = HashMap::new();
        pos.insert(self.space.key(&b), 0);
        self.levels.push(Level {
            base: b,
            gens: Vec::new(),
            orbit: vec![b],
            pos,
            u: vec![self.identity.clone()],
            uinv: vec![self.identity.clone()],
            checked: HashSet::new(),
        });
        self.levels.len() - 1
    }

    /// Chain for the group generated by `gens`.
    pub fn from_gens(space: Arc<PointSpace>, modulus: u32, gens: &[Mat]) -> Chain {
        let mut c = Chain::trivial(space, modulus);
        for g in gens {
            c.extend(g, None);
        }
        c
    }

    /// Chain for the group generated by the candidates, stopping as soon as the
    /// known order `target` is reached. Fails if the candidates run out first.
    pub fn from_candidates<I: IntoIterator<Item = Mat>>(
        space: Arc<PointSpace>,
        modulus: u32,
        candidates: I,
        target: u128,
    ) -> Result<Chain> {
        let mut c = Chain::trivial(space, modulus);
        if c.order() == target {
            return Ok(c);
        }
        for g in candidates {
            c.extend(&g, Some(target));
            if c.order() == target {
                return Ok(c);
            }
            if c.order() > target {
                break;
            }
        }
        Err(AtlasError::Internal(format!(
            "stabilizer chain reached order {} but {} was expected",
            c.order(),
            target
        )))
    }

    pub fn space(&self) -> &Arc<PointSpace> {
        &self.space
    }

    pub fn identity(&self) -> &Mat {
        &self.identity
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// A generating set (the first-level strong generators).
    pub fn generators(&self) -> &[Mat] {
        self.levels.first().map(|l| l.gens.as_slice()).unwrap_or(&[])
    }

    pub fn contains(&self, g: &Mat) -> bool {
        let (res, _) = self.sift(g, 0);
        res == self.identity
    }

    fn sift(&self, g: &Mat, from: usize) -> (Mat, usize) {
        let mut h = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let img = h.apply(&level.base);
            match level.pos.get(&self.space.key(&img)) {
                Some(&a) => {
                    if a != 0 {
                        h = level.uinv[a as usize].mul(&h);
                    }
                }
                None => return (h, l),
            }
        }
        (h, self.levels.len())
    }

    /// Adds `g` to the group; returns whether the group grew.
    pub fn extend(&mut self, g: &Mat, target: Option<u128>) -> bool {
        let (res, j) = self.sift(g, 0);
        if res == self.identity {
            return false;
        }
        let j = self.ensure_level(j, &res);
        for l in 0..=j {
            self.add_gen(l, res.clone());
        }
        self.complete(j, target);
        true
    }

    fn add_gen(&mut self, l: usize, g: Mat) {
        let space = self.space.clone();
        let level = &mut self.levels[l];
        level.gens.push(g);
        let mut i = 0;
        while i < level.orbit.len() {
            for s in 0..level.gens.len() {
                let img = level.gens[s].apply(&level.orbit[i]);
                let key = space.key(&img);
                if !level.pos.contains_key(&key) {
                    let u = level.gens[s].mul(&level.u[i]);
                    let uinv = u.inverse().expect("group element must be invertible");
                    level.pos.insert(key, level.orbit.len() as u32);
                    level.orbit.push(img);
                    level.u.push(u);
                    level.uinv.push(uinv);
                }
            }
            i += 1;
        }
    }

    fn complete(&mut self, start: usize, target: Option<u128>) {
        let mut i = start;
        loop {
            if target.is_some_and(|t| self.order() >= t) {
                return;
            }
            match self.bad_schreier_generator(i) {
                Some((res, j)) => {
                    let j = self.ensure_level(j, &res);
                    for l in i + 1..=j {
                        self.add_gen(l, res.clone());
                    }
                    i = j;
                }
                None => {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                }
            }
        }
    }

    fn bad_schreier_generator(&mut self, i: usize) -> Option<(Mat, usize)> {
        let npts = self.levels[i].orbit.len();
        let ngens = self.levels[i].gens.len();
        for a in 0..npts {
            for s in 0..ngens {
                if !self.levels[i].checked.insert((a as u32, s as u32)) {
                    continue;
                }
                let level = &self.levels[i];
                let img = level.gens[s].apply(&level.orbit[a]);
                let b = level.pos[&self.space.key(&img)] as usize;
                let h = level.uinv[b].mul(&level.gens[s].mul(&level.u[a]));
                if h == self.identity {
                    continue;
                }
                let (res, j) = self.sift(&h, i + 1);
                if res != self.identity {
                    return Some((res, j));
                }
            }
        }
        None
    }

    /// All elements, for small groups only.
    pub fn elements(&self, limit: u128) -> Option<Vec<Mat>> {
        if self.order() > limit {
            return None;
        }
        let mut out = vec![self.identity.clone()];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.u.len());
            for u in &level.u {
                for g in &out {
                    next.push(u.mul(g));
                }
            }
            out = next;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3_mod(m: u32) -> (Arc<PointSpace>, Vec<Mat>) {
        // permutation matrices of S3 acting on Z^3
        let a = Mat::from_rows(&[vec![0i64, 1, 0], vec![1, 0, 0], vec![0, 0, 1]], m);
        let b = Mat::from_rows(&[vec![0i64, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], m);
        (Arc::new(PointSpace::standard(3, m)), vec![a, b])
    }

    #[test]
    fn order_of_s3() {
        for m in [0, 3, 4] {
            let (sp, gens) = s3_mod(m);
            let c = Chain::from_gens(sp, m, &gens);
            assert_eq!(c.order(), 6);
            assert_eq!(c.elements(100).unwrap().len(), 6);
        }
    }

    #[test]
    fn order_of_gl2_f3() {
        let a = Mat::from_rows(&[vec![1i64, 1], vec![0, 1]], 3);
        let b = Mat::from_rows(&[vec![0i64, 1], vec![2, 0]], 3);
        let c = Mat::from_rows(&[vec![2i64, 0], vec![0, 1]], 3);
        let ch = Chain::from_gens(Arc::new(PointSpace::standard(2, 3)), 3, &[a, b, c]);
        assert_eq!(ch.order(), 48);
    }

    #[test]
    fn membership() {
        let (sp, gens) = s3_mod(0);
        let c = Chain::from_gens(sp, 0, &gens[..1]);
        assert_eq!(c.order(), 2);
        assert!(c.contains(&gens[0]));
        assert!(!c.contains(&gens[1]));
    }
}
