//! Root data of simple groups in every isogeny form.
//!
//! Conventions: Bourbaki numbering; `cartan[i][j] = <alpha_i^vee, alpha_j>`.
//! The cocharacter lattice `Y` is given in a Hermite-reduced basis and `X` in
//! the dual basis, so the pairing matrix is the identity.

use crate::error::{AtlasError, Result};
use crate::lattice::{self, IMat};
use crate::mat::Mat;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LieType {
    pub family: Family,
    pub rank: usize,
}

impl LieType {
    pub fn new(family: Family, rank: usize) -> Result<LieType> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(LieType { family, rank })
        } else {
            Err(AtlasError::IllegalType(format!("{:?}{}", family, rank)))
        }
    }

    pub fn exceptional() -> Vec<LieType> {
        vec![
            LieType { family: Family::G, rank: 2 },
            LieType { family: Family::F, rank: 4 },
            LieType { family: Family::E, rank: 6 },
            LieType { family: Family::E, rank: 7 },
            LieType { family: Family::E, rank: 8 },
        ]
    }

    pub fn is_exceptional(&self) -> bool {
        matches!(self.family, Family::E | Family::F | Family::G)
    }

    /// Degrees of the basic invariants of the Weyl group.
    pub fn degrees(&self) -> Vec<u64> {
        let n = self.rank as u64;
        match (self.family, self.rank) {
            (Family::A, _) => (2..=n + 1).collect(),
            (Family::B, _) | (Family::C, _) => (1..=n).map(|i| 2 * i).collect(),
            (Family::D, _) => {
                let mut d: Vec<u64> = (1..n).map(|i| 2 * i).collect();
                d.push(n);
                d
            }
            (Family::E, 6) => vec![2, 5, 6, 8, 9, 12],
            (Family::E, 7) => vec![2, 6, 8, 10, 12, 14, 18],
            (Family::E, _) => vec![2, 8, 12, 14, 18, 20, 24, 30],
            (Family::F, _) => vec![2, 6, 8, 12],
            (Family::G, _) => vec![2, 6],
        }
    }

    pub fn weyl_order(&self) -> u128 {
        self.degrees().iter().map(|&d| d as u128).product()
    }

    pub fn num_roots(&self) -> usize {
        self.degrees().iter().map(|&d| (d - 1) as usize).sum::<usize>() * 2
    }

    pub fn dim(&self) -> usize {
        self.num_roots() + self.rank
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for LieType {
    type Err = AtlasError;
    fn from_str(s: &str) -> Result<LieType> {
        let s = s.trim();
        let bad = || AtlasError::IllegalType(s.to_string());
        let mut chars = s.chars();
        let fam = match chars.next().ok_or_else(bad)?.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().trim_start_matches('_').parse().map_err(|_| bad())?;
        LieType::new(fam, rank)
    }
}

/// Which lattice between the coroot and coweight lattices is `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IsogenyKind {
    SimplyConnected,
    Adjoint,
    /// Quotient of the simply connected group by the subgroup of order `d`
    /// of its centre (cyclic centres only).
    Intermediate(u32),
    HalfSpinPlus,
    HalfSpinMinus,
    SpecialOrthogonal,
}

impl fmt::Display for IsogenyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsogenyKind::SimplyConnected => write!(f, "sc"),
            IsogenyKind::Adjoint => write!(f, "ad"),
            IsogenyKind::Intermediate(d) => write!(f, "int{}", d),
            IsogenyKind::HalfSpinPlus => write!(f, "hs+"),
            IsogenyKind::HalfSpinMinus => write!(f, "hs-"),
            IsogenyKind::SpecialOrthogonal => write!(f, "so"),
        }
    }
}

impl FromStr for IsogenyKind {
    type Err = AtlasError;
    fn from_str(s: &str) -> Result<IsogenyKind> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "sc" | "simply-connected" => IsogenyKind::SimplyConnected,
            "ad" | "adjoint" => IsogenyKind::Adjoint,
            "hs+" | "half-spin-plus" => IsogenyKind::HalfSpinPlus,
            "hs-" | "half-spin-minus" => IsogenyKind::HalfSpinMinus,
            "so" | "special-orthogonal" => IsogenyKind::SpecialOrthogonal,
            _ => {
                let d = t
                    .strip_prefix("int")
                    .or_else(|| t.strip_prefix("intermediate"))
                    .and_then(|d| d.trim_matches(|c| c == '(' || c == ')' || c == ':').parse().ok())
                    .ok_or_else(|| AtlasError::IllegalIsogeny { ty: "?".into(), isogeny: s.into() })?;
                IsogenyKind::Intermediate(d)
            }
        })
    }
}

/// Invariant factors (entries > 1) of the two finite lattice quotients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FundamentalGroups {
    /// `X / Z Phi`.
    pub x_mod_roots: Vec<u64>,
    /// `Y / Z Phi^vee`, the fundamental group of the chosen form.
    pub y_mod_coroots: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    pub ty: LieType,
    pub isogeny: IsogenyKind,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    /// Squared lengths of the simple roots (short roots have length 2).
    pub lengths: Vec<i64>,
    /// Roots in simple-root coordinates: positive roots by height, then negatives.
    pub roots_simple: Vec<Vec<i64>>,
    /// Roots in the basis of `X`.
    pub roots: Vec<Vec<i64>>,
    /// Coroots in the basis of `Y`, aligned with `roots`.
    pub coroots: Vec<Vec<i64>>,
    /// `<chi, lambda> = chi^T P lambda`; always the identity here.
    pub pairing: Vec<Vec<i64>>,
    /// Basis of `Y` in simple-coroot coordinates, as integer rows over `y_denominator`.
    pub y_basis: Vec<Vec<i64>>,
    pub y_denominator: i64,
    pub fundamental: FundamentalGroups,
    root_index: HashMap<Vec<i64>, usize>,
}

fn diagram(ty: LieType) -> (Vec<i64>, Vec<(usize, usize)>) {
    let n = ty.rank;
    let chain = |n: usize| (0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>();
    match ty.family {
        Family::A => (vec![2; n], chain(n)),
        Family::B => {
            let mut d = vec![4; n];
            d[n - 1] = 2;
            (d, chain(n))
        }
        Family::C => {
            let mut d = vec![2; n];
            d[n - 1] = 4;
            (d, chain(n))
        }
        Family::D => {
            let mut e: Vec<(usize, usize)> = (0..n - 2).map(|i| (i, i + 1)).collect();
            e.push((n - 3, n - 1));
            (vec![2; n], e)
        }
        Family::E => {
            let e = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
                .into_iter()
                .filter(|&(a, b)| a < n && b < n)
                .collect();
            (vec![2; n], e)
        }
        Family::F => (vec![4, 4, 2, 2], chain(4)),
        Family::G => (vec![2, 6], vec![(0, 1)]),
    }
}

/// Bourbaki Cartan matrix, `a[i][j] = <alpha_i^vee, alpha_j>`.
pub fn cartan_matrix(ty: LieType) -> Vec<Vec<i64>> {
    let (d, edges) = diagram(ty);
    let n = ty.rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j) in edges {
        let ip = -(d[i].max(d[j])) / 2;
        a[i][j] = 2 * ip / d[i];
        a[j][i] = 2 * ip / d[j];
    }
    a
}

fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect();
    let mut set: HashSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut k = 0;
    while k < roots.len() {
        let beta = roots[k].clone();
        for i in 0..n {
            let pair: i64 = (0..n).map(|j| beta[j] * cartan[i][j]).sum();
            let mut p = 0;
            let mut down = beta.clone();
            loop {
                down[i] -= 1;
                if set.contains(&down) {
                    p += 1;
                } else {
                    break;
                }
            }
            if p - pair > 0 {
                let mut up = beta.clone();
                up[i] += 1;
                if set.insert(up.clone()) {
                    roots.push(up);
                }
            }
        }
        k += 1;
    }
    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    roots
}

fn coweight_order(adj_col: &[i128], det: i128) -> i128 {
    let g = adj_col.iter().fold(det, |g, &x| gcd128(g, x));
    det / g
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Builds the root datum of the given type and isogeny form.
pub fn build_root_datum(ty: LieType, isogeny: IsogenyKind) -> Result<RootDatum> {
    let r = ty.rank;
    let cartan = cartan_matrix(ty);
    let (lengths, _) = diagram(ty);
    let illegal = || AtlasError::IllegalIsogeny { ty: ty.to_string(), isogeny: isogeny.to_string() };

    // coweights: columns of (A^T)^{-1} = adj(A^T) / det
    let at: IMat = lattice::transpose(&lattice::to_imat(&cartan));
    let det = lattice::det(&at);
    let adj = lattice::adjugate(&at);
    let col = |i: usize| -> Vec<i128> { (0..r).map(|k| adj[k][i]).collect() };

    let mut extra: Vec<Vec<i128>> = Vec::new();
    let d_even = ty.family == Family::D && ty.rank.is_multiple_of(2);
    match isogeny {
        IsogenyKind::SimplyConnected => {}
        IsogenyKind::Adjoint => extra.extend((0..r).map(col)),
        IsogenyKind::Intermediate(d) => {
            let d = d as i128;
            if d <= 0 || det % d != 0 {
                return Err(illegal());
            }
            if d == det {
                extra.extend((0..r).map(col));
            } else if d > 1 {
                if d_even {
                    return Err(illegal());
                }
                let i = (0..r).find(|&i| coweight_order(&col(i), det) == det).ok_or_else(illegal)?;
                extra.push(col(i).iter().map(|x| x * (det / d)).collect());
            }
        }
        IsogenyKind::HalfSpinPlus | IsogenyKind::HalfSpinMinus => {
            if !d_even {
                return Err(illegal());
            }
            let i = if isogeny == IsogenyKind::HalfSpinPlus { r - 1 } else { r - 2 };
            extra.push(col(i));
        }
        IsogenyKind::SpecialOrthogonal => {
            if ty.family != Family::D {
                return Err(illegal());
            }
            extra.push(col(0));
        }
    }

    // lattice det * Y, generated by det * e_i and det * (extra coweights)
    let mut gens: IMat = (0..r)
        .map(|i| (0..r).map(|j| if i == j { det } else { 0 }).collect())
        .collect();
    gens.extend(extra);
    let h = lattice::hermite_rows(&gens);
    assert_eq!(h.len(), r);
    // reduce the common denominator
    let g = h.iter().flatten().fold(det, |g, &x| gcd128(g, x));
    let den = det / g;
    let h: IMat = h.iter().map(|row| row.iter().map(|x| x / g).collect()).collect();

    // basis vectors y_j = h[j] / den (coroot coords). Coroot c in Y coords: z with h^T z = den c.
    let ht = lattice::transpose(&h);
    let hdet = lattice::det(&ht);
    let hadj = lattice::adjugate(&ht);
    let to_y = |c: &[i128]| -> Vec<i64> {
        let v = lattice::matvec(&hadj, &c.iter().map(|x| x * den).collect::<Vec<_>>());
        v.iter()
            .map(|x| {
                assert_eq!(x % hdet, 0, "coroot not in Y");
                (x / hdet) as i64
            })
            .collect()
    };
    let cartan_i = lattice::to_imat(&cartan);
    // root (simple coords c) in X coords: x_j = sum_k h[j][k] (A c)_k / den
    let to_x = |c: &[i64]| -> Vec<i64> {
        let ac = lattice::matvec(&cartan_i, &c.iter().map(|&x| x as i128).collect::<Vec<_>>());
        let v = lattice::matvec(&h, &ac);
        v.iter()
            .map(|x| {
                assert_eq!(x % den, 0, "root not in X");
                (x / den) as i64
            })
            .collect()
    };

    let pos = positive_roots(&cartan);
    let mut roots_simple = pos.clone();
    roots_simple.extend(pos.iter().map(|v| v.iter().map(|x| -x).collect::<Vec<_>>()));
    let mut roots = Vec::with_capacity(roots_simple.len());
    let mut coroots = Vec::with_capacity(roots_simple.len());
    for c in &roots_simple {
        // squared length (alpha, alpha) with (alpha_i, alpha_j) = a[i][j] d_i / 2
        let mut len2 = 0i64;
        for i in 0..r {
            for j in 0..r {
                len2 += c[i] * c[j] * cartan[i][j] * lengths[i];
            }
        }
        len2 /= 2;
        let cv: Vec<i128> = (0..r)
            .map(|j| {
                let num = c[j] * lengths[j];
                assert_eq!(num % len2, 0);
                (num / len2) as i128
            })
            .collect();
        roots.push(to_x(c));
        coroots.push(to_y(&cv));
    }

    let simple_x: IMat = (0..r).map(|i| roots[i].iter().map(|&x| x as i128).collect()).collect();
    let simple_y: IMat = (0..r).map(|i| coroots[i].iter().map(|&x| x as i128).collect()).collect();
    let inv = |m: &IMat| -> Vec<u64> {
        lattice::smith_diagonal(m).into_iter().filter(|&d| d > 1).map(|d| d as u64).collect()
    };
    let fundamental = FundamentalGroups { x_mod_roots: inv(&simple_x), y_mod_coroots: inv(&simple_y) };

    let root_index = roots.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let pairing = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
    Ok(RootDatum {
        ty,
        isogeny,
        rank: r,
        cartan,
        lengths,
        roots_simple,
        roots,
        coroots,
        pairing,
        y_basis: h.iter().map(|row| row.iter().map(|&x| x as i64).collect()).collect(),
        y_denominator: den as i64,
        fundamental,
        root_index,
    })
}

impl RootDatum {
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.roots.len() + self.rank
    }

    /// Index of the negative of root `i`.
    pub fn neg(&self, i: usize) -> usize {
        let n = self.num_positive();
        if i < n {
            i + n
        } else {
            i - n
        }
    }

    pub fn root_index(&self, x: &[i64]) -> Option<usize> {
        self.root_index.get(x).copied()
    }

    /// `<chi, lambda>` for `chi` in `X` and `lambda` in `Y` coordinates.
    #[inline]
    pub fn pair(chi: &[i64], lambda: &[i64]) -> i64 {
        chi.iter().zip(lambda).map(|(a, b)| a * b).sum()
    }

    /// Squared length of root `i` (short roots have length 2).
    pub fn root_length(&self, i: usize) -> i64 {
        let c = &self.roots_simple[i];
        let r = self.rank;
        let mut len2 = 0;
        for a in 0..r {
            for b in 0..r {
                len2 += c[a] * c[b] * self.cartan[a][b] * self.lengths[a];
            }
        }
        len2 / 2
    }

    /// Inner product of roots `i` and `j` in the invariant form.
    pub fn root_inner(&self, i: usize, j: usize) -> i64 {
        let (ci, cj) = (&self.roots_simple[i], &self.roots_simple[j]);
        let r = self.rank;
        let mut s = 0;
        for a in 0..r {
            for b in 0..r {
                s += ci[a] * cj[b] * self.cartan[a][b] * self.lengths[a];
            }
        }
        s / 2
    }

    /// The reflection `s_alpha` acting on `Y`: `lambda - <alpha, lambda> alpha^vee`.
    pub fn reflection(&self, i: usize) -> Mat {
        let r = self.rank;
        let (a, av) = (&self.roots[i], &self.coroots[i]);
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|row| (0..r).map(|col| (row == col) as i64 - av[row] * a[col]).collect())
            .collect();
        Mat::from_rows(&rows, 0)
    }

    /// Fundamental weight `omega_i` in `X` coordinates, if it lies in `X`.
    pub fn fundamental_weight(&self, i: usize) -> Option<Vec<i64>> {
        let den = self.y_denominator;
        let v: Vec<i64> = (0..self.rank).map(|j| self.y_basis[j][i]).collect();
        if v.iter().all(|x| x % den == 0) {
            Some(v.iter().map(|x| x / den).collect())
        } else {
            None
        }
    }
}

/// Torsion primes of the group, per family and isogeny form.
pub fn torsion_primes(ty: LieType, isogeny: IsogenyKind) -> Result<BTreeSet<u64>> {
    let rd = build_root_datum(ty, isogeny)?;
    let mut out: BTreeSet<u64> = match ty.family {
        Family::A | Family::C => BTreeSet::new(),
        Family::B => {
            if ty.rank >= 3 {
                [2].into()
            } else {
                BTreeSet::new()
            }
        }
        Family::D => {
            if ty.rank >= 4 {
                [2].into()
            } else {
                BTreeSet::new()
            }
        }
        Family::G => [2].into(),
        Family::F => [2, 3].into(),
        Family::E => {
            if ty.rank == 8 {
                [2, 3, 5].into()
            } else {
                [2, 3].into()
            }
        }
    };
    for d in &rd.fundamental.y_mod_coroots {
        out.extend(crate::arith::prime_factors(*d));
    }
    Ok(out)
}

/// Simple reflections acting on `Y`, one integer matrix per simple root.
pub fn weyl_generators(rd: &RootDatum) -> Vec<Mat> {
    (0..rd.rank).map(|i| rd.reflection(i)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ModuleName {
    Adjoint,
    Minimal,
}

#[derive(Clone, Debug)]
pub struct WeightSystem {
    pub module: ModuleName,
    /// Weights in `X` coordinates with multiplicities.
    pub weights: Vec<(Vec<i64>, u32)>,
}

impl WeightSystem {
    pub fn dim(&self) -> u32 {
        self.weights.iter().map(|(_, m)| m).sum()
    }
}

/// Weight multiset of the adjoint module or the minimal faithful module.
pub fn weight_system(rd: &RootDatum, module: ModuleName) -> Result<WeightSystem> {
    let r = rd.rank;
    match module {
        ModuleName::Adjoint => {
            let mut weights: Vec<(Vec<i64>, u32)> = rd.roots.iter().map(|v| (v.clone(), 1)).collect();
            weights.push((vec![0; r], r as u32));
            Ok(WeightSystem { module, weights })
        }
        ModuleName::Minimal => {
            let unsupported = || AtlasError::UnsupportedModule { ty: rd.ty.to_string(), module: "minimal".into() };
            let (node, zeros) = match (rd.ty.family, rd.ty.rank) {
                (Family::G, 2) => (0, 1),
                (Family::F, 4) => (3, 2),
                (Family::E, 6) => (0, 0),
                (Family::E, 7) => (6, 0),
                _ => return Err(unsupported()),
            };
            let w = rd.fundamental_weight(node).ok_or_else(unsupported)?;
            let mut orbit = vec![w.clone()];
            let mut seen: HashSet<Vec<i64>> = [w].into();
            let mut k = 0;
            while k < orbit.len() {
                for i in 0..r {
                    // s_i(chi) = chi - <chi, alpha_i^vee> alpha_i
                    let chi = &orbit[k];
                    let c = RootDatum::pair(chi, &rd.coroots[i]);
                    let img: Vec<i64> = chi.iter().zip(&rd.roots[i]).map(|(x, a)| x - c * a).collect();
                    if seen.insert(img.clone()) {
                        orbit.push(img);
                    }
                }
                k += 1;
            }
            orbit.sort();
            let mut weights: Vec<(Vec<i64>, u32)> = orbit.into_iter().map(|v| (v, 1)).collect();
            if zeros > 0 {
                weights.push((vec![0; r], zeros));
            }
            Ok(WeightSystem { module, weights })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> LieType {
        s.parse().unwrap()
    }

    #[test]
    fn root_counts_match_dimensions() {
        for (s, dim) in [("G2", 14), ("F4", 52), ("E6", 78), ("E7", 133), ("E8", 248), ("B3", 21), ("D4", 28)] {
            let rd = build_root_datum(t(s), IsogenyKind::SimplyConnected).unwrap();
            assert_eq!(rd.dim(), dim, "{}", s);
            assert_eq!(rd.num_roots(), t(s).num_roots());
        }
    }

    #[test]
    fn coroot_pairing_is_two() {
        for s in ["G2", "F4", "E6", "B4", "C3"] {
            for iso in [IsogenyKind::SimplyConnected, IsogenyKind::Adjoint] {
                let rd = build_root_datum(t(s), iso).unwrap();
                for i in 0..rd.num_roots() {
                    assert_eq!(RootDatum::pair(&rd.roots[i], &rd.coroots[i]), 2);
                    for j in 0..rd.num_roots() {
                        let c = RootDatum::pair(&rd.roots[j], &rd.coroots[i]);
                        assert!((-3..=3).contains(&c));
                    }
                }
            }
        }
    }

    #[test]
    fn fundamental_groups() {
        let a1 = build_root_datum(t("A1"), IsogenyKind::SimplyConnected).unwrap();
        assert_eq!(a1.fundamental.x_mod_roots, vec![2]);
        assert_eq!(a1.fundamental.y_mod_coroots, Vec::<u64>::new());
        let e6 = build_root_datum(t("E6"), IsogenyKind::SimplyConnected).unwrap();
        assert_eq!(e6.fundamental.x_mod_roots, vec![3]);
        let e6ad = build_root_datum(t("E6"), IsogenyKind::Adjoint).unwrap();
        assert_eq!(e6ad.fundamental.y_mod_coroots, vec![3]);
        assert!(e6ad.fundamental.x_mod_roots.is_empty());
        let e8 = build_root_datum(t("E8"), IsogenyKind::Adjoint).unwrap();
        assert!(e8.fundamental.x_mod_roots.is_empty());
        let d4 = build_root_datum(t("D4"), IsogenyKind::Adjoint).unwrap();
        assert_eq!(d4.fundamental.y_mod_coroots, vec![2, 2]);
        let a3 = build_root_datum(t("A3"), IsogenyKind::Intermediate(2)).unwrap();
        assert_eq!(a3.fundamental.y_mod_coroots, vec![2]);
        assert_eq!(a3.fundamental.x_mod_roots, vec![2]);
    }

    #[test]
    fn d_even_labels() {
        for iso in [IsogenyKind::HalfSpinPlus, IsogenyKind::HalfSpinMinus, IsogenyKind::SpecialOrthogonal] {
            let rd = build_root_datum(t("D4"), iso).unwrap();
            assert_eq!(rd.fundamental.y_mod_coroots, vec![2]);
        }
        assert!(build_root_datum(t("D4"), IsogenyKind::Intermediate(2)).is_err());
        assert!(build_root_datum(t("D5"), IsogenyKind::HalfSpinPlus).is_err());
        assert!(build_root_datum(t("E6"), IsogenyKind::Intermediate(2)).is_err());
    }

    #[test]
    fn torsion_lists() {
        let tp = |s: &str, iso| torsion_primes(t(s), iso).unwrap().into_iter().collect::<Vec<_>>();
        assert_eq!(tp("E8", IsogenyKind::Adjoint), vec![2, 3, 5]);
        assert_eq!(tp("G2", IsogenyKind::Adjoint), vec![2]);
        assert!(tp("A1", IsogenyKind::SimplyConnected).is_empty());
        assert_eq!(tp("A5", IsogenyKind::Adjoint), vec![2, 3]);
        assert!(tp("C3", IsogenyKind::SimplyConnected).is_empty());
        assert_eq!(tp("C3", IsogenyKind::Adjoint), vec![2]);
    }

    #[test]
    fn minimal_modules() {
        let g2 = build_root_datum(t("G2"), IsogenyKind::Adjoint).unwrap();
        let ws = weight_system(&g2, ModuleName::Minimal).unwrap();
        assert_eq!(ws.dim(), 7);
        // the six nonzero weights are the short roots
        for (w, m) in &ws.weights {
            if w.iter().any(|&x| x != 0) {
                assert_eq!(*m, 1);
                let i = g2.root_index(w).unwrap();
                assert_eq!(g2.root_length(i), 2);
            }
        }
        let e7 = build_root_datum(t("E7"), IsogenyKind::SimplyConnected).unwrap();
        let ws = weight_system(&e7, ModuleName::Minimal).unwrap();
        assert_eq!(ws.weights.len(), 56);
        assert!(ws.weights.iter().all(|(_, m)| *m == 1));
        let f4 = build_root_datum(t("F4"), IsogenyKind::Adjoint).unwrap();
        assert_eq!(weight_system(&f4, ModuleName::Minimal).unwrap().dim(), 26);
        let e6 = build_root_datum(t("E6"), IsogenyKind::SimplyConnected).unwrap();
        assert_eq!(weight_system(&e6, ModuleName::Minimal).unwrap().dim(), 27);
        let e8 = build_root_datum(t("E8"), IsogenyKind::Adjoint).unwrap();
        assert!(weight_system(&e8, ModuleName::Minimal).is_err());
        let e7ad = build_root_datum(t("E7"), IsogenyKind::Adjoint).unwrap();
        assert!(weight_system(&e7ad, ModuleName::Minimal).is_err());
    }

    #[test]
    fn reflections_are_involutions_preserving_roots() {
        let rd = build_root_datum(t("F4"), IsogenyKind::Adjoint).unwrap();
        for g in weyl_generators(&rd) {
            assert!(g.mul(&g).is_identity());
            assert_eq!(g.det().abs(), 1);
            for cv in &rd.coroots {
                let v: Vec<i32> = cv.iter().map(|&x| x as i32).collect();
                let img = g.apply(&v);
                let img: Vec<i64> = img[..rd.rank].iter().map(|&x| x as i64).collect();
                assert!(rd.coroots.contains(&img));
            }
        }
    }
}
