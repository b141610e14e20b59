//! Transfer of toral classes to the split finite group `G^F`, `F` the `q`-power Frobenius.
//!
//! With `p | q - 1` every element of `T[p]` is `F`-fixed and `F` acts trivially on
//! `N_G(E)/C_G(E)°`, so the `G^F`-classes inside one `G`-class are the conjugation
//! orbits of `N/C°` on `C/C°`.

use crate::arith::{gl_order, is_prime};
use crate::error::{AtlasError, Result};
use crate::lattice::{self, IMat};
use crate::mat::Mat;
use crate::serde_str;
use crate::toralclass::{ComponentGroup, ToralClass};
use serde::Serialize;

/// The split Frobenius `F = F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusSpec {
    pub q: u64,
    pub p: u8,
    pub split: bool,
}

impl FrobeniusSpec {
    pub fn new(q: u64, p: u8) -> Result<FrobeniusSpec> {
        if !is_prime(p as u64) {
            return Err(AtlasError::NonPrime(p as u64));
        }
        let p64 = p as u64;
        let ok = is_prime_power(q) && (q - 1).is_multiple_of(p64) && (p != 2 || (q - 1).is_multiple_of(4));
        if !ok {
            return Err(AtlasError::IncompatibleFrobenius { q, p: p64 });
        }
        Ok(FrobeniusSpec { q, p, split: true })
    }
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let Some(l) = (2..=q).find(|&d| q.is_multiple_of(d)) else { return false };
    let mut n = q;
    while n.is_multiple_of(l) {
        n /= l;
    }
    n == 1
}

/// Smallest prime `q` with `q = 1 mod p`, and `q = 1 mod 4` when `p = 2`.
pub fn choose_split_q(p: u8) -> u64 {
    let m = if p == 2 { 4 } else { p as u64 };
    (1..).map(|k| k * m + 1).find(|&q| is_prime(q)).unwrap()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CentralizerSkeleton {
    /// `det(x I - M_w)` on the cocharacters of the central torus of `C°`, constant term first.
    pub torus_char_poly: Vec<i64>,
    #[serde(rename = "subsystem")]
    pub subsystem_type: String,
    pub subsystem_roots: Vec<usize>,
    /// `|C_{C/C°}(w)|`.
    #[serde(serialize_with = "serde_str::display")]
    pub component_part: u128,
}

/// One `G^F`-class inside a toral `G`-class.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FiniteClassRecord {
    pub source_class: String,
    pub index: usize,
    /// Canonical coset representative of `w` in `C_W(E)/W(Phi_E)`, on `Y`.
    pub twist: Vec<Vec<i64>>,
    pub orbit_size: u64,
    pub centralizer_skeleton: CentralizerSkeleton,
    /// `|C_{N/C°}(w)|`.
    #[serde(serialize_with = "serde_str::display")]
    pub normalizer_component_part: u128,
}

/// Local structure of `C_{G^F}(E_w)` and `N_{G^F}(E_w)` from a record.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalStructure {
    pub q: u64,
    pub source_class: String,
    pub index: usize,
    pub central_torus_rank: usize,
    /// `|det(q I - M_w)|`.
    #[serde(serialize_with = "serde_str::display")]
    pub torus_order: u128,
    pub torus_char_poly: Vec<i64>,
    pub subsystem: String,
    pub subsystem_factors: Vec<String>,
    #[serde(serialize_with = "serde_str::display")]
    pub component_part: u128,
    #[serde(serialize_with = "serde_str::display")]
    pub normalizer_component_part: u128,
}

fn component_elements(tc: &ToralClass) -> Result<&[Mat]> {
    tc.component.elements().ok_or(AtlasError::BudgetExceeded {
        count: tc.component.order,
        budget: crate::toralclass::COMPONENT_LIMIT as u128,
    })
}

/// Orbits of the indices of `Q` under `x -> g x g^-1`, smallest index first.
fn conjugation_orbits(q: &ComponentGroup, elems: &[Mat], gens: &[Mat]) -> Vec<Vec<usize>> {
    let inv: Vec<Mat> = gens.iter().map(|g| g.inverse().expect("invertible")).collect();
    let mut orbit_of = vec![usize::MAX; elems.len()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..elems.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        orbit_of[start] = id;
        let mut orbit = vec![start];
        let mut h = 0;
        while h < orbit.len() {
            let x = &elems[orbit[h]];
            h += 1;
            for (g, gi) in gens.iter().zip(&inv) {
                let j = q.index_of(&g.mul(x).mul(gi)).expect("conjugate stays in the component group");
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    orbit.push(j);
                }
            }
        }
        orbit.sort();
        out.push(orbit);
    }
    out
}

/// Basis of the cocharacters of the central torus: `{lambda in Y : <alpha, lambda> = 0, alpha in Delta_E}`.
fn central_cocharacters(tc: &ToralClass) -> Vec<Vec<i128>> {
    let rd = &tc.component.rd;
    let rows: IMat = tc
        .centralizer
        .subsystem
        .simple_roots
        .iter()
        .map(|&i| rd.roots[i].iter().map(|&x| x as i128).collect())
        .collect();
    if rows.is_empty() {
        return (0..rd.rank).map(|i| (0..rd.rank).map(|j| (i == j) as i128).collect()).collect();
    }
    lattice::kernel_basis(&rows, rd.rank)
}

/// Matrix of `w` on the central torus cocharacters, in the given basis.
fn restrict(w: &Mat, basis: &[Vec<i128>]) -> IMat {
    let t = basis.len();
    if t == 0 {
        return Vec::new();
    }
    let r = basis[0].len();
    let images: Vec<Vec<i128>> = basis
        .iter()
        .map(|b| {
            let v: Vec<i32> = b.iter().map(|&x| x as i32).collect();
            w.apply(&v)[..r].iter().map(|&x| x as i128).collect()
        })
        .collect();
    // choose t coordinates on which the basis is independent
    let mut chosen: Vec<usize> = Vec::new();
    for c in 0..r {
        let mut trial = chosen.clone();
        trial.push(c);
        let m: IMat = basis.iter().map(|b| trial.iter().map(|&cc| b[cc]).collect()).collect();
        if lattice::hermite_rows(&m).len() == trial.len() {
            chosen = trial;
            if chosen.len() == t {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), t, "central torus basis is not independent");
    // B_R is t x t with columns = basis vectors; solve B_R M = W_R
    let b: IMat = chosen.iter().map(|&c| basis.iter().map(|v| v[c]).collect()).collect();
    let wr: IMat = chosen.iter().map(|&c| images.iter().map(|v| v[c]).collect()).collect();
    let det = lattice::det(&b);
    let adj = lattice::adjugate(&b);
    let prod = lattice::matmul(&adj, &wr);
    prod.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    assert_eq!(x % det, 0, "w does not preserve the central torus lattice");
                    x / det
                })
                .collect()
        })
        .collect()
}

fn torus_char_poly(tc: &ToralClass, w: &Mat) -> Vec<i64> {
    let basis = central_cocharacters(tc);
    if basis.is_empty() {
        return vec![1];
    }
    let m = restrict(w, &basis);
    lattice::charpoly(&m).into_iter().map(|c| c as i64).collect()
}

/// One record per `N/C°`-conjugation orbit on `C/C°`.
pub fn finite_classes(tc: &ToralClass, f: &FrobeniusSpec) -> Result<Vec<FiniteClassRecord>> {
    if tc.representative.p != f.p {
        return Err(AtlasError::IncompatibleFrobenius { q: f.q, p: tc.representative.p as u64 });
    }
    let q = &tc.component;
    let elems = component_elements(tc)?;
    let orbits = conjugation_orbits(q, elems, &tc.normalizer.generators);
    let inner = conjugation_orbits(q, elems, q.generators());
    let mut class_size = vec![0u128; elems.len()];
    for o in &inner {
        for &i in o {
            class_size[i] = o.len() as u128;
        }
    }
    let n_mod_c0 = tc.normalizer_order / tc.centralizer.subsystem.weyl_order;
    Ok(orbits
        .iter()
        .enumerate()
        .map(|(index, o)| {
            let w = &elems[o[0]];
            FiniteClassRecord {
                source_class: tc.id.clone(),
                index,
                twist: w.rows(),
                orbit_size: o.len() as u64,
                centralizer_skeleton: CentralizerSkeleton {
                    torus_char_poly: torus_char_poly(tc, w),
                    subsystem_type: tc.centralizer.type_string.clone(),
                    subsystem_roots: tc.centralizer.subsystem.roots.clone(),
                    component_part: q.order / class_size[o[0]],
                },
                normalizer_component_part: n_mod_c0 / o.len() as u128,
            }
        })
        .collect())
}

pub fn finite_local_structure(tc: &ToralClass, rec: &FiniteClassRecord, f: &FrobeniusSpec) -> LocalStructure {
    let poly = &rec.centralizer_skeleton.torus_char_poly;
    let coeffs: Vec<i128> = poly.iter().map(|&c| c as i128).collect();
    LocalStructure {
        q: f.q,
        source_class: rec.source_class.clone(),
        index: rec.index,
        central_torus_rank: poly.len() - 1,
        torus_order: lattice::eval_poly(&coeffs, f.q as i128).unsigned_abs(),
        torus_char_poly: poly.clone(),
        subsystem: rec.centralizer_skeleton.subsystem_type.clone(),
        subsystem_factors: tc.centralizer.subsystem.factors.iter().map(|x| x.ty.to_string()).collect(),
        component_part: rec.centralizer_skeleton.component_part,
        normalizer_component_part: rec.normalizer_component_part,
    }
}

/// `|N_W(E)/C_W(E)| = |GL_k(p)|`.
pub fn aut_full_check(tc: &ToralClass) -> bool {
    gl_order(tc.rank as u32, tc.representative.p as u64) == Some(tc.normalizer_quotient_order)
}

/// Orbit count of `N`-conjugation on the stored coset representatives, using only
/// membership in `W(Phi_E)` to identify cosets.
pub fn brute_force_record_count(tc: &ToralClass) -> Result<usize> {
    let q = &tc.component;
    let elems = component_elements(tc)?;
    let find = |y: &Mat| -> usize {
        (0..elems.len())
            .find(|&j| q.in_subsystem(&elems[j].inverse().expect("invertible").mul(y)))
            .expect("conjugate lies in some coset")
    };
    let mut parent: Vec<usize> = (0..elems.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for n in &tc.normalizer.generators {
        let ni = n.inverse().expect("invertible");
        for i in 0..elems.len() {
            let j = find(&n.mul(&elems[i]).mul(&ni));
            let (a, b) = (root(&mut parent, i), root(&mut parent, j));
            parent[a] = b;
        }
    }
    Ok((0..elems.len()).filter(|&i| root(&mut parent, i) == i).count())
}
