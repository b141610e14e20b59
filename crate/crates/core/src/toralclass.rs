//! Toral elementary abelian `p`-subgroups: Weyl orbits of subspaces of `Y/pY`
//! together with centralizer data, component groups and element distributions.

use crate::arith::{gl_order, is_power_of, prime_factors};
use crate::atlasdata::{char_group, load_tables, Atlas, DATA_VERSION};
use crate::canon::Node;
use crate::cyclotomic::Cyclotomic;
use crate::error::{AtlasError, Result};
use crate::fp::{reduce_mod, Field, FpMat, FpVec, SubspaceRep};
use crate::group::Chain;
use crate::lattice::{self, IMat};
use crate::mat::{Mat, MAX_RANK};
use crate::rootdata::{weight_system, Family, LieType, ModuleName, RootDatum};
use crate::serde_str;
use crate::weylact::{classify_with, fix_pointwise, ClassifyOptions, ModMatrixGroup, StabilizerHandle};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

/// Component groups larger than this are not enumerated.
pub const COMPONENT_LIMIT: usize = 1 << 14;

/// A simple factor of the centralizer root subsystem.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimpleFactor {
    #[serde(rename = "type", serialize_with = "serde_str::display")]
    pub ty: LieType,
    /// Indices into `RootDatum::roots`.
    pub simple_roots: Vec<usize>,
    /// Nontrivial Smith invariants of the factor's simple coroots in `Y`.
    pub lattice_invariants: Vec<u64>,
}

/// Root subsystem `Phi_E` of `C_G(E)`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Subsystem {
    pub roots: Vec<usize>,
    pub simple_roots: Vec<usize>,
    pub factors: Vec<SimpleFactor>,
    pub lattice_invariants: Vec<u64>,
    #[serde(serialize_with = "serde_str::display")]
    pub weyl_order: u128,
}

impl Subsystem {
    pub fn type_string(&self) -> String {
        if self.factors.is_empty() {
            return "1".into();
        }
        let mut counts: BTreeMap<LieType, usize> = BTreeMap::new();
        for f in &self.factors {
            *counts.entry(f.ty).or_default() += 1;
        }
        counts
            .iter()
            .rev()
            .map(|(t, &m)| if m == 1 { t.to_string() } else { format!("{}^{}", t, m) })
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CentralizerData {
    #[serde(rename = "type")]
    pub type_string: String,
    pub subsystem: Subsystem,
    pub dimension: usize,
    pub central_torus_rank: usize,
    #[serde(serialize_with = "serde_str::display")]
    pub weyl_centralizer_order: u128,
    #[serde(serialize_with = "serde_str::display")]
    pub component_group_order: u128,
    /// Primary invariants when the component group is abelian.
    pub component_group_invariants: Option<Vec<u64>>,
    /// Canonical coset representatives generating the component group, as integer matrices on `Y`.
    pub component_group_generators: Vec<Vec<Vec<i64>>>,
}

/// Invariants of a single element of order `p` in the torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementSignature {
    pub element_order: u32,
    pub centralizer_dimension: i64,
    pub adjoint_trace: Cyclotomic,
    pub minimal_trace: Option<Cyclotomic>,
    pub label: String,
    /// Whether the label came from the character tables.
    pub tabulated: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistributionEntry {
    #[serde(flatten)]
    pub signature: ElementSignature,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimensionCheck {
    pub from_roots: i64,
    pub from_traces: i64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ToralClass {
    pub id: String,
    pub rank: usize,
    pub representative: SubspaceRep,
    #[serde(serialize_with = "serde_str::display")]
    pub orbit_size: u128,
    #[serde(serialize_with = "serde_str::display")]
    pub normalizer_order: u128,
    pub centralizer: CentralizerData,
    #[serde(serialize_with = "serde_str::display")]
    pub normalizer_quotient_order: u128,
    /// Matrices in `GL_k(p)` on the basis of the representative; column `i` is the image of row `i`.
    pub normalizer_quotient_generators: Vec<Vec<Vec<u8>>>,
    /// The normalizer induces all of `GL(E)`.
    pub aut_full: bool,
    pub distribution: Vec<DistributionEntry>,
    pub dimension_check: Option<DimensionCheck>,
    #[serde(skip)]
    pub normalizer: StabilizerHandle,
    #[serde(skip)]
    pub component: Arc<ComponentGroup>,
}

/// Roots of `rd` vanishing on `E` modulo `p`.
pub fn centralizer_subsystem(rd: &RootDatum, e: &SubspaceRep) -> Vec<usize> {
    let rows = e.rows();
    let p = e.p as i64;
    (0..rd.num_roots())
        .filter(|&i| {
            rows.iter().all(|b| {
                let s: i64 = rd.roots[i].iter().zip(b.iter()).map(|(a, &x)| a * x as i64).sum();
                s.rem_euclid(p) == 0
            })
        })
        .collect()
}

/// Simple roots of a closed subsystem given by root indices.
pub fn simple_system(rd: &RootDatum, roots: &[usize]) -> Vec<usize> {
    let npos = rd.num_positive();
    let pos: Vec<usize> = roots.iter().copied().filter(|&i| i < npos).collect();
    let in_pos: std::collections::HashSet<usize> = pos.iter().copied().collect();
    pos.iter()
        .copied()
        .filter(|&a| {
            !pos.iter().any(|&b| {
                let d: Vec<i64> = rd.roots[a].iter().zip(&rd.roots[b]).map(|(x, y)| x - y).collect();
                rd.root_index(&d).is_some_and(|c| in_pos.contains(&c))
            })
        })
        .collect()
}

fn smith_invariants(rd: &RootDatum, simple: &[usize]) -> Vec<u64> {
    if simple.is_empty() {
        return Vec::new();
    }
    let m: IMat = simple.iter().map(|&i| rd.coroots[i].iter().map(|&x| x as i128).collect()).collect();
    lattice::smith_diagonal(&m).into_iter().filter(|&d| d.abs() > 1).map(|d| d.unsigned_abs() as u64).collect()
}

fn reflect(rd: &RootDatum, beta: usize, alpha: &[i64]) -> Vec<i64> {
    let c = RootDatum::pair(alpha, &rd.coroots[beta]);
    alpha.iter().zip(&rd.roots[beta]).map(|(a, b)| a - c * b).collect()
}

fn identify(n: usize, total: usize, short: usize, two_lengths: bool) -> Result<LieType> {
    let t = |f, r| LieType::new(f, r);
    if !two_lengths {
        return match total {
            _ if total == n * (n + 1) => t(Family::A, n),
            _ if n >= 4 && total == 2 * n * (n - 1) => t(Family::D, n),
            72 if n == 6 => t(Family::E, 6),
            126 if n == 7 => t(Family::E, 7),
            240 if n == 8 => t(Family::E, 8),
            _ => Err(AtlasError::Internal(format!("unrecognised simply laced system: rank {}, {} roots", n, total))),
        };
    }
    match (n, total) {
        (2, 8) => t(Family::B, 2),
        (2, 12) => t(Family::G, 2),
        (4, 48) => t(Family::F, 4),
        _ if total == 2 * n * n => t(if short == 2 * n { Family::B } else { Family::C }, n),
        _ => Err(AtlasError::Internal(format!("unrecognised system: rank {}, {} roots", n, total))),
    }
}

/// Splits a simple system into irreducible factors and identifies each.
pub fn subsystem_data(rd: &RootDatum, roots: Vec<usize>) -> Result<Subsystem> {
    let simple = simple_system(rd, &roots);
    let k = simple.len();
    let mut comp = vec![usize::MAX; k];
    let mut ncomp = 0;
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = ncomp;
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in 0..k {
                if comp[b] == usize::MAX && rd.root_inner(simple[a], simple[b]) != 0 {
                    comp[b] = ncomp;
                    stack.push(b);
                }
            }
        }
        ncomp += 1;
    }
    let mut factors = Vec::new();
    let mut weyl_order: u128 = 1;
    for c in 0..ncomp {
        let delta: Vec<usize> = (0..k).filter(|&i| comp[i] == c).map(|i| simple[i]).collect();
        let mut seen: std::collections::HashSet<usize> = delta.iter().copied().collect();
        let mut queue: Vec<usize> = delta.clone();
        let mut h = 0;
        while h < queue.len() {
            let a = queue[h];
            h += 1;
            for &b in &delta {
                let img = reflect(rd, b, &rd.roots[a]);
                let j = rd.root_index(&img).ok_or_else(|| AtlasError::Internal("reflection left the root system".into()))?;
                if seen.insert(j) {
                    queue.push(j);
                }
            }
        }
        let lens: Vec<i64> = queue.iter().map(|&i| rd.root_length(i)).collect();
        let min = *lens.iter().min().unwrap();
        let short = lens.iter().filter(|&&l| l == min).count();
        let ty = identify(delta.len(), queue.len(), short, short != queue.len())?;
        weyl_order *= ty.weyl_order();
        factors.push(SimpleFactor { ty, lattice_invariants: smith_invariants(rd, &delta), simple_roots: delta });
    }
    factors.sort_by(|a, b| b.ty.cmp(&a.ty).then(a.simple_roots.cmp(&b.simple_roots)));
    let lattice_invariants = smith_invariants(rd, &simple);
    Ok(Subsystem { roots, simple_roots: simple, factors, lattice_invariants, weyl_order })
}

/// `C_W(E) / W(Phi_E)`, realised as the elements of `C_W(E)` that keep `Phi_E^+` positive.
pub struct ComponentGroup {
    pub rd: Arc<RootDatum>,
    pub simple: Vec<usize>,
    pub order: u128,
    refl: Vec<(Mat, Mat, [i32; MAX_RANK])>,
    gens: Vec<Mat>,
    elements: Option<Vec<Mat>>,
    index: HashMap<Mat, usize>,
    subsystem_chain: OnceLock<Chain>,
    space: Arc<crate::group::PointSpace>,
}

impl std::fmt::Debug for ComponentGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComponentGroup").field("order", &self.order).field("simple", &self.simple).finish()
    }
}

impl ComponentGroup {
    /// Builds the group from a chain for `C_W(E)` and the simple system of `Phi_E`.
    pub fn new(rd: Arc<RootDatum>, centralizer: &Chain, sub: &Subsystem) -> Result<ComponentGroup> {
        let c_order = centralizer.order();
        if !c_order.is_multiple_of(sub.weyl_order) {
            return Err(AtlasError::Internal(format!(
                "|W(Phi_E)| = {} does not divide |C_W(E)| = {}",
                sub.weyl_order, c_order
            )));
        }
        let order = c_order / sub.weyl_order;
        let refl = sub
            .simple_roots
            .iter()
            .map(|&b| {
                let y = rd.reflection(b);
                let x = y.transpose();
                let mut a = [0i32; MAX_RANK];
                for (t, &v) in rd.roots[b].iter().enumerate() {
                    a[t] = v as i32;
                }
                (y, x, a)
            })
            .collect();
        let mut q = ComponentGroup {
            simple: sub.simple_roots.clone(),
            order,
            refl,
            gens: Vec::new(),
            elements: None,
            index: HashMap::new(),
            subsystem_chain: OnceLock::new(),
            space: centralizer.space().clone(),
            rd,
        };
        let id = centralizer.identity().clone();
        let mut gens: Vec<Mat> = Vec::new();
        for g in centralizer.generators() {
            let c = q.canonical(g);
            if c != id && !gens.contains(&c) {
                gens.push(c);
            }
        }
        q.gens = gens;
        if order as usize <= COMPONENT_LIMIT {
            let mut elems = vec![id.clone()];
            let mut index: HashMap<Mat, usize> = [(id, 0)].into();
            let mut h = 0;
            while h < elems.len() {
                for g in &q.gens {
                    let x = q.canonical(&elems[h].mul(g));
                    if !index.contains_key(&x) {
                        if elems.len() as u128 >= order {
                            return Err(AtlasError::Internal("component group exceeds |C_W(E)|/|W(Phi_E)|".into()));
                        }
                        index.insert(x.clone(), elems.len());
                        elems.push(x);
                    }
                }
                h += 1;
            }
            if elems.len() as u128 != order {
                return Err(AtlasError::Internal(format!(
                    "component group closure has {} elements, expected {}",
                    elems.len(),
                    order
                )));
            }
            q.elements = Some(elems);
            q.index = index;
        }
        Ok(q)
    }

    /// The representative of `g W(Phi_E)` that maps every simple root of `Phi_E` to a positive root.
    pub fn canonical(&self, g: &Mat) -> Mat {
        let npos = self.rd.num_positive();
        let mut y = g.clone();
        let mut z = y.inverse().expect("invertible").transpose();
        'outer: loop {
            for (sy, sx, a) in &self.refl {
                let img = z.apply(a);
                let v: Vec<i64> = img[..self.rd.rank].iter().map(|&x| x as i64).collect();
                let idx = self.rd.root_index(&v).expect("centralizer permutes the subsystem");
                if idx >= npos {
                    y = y.mul(sy);
                    z = z.mul(sx);
                    continue 'outer;
                }
            }
            return y;
        }
    }

    pub fn generators(&self) -> &[Mat] {
        &self.gens
    }

    pub fn elements(&self) -> Option<&[Mat]> {
        self.elements.as_deref()
    }

    pub fn index_of(&self, g: &Mat) -> Option<usize> {
        self.index.get(&self.canonical(g)).copied()
    }

    /// Whether `g` lies in `W(Phi_E)`.
    pub fn in_subsystem(&self, g: &Mat) -> bool {
        let chain = self.subsystem_chain.get_or_init(|| {
            let gens: Vec<Mat> = self.refl.iter().map(|r| r.0.clone()).collect();
            Chain::from_gens(self.space.clone(), 0, &gens)
        });
        chain.contains(g)
    }

    /// Primary invariants, when the group is abelian and enumerated.
    pub fn abelian_invariants(&self) -> Option<Vec<u64>> {
        let elems = self.elements.as_ref()?;
        for a in &self.gens {
            for b in &self.gens {
                if self.canonical(&a.mul(b)) != self.canonical(&b.mul(a)) {
                    return None;
                }
            }
        }
        let id = &elems[0];
        let orders: Vec<u64> = elems
            .iter()
            .map(|x| {
                let (mut y, mut o) = (x.clone(), 1u64);
                while &y != id {
                    y = self.canonical(&y.mul(x));
                    o += 1;
                }
                o
            })
            .collect();
        let mut out = Vec::new();
        let mut primes = prime_factors(self.order as u64);
        primes.dedup();
        for l in primes {
            // log_l #{x : x^(l^k) = 1} for k = 0, 1, ...
            let mut logs = vec![0u32];
            let mut k = 1;
            loop {
                let lk = l.pow(k);
                let n = orders.iter().filter(|&&o| lk % o == 0).count() as u64;
                let lg = (n as f64).log(l as f64).round() as u32;
                logs.push(lg);
                if lg == logs[k as usize - 1] {
                    break;
                }
                k += 1;
            }
            // cyclic factors of order >= l^k: logs[k] - logs[k-1]
            let top = logs.len() - 1;
            for k in (1..top).rev() {
                let here = logs[k] - logs[k - 1];
                let above = if k < top { logs[k + 1] - logs[k] } else { 0 };
                for _ in 0..here - above {
                    out.push(l.pow(k as u32));
                }
            }
        }
        out.sort();
        Some(out)
    }
}

/// Conjugacy classes of elements of order `p` in the torus, with their invariants.
pub struct ElementClasses {
    pub rd: Arc<RootDatum>,
    pub p: u8,
    pub tree: Arc<Node>,
    minimal: Option<Vec<(Vec<i64>, u32)>>,
    group: Option<String>,
    atlas: Option<Arc<Atlas>>,
    table: OnceLock<Vec<KeyClasses>>,
    signatures: OnceLock<Vec<ElementSignature>>,
}

struct KeyClasses {
    lead: usize,
    subgroup: Vec<u8>,
    /// Coset minima, ascending, with global signature indices.
    cosets: Vec<(u8, usize)>,
    vectors: Vec<FpVec>,
}

impl ElementClasses {
    pub fn new(rd: Arc<RootDatum>, p: u8, tree: Arc<Node>, atlas: Option<Arc<Atlas>>) -> ElementClasses {
        let minimal = weight_system(&rd, ModuleName::Minimal).ok().map(|w| w.weights);
        let group = char_group(rd.ty, rd.isogeny);
        ElementClasses {
            rd,
            p,
            tree,
            minimal,
            group,
            atlas,
            table: OnceLock::new(),
            signatures: OnceLock::new(),
        }
    }

    fn table(&self) -> &[KeyClasses] {
        self.table.get_or_init(|| {
            let root = &self.tree;
            let p = self.p;
            let f = Field::new(p);
            let mut next = 0;
            let mut out = Vec::new();
            for key in 0..root.num_keys() {
                let rep = root.line_vector(root.rep_line(key));
                let lead = rep.iter().position(|&x| x != 0).unwrap();
                let child = root.child(key);
                let mut subgroup = vec![1u8];
                for s in 0..child.generators().len() {
                    let c = child.generator_action(s).apply(&rep, p)[lead];
                    let mut x = c;
                    while !subgroup.contains(&x) {
                        let add: Vec<u8> = subgroup.iter().map(|&y| f.mul(x, y)).collect();
                        for a in add {
                            if !subgroup.contains(&a) {
                                subgroup.push(a);
                            }
                        }
                        x = f.mul(x, c);
                    }
                }
                subgroup.sort();
                let mut mins: Vec<u8> =
                    (1..p).map(|c| subgroup.iter().map(|&s| f.mul(c, s)).min().unwrap()).collect();
                mins.sort();
                mins.dedup();
                let vectors = mins
                    .iter()
                    .map(|&m| {
                        let mut v = [0u8; MAX_RANK];
                        f.axpy(&mut v, m, &rep, self.rd.rank);
                        v
                    })
                    .collect();
                let cosets = mins.iter().map(|&m| (m, { next += 1; next - 1 })).collect();
                out.push(KeyClasses { lead, subgroup, cosets, vectors });
            }
            out
        })
    }

    /// Signatures of all classes, indexed by class id.
    pub fn signatures(&self) -> &[ElementSignature] {
        self.signatures.get_or_init(|| {
            let mut raw: Vec<ElementSignature> = Vec::new();
            for kc in self.table() {
                for v in &kc.vectors {
                    raw.push(self.signature_of(v));
                }
            }
            let mut ordinal: HashMap<i64, usize> = HashMap::new();
            for s in raw.iter_mut() {
                if !s.tabulated {
                    let i = ordinal.entry(s.centralizer_dimension).or_default();
                    *i += 1;
                    s.label = format!("o{}-d{}-#{}", self.p, s.centralizer_dimension, i);
                }
            }
            raw
        })
    }

    pub fn num_classes(&self) -> usize {
        self.table().iter().map(|k| k.cosets.len()).sum()
    }

    /// A representative vector for each class.
    pub fn representatives(&self) -> Vec<FpVec> {
        self.table().iter().flat_map(|k| k.vectors.iter().copied()).collect()
    }

    fn trace(&self, weights: &[(Vec<i64>, u32)], v: &FpVec) -> Cyclotomic {
        let p = self.p as i64;
        let mut counts = vec![0i64; self.p as usize];
        for (w, m) in weights {
            let s: i64 = w.iter().zip(v.iter()).map(|(a, &x)| a * x as i64).sum();
            counts[s.rem_euclid(p) as usize] += *m as i64;
        }
        Cyclotomic::from_exponent_counts(self.p, &counts)
    }

    fn signature_of(&self, v: &FpVec) -> ElementSignature {
        let p = self.p as i64;
        let rd = &self.rd;
        let mut counts = vec![0i64; self.p as usize];
        counts[0] += rd.rank as i64;
        for a in &rd.roots {
            let s: i64 = a.iter().zip(v.iter()).map(|(x, &y)| x * y as i64).sum();
            counts[s.rem_euclid(p) as usize] += 1;
        }
        let dim = counts[0];
        let adjoint_trace = Cyclotomic::from_exponent_counts(self.p, &counts);
        let minimal_trace = self.minimal.as_ref().map(|w| self.trace(w, v));
        let label = match (&self.atlas, &self.group) {
            (Some(a), Some(g)) => a.match_label(g, self.p as u32, dim, &adjoint_trace, minimal_trace.as_ref()),
            _ => None,
        };
        ElementSignature {
            element_order: self.p as u32,
            centralizer_dimension: dim,
            adjoint_trace,
            minimal_trace,
            tabulated: label.is_some(),
            label: label.unwrap_or_default(),
        }
    }

    /// Class id of a nonzero vector.
    pub fn class_of(&self, v: &FpVec) -> usize {
        let (key, c) = self.key_and_scalar(v);
        self.class_for(key, c)
    }

    fn key_and_scalar(&self, v: &FpVec) -> (u32, u8) {
        let root = &self.tree;
        let line = root.line_of(v);
        let key = root.key(line);
        let mut w = [*v];
        root.move_to_rep(line, &mut w);
        (key, w[0][self.table()[key as usize].lead])
    }

    fn class_for(&self, key: u32, c: u8) -> usize {
        let kc = &self.table()[key as usize];
        let f_p = self.p as u16;
        let m = kc.subgroup.iter().map(|&s| (c as u16 * s as u16 % f_p) as u8).min().unwrap();
        kc.cosets.iter().find(|x| x.0 == m).expect("coset of a known class").1
    }

    /// Class counts over the nonzero vectors of `E`, sorted by class id.
    pub fn distribution(&self, e: &SubspaceRep) -> Vec<(usize, u64)> {
        let f = Field::new(self.p);
        let n = self.rd.rank;
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for v in e.nonzero_vectors() {
            let lead = v[..n].iter().position(|&x| x != 0).unwrap();
            if v[lead] != 1 {
                continue;
            }
            let (key, c) = self.key_and_scalar(&v);
            for a in 1..self.p {
                *counts.entry(self.class_for(key, f.mul(a, c))).or_default() += 1;
            }
        }
        counts.into_iter().collect()
    }
}

/// Distribution of elements of `E` over element classes.
pub fn element_distribution(classes: &ElementClasses, e: &SubspaceRep) -> Vec<DistributionEntry> {
    let sigs = classes.signatures();
    classes
        .distribution(e)
        .into_iter()
        .map(|(id, count)| DistributionEntry { signature: sigs[id].clone(), count })
        .collect()
}

/// Compares `r + |Phi_E|` with `(dim G + sum_x chi_L(x)) / |E|` over the distribution.
pub fn dim_centralizer_crosscheck(
    rd: &RootDatum,
    e: &SubspaceRep,
    dist: &[DistributionEntry],
) -> Result<DimensionCheck> {
    let from_roots = (rd.rank + centralizer_subsystem(rd, e).len()) as i64;
    let mut sum = Cyclotomic::from_int(e.p, rd.dim() as i64);
    for d in dist {
        sum = sum.add(&d.signature.adjoint_trace.scale(d.count as i64));
    }
    let size = (e.p as i64).pow(e.rank() as u32);
    match sum.as_integer() {
        Some(t) if t % size == 0 && t / size == from_roots => Ok(DimensionCheck { from_roots, from_traces: t / size }),
        _ => Err(AtlasError::CrossCheckFailure { roots: from_roots, trace: format!("({}) / {}", sum, size) }),
    }
}

#[derive(Clone, Copy)]
pub struct ToralOptions<'a> {
    pub max_rank: Option<usize>,
    /// Character tables for labels; the embedded tables when `None`.
    pub atlas: Option<&'a Arc<Atlas>>,
    pub distributions: bool,
}

impl Default for ToralOptions<'_> {
    fn default() -> Self {
        ToralOptions { max_rank: None, atlas: None, distributions: true }
    }
}

/// A full classification together with the element classes used for its distributions.
pub struct Classification {
    pub rd: Arc<RootDatum>,
    pub p: u8,
    pub weyl_order: u128,
    pub classes: Vec<ToralClass>,
    pub elements: Arc<ElementClasses>,
}

impl Classification {
    pub fn counts_by_rank(&self) -> Vec<u64> {
        let top = self.classes.iter().map(|c| c.rank).max().unwrap_or(0);
        let mut out = vec![0u64; top + 1];
        for c in &self.classes {
            out[c.rank] += 1;
        }
        out
    }
}

pub fn classify_toral(rd: &RootDatum, p: u8) -> Result<Vec<ToralClass>> {
    Ok(classify_toral_with(rd, p, ToralOptions::default())?.classes)
}

pub fn classify_toral_with(rd: &RootDatum, p: u8, opts: ToralOptions) -> Result<Classification> {
    let rd = Arc::new(rd.clone());
    let g = ModMatrixGroup::weyl(&rd, p);
    let tree = g.orbit_tree(p, false);
    let atlas = match opts.atlas {
        Some(a) => a.clone(),
        None => Arc::new(load_tables(DATA_VERSION)?),
    };
    let elements = Arc::new(ElementClasses::new(rd.clone(), p, tree.clone(), Some(atlas)));
    let levels = classify_with(
        &g,
        p,
        ClassifyOptions { max_rank: opts.max_rank, tree: Some(&tree), ..Default::default() },
    )?;
    if opts.distributions {
        elements.signatures();
    }
    let mut jobs = Vec::new();
    for (k, level) in levels.into_iter().enumerate() {
        for (i, c) in level.into_iter().enumerate() {
            jobs.push((k, i, c));
        }
    }
    let classes = jobs
        .into_par_iter()
        .map(|(k, i, c)| {
            let centralizer = fix_pointwise(&c.stabilizer.chain, &c.rep);
            let sub = subsystem_data(&rd, centralizer_subsystem(&rd, &c.rep))?;
            let component = ComponentGroup::new(rd.clone(), &centralizer, &sub)?;
            let (quotient_gens, quotient_order) = normalizer_quotient(&c.stabilizer, &centralizer, &c.rep);
            let distribution =
                if opts.distributions && k > 0 { element_distribution(&elements, &c.rep) } else { Vec::new() };
            let dimension_check = if opts.distributions {
                Some(dim_centralizer_crosscheck(&rd, &c.rep, &distribution)?)
            } else {
                None
            };
            let centralizer_data = CentralizerData {
                type_string: sub.type_string(),
                dimension: rd.rank + sub.roots.len(),
                central_torus_rank: rd.rank - sub.simple_roots.len(),
                weyl_centralizer_order: centralizer.order(),
                component_group_order: component.order,
                component_group_invariants: component.abelian_invariants(),
                component_group_generators: component.generators().iter().map(|m| m.rows()).collect(),
                subsystem: sub,
            };
            Ok(ToralClass {
                id: format!("{}.{}", k, i + 1),
                rank: k,
                orbit_size: c.orbit_size,
                normalizer_order: c.stabilizer.order,
                centralizer: centralizer_data,
                normalizer_quotient_order: quotient_order,
                normalizer_quotient_generators: quotient_gens,
                aut_full: gl_order(k as u32, p as u64) == Some(quotient_order),
                distribution,
                dimension_check,
                representative: c.rep,
                normalizer: c.stabilizer,
                component: Arc::new(component),
            })
        })
        .collect::<Result<Vec<ToralClass>>>()?;
    Ok(Classification { weyl_order: g.order(), rd, p, classes, elements })
}

/// The image of `N_W(E)` in `GL(E)`: generators and order.
fn normalizer_quotient(n: &StabilizerHandle, c: &Chain, e: &SubspaceRep) -> (Vec<Vec<Vec<u8>>>, u128) {
    let rows = e.rows();
    let k = rows.len();
    let pivots: Vec<usize> = rows.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()).collect();
    let mut gens: Vec<Vec<Vec<u8>>> = Vec::new();
    for g in &n.generators {
        let a = FpMat::from_mat(g, e.p);
        let images: Vec<FpVec> = rows.iter().map(|b| a.apply(b, e.p)).collect();
        let m: Vec<Vec<u8>> = (0..k).map(|j| (0..k).map(|i| images[i][pivots[j]]).collect()).collect();
        let is_id = (0..k).all(|i| (0..k).all(|j| m[i][j] == (i == j) as u8));
        if !is_id && !gens.contains(&m) {
            gens.push(m);
        }
    }
    (gens, n.order / c.order())
}

/// Outcome of checking connectedness of centralizers over every toral class.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SteinbergReport {
    #[serde(rename = "type", serialize_with = "serde_str::display")]
    pub ty: LieType,
    #[serde(serialize_with = "serde_str::display")]
    pub isogeny: crate::rootdata::IsogenyKind,
    pub p: u8,
    pub torsion_prime: bool,
    pub method: SteinbergMethod,
    /// Classes for the classification method, subsystem flats for the reduction.
    pub cases_checked: usize,
    /// Witnesses of disconnected centralizers with their component group orders.
    pub disconnected: Vec<(String, String)>,
    /// Every component group order found is a power of `p`.
    pub orders_are_p_powers: bool,
    /// Disconnected centralizers occur exactly when `p` is a torsion prime.
    pub consistent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SteinbergMethod {
    Classification,
    Flats,
}

/// Above this many estimated classes `verify_steinberg` switches to the flat reduction.
pub const STEINBERG_CLASSIFY_LIMIT: u128 = 50_000;

/// Component group order for every class, without distributions.
pub fn component_orders(rd: &RootDatum, p: u8, max_rank: Option<usize>) -> Result<Vec<(SubspaceRep, u128)>> {
    let g = ModMatrixGroup::weyl(rd, p);
    let levels = classify_with(&g, p, ClassifyOptions { max_rank, lexmin_limit: 0, ..Default::default() })?;
    let jobs: Vec<_> = levels.into_iter().flatten().collect();
    jobs.into_par_iter()
        .map(|c| {
            let centralizer = fix_pointwise(&c.stabilizer.chain, &c.rep);
            let sub = subsystem_data(rd, centralizer_subsystem(rd, &c.rep))?;
            let order = centralizer.order();
            if !order.is_multiple_of(sub.weyl_order) {
                return Err(AtlasError::Internal(format!(
                    "|W(Phi_E)| = {} does not divide |C_W(E)| = {}",
                    sub.weyl_order, order
                )));
            }
            Ok((c.rep, order / sub.weyl_order))
        })
        .collect()
}

/// Checks that `C_G(E)` is connected for every toral `E` exactly when `p` is not a torsion prime.
/// Small cases classify every `E`; large ones use [`steinberg_flats`].
pub fn verify_steinberg(rd: &RootDatum, p: u8) -> Result<SteinbergReport> {
    let subspaces: u128 = (0..=rd.rank as u32).map(|k| crate::arith::gaussian_binomial(rd.rank as u32, k, p as u64)).sum();
    if subspaces / rd.ty.weyl_order() > STEINBERG_CLASSIFY_LIMIT {
        steinberg_flats(rd, p)
    } else {
        steinberg_classification(rd, p)
    }
}

fn report(
    rd: &RootDatum,
    p: u8,
    method: SteinbergMethod,
    cases: usize,
    disconnected: Vec<(String, u128)>,
) -> Result<SteinbergReport> {
    let torsion = crate::rootdata::torsion_primes(rd.ty, rd.isogeny)?.contains(&(p as u64));
    Ok(SteinbergReport {
        ty: rd.ty,
        isogeny: rd.isogeny,
        p,
        torsion_prime: torsion,
        method,
        cases_checked: cases,
        orders_are_p_powers: disconnected.iter().all(|(_, q)| is_power_of(*q, p as u128)),
        consistent: disconnected.is_empty() != torsion,
        disconnected: disconnected.into_iter().map(|(e, q)| (e, q.to_string())).collect(),
    })
}

/// Steinberg check by full classification of toral subgroups.
pub fn steinberg_classification(rd: &RootDatum, p: u8) -> Result<SteinbergReport> {
    let orders = component_orders(rd, p, None)?;
    let disconnected =
        orders.iter().filter(|(_, q)| *q > 1).map(|(e, q)| (format!("{:?}", e.basis), *q)).collect();
    report(rd, p, SteinbergMethod::Classification, orders.len(), disconnected)
}

/// Steinberg check by induction on `dim E`.
///
/// If `C_W(E')` is the reflection group `W(Phi')` with `Phi' = Phi_E'`, then for
/// `E = E' + <v>` we get `C_W(E) = C_{W(Phi')}(v)`, and `Phi_E` is the set of
/// roots of `Phi'` vanishing on `v`. So every component group is trivial iff
/// `|C_{W(Phi')}(v)| = |W(Phi'_v)|` for every reachable `Phi'` and every `v`.
/// Subsystems are visited once per `W`-class of their flat (common kernel of
/// their roots), and `W(Phi')` acts on `Y/pY` modulo the flat it fixes.
/// A failure at a reachable `Phi'` is a genuine disconnected centralizer.
pub fn steinberg_flats(rd: &RootDatum, p: u8) -> Result<SteinbergReport> {
    let r = rd.rank;
    let f = Field::new(p);
    let g = ModMatrixGroup::weyl(rd, p);
    let primal = g.orbit_tree(p, false);
    let dual = g.orbit_tree(p, true);
    let modp = |v: &[i64]| -> FpVec {
        let mut out = [0u8; MAX_RANK];
        for (o, &x) in out.iter_mut().zip(v) {
            *o = x.rem_euclid(p as i64) as u8;
        }
        out
    };
    let roots: Vec<FpVec> = rd.roots.iter().map(|a| modp(a)).collect();
    let coroots: Vec<FpVec> = rd.coroots.iter().map(|a| modp(a)).collect();
    let pair = |i: usize, v: &FpVec| -> u8 {
        (roots[i].iter().zip(v).take(r).map(|(&a, &b)| a as u32 * b as u32).sum::<u32>() % p as u32) as u8
    };
    let flat_of = |sub: &[usize]| -> SubspaceRep {
        let rows: Vec<FpVec> = sub.iter().map(|&i| roots[i]).collect();
        SubspaceRep::from_vectors(p, r, &rows).annihilator()
    };
    let key_of = |l: &SubspaceRep| -> (usize, Vec<u32>) {
        let k = l.rank();
        let keys = if 2 * k <= r {
            crate::canon::canon(&primal, &l.rows(), None, false)
        } else {
            crate::canon::canon(&dual, &l.annihilator().rows(), None, false)
        };
        (k, keys.expect("untargeted canon").keys)
    };

    let mut weyl_orders: HashMap<Vec<usize>, u128> = HashMap::new();
    let mut order_of = |sub: Vec<usize>| -> Result<u128> {
        if let Some(&o) = weyl_orders.get(&sub) {
            return Ok(o);
        }
        let o = subsystem_data(rd, sub.clone())?.weyl_order;
        weyl_orders.insert(sub, o);
        Ok(o)
    };

    let start = flat_of(&(0..rd.num_roots()).collect::<Vec<_>>());
    let mut seen = std::collections::HashSet::new();
    seen.insert(key_of(&start));
    let mut queue = vec![start];
    let mut disconnected = Vec::new();
    let mut cases = 0;
    while let Some(l) = queue.pop() {
        cases += 1;
        let sub = centralizer_subsystem(rd, &l);
        if sub.is_empty() {
            continue;
        }
        let w_order = order_of(sub.clone())?;
        let gens = simple_system(rd, &sub);
        let basis = l.rows();
        let pivots: Vec<usize> = basis.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()).collect();
        let free: Vec<usize> = (0..r).filter(|c| !pivots.contains(c)).collect();
        let q = p as usize;
        let lift = |mut idx: usize| -> FpVec {
            let mut v = [0u8; MAX_RANK];
            for &c in &free {
                v[c] = (idx % q) as u8;
                idx /= q;
            }
            v
        };
        let coset = |v: &FpVec| -> usize {
            let mut w = *v;
            reduce_mod(&mut w, &basis, &pivots, r, &f);
            free.iter().rev().fold(0, |acc, &c| acc * q + w[c] as usize)
        };
        let full = |v: &FpVec| -> usize { v[..r].iter().rev().fold(0, |acc, &x| acc * q + x as usize) };
        let reflect = |i: usize, v: &FpVec| -> FpVec {
            let c = pair(i, v);
            let mut w = *v;
            if c != 0 {
                f.axpy(&mut w, f.neg(c), &coroots[i], r);
            }
            w
        };
        // Stabilizers are constant on cosets of the flat, so one representative per
        // coset suffices; orbits themselves live in Y/pY.
        let mut covered = vec![false; q.pow(free.len() as u32)];
        covered[0] = true;
        let mut stack = Vec::new();
        let mut seen_full = std::collections::HashSet::new();
        for start in 1..covered.len() {
            if covered[start] {
                continue;
            }
            let v = lift(start);
            seen_full.clear();
            seen_full.insert(full(&v));
            stack.push(v);
            let mut orbit: u128 = 0;
            while let Some(x) = stack.pop() {
                orbit += 1;
                covered[coset(&x)] = true;
                for &s in &gens {
                    let y = reflect(s, &x);
                    if seen_full.insert(full(&y)) {
                        stack.push(y);
                    }
                }
            }
            if w_order % orbit != 0 {
                return Err(AtlasError::Internal(format!("orbit of size {} under a group of order {}", orbit, w_order)));
            }
            let stab = w_order / orbit;
            let sub_v: Vec<usize> = sub.iter().copied().filter(|&i| pair(i, &v) == 0).collect();
            let w_v = order_of(sub_v.clone())?;
            if stab != w_v {
                if !stab.is_multiple_of(w_v) {
                    return Err(AtlasError::Internal(format!("|W(Phi_E)| = {} does not divide {}", w_v, stab)));
                }
                let e = SubspaceRep::from_vectors(p, r, &[v]);
                disconnected.push((format!("{:?} over flat {:?}", e.basis, l.basis), stab / w_v));
                continue;
            }
            let next = flat_of(&sub_v);
            if seen.insert(key_of(&next)) {
                queue.push(next);
            }
        }
    }
    report(rd, p, SteinbergMethod::Flats, cases, disconnected)
}
