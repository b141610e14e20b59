//! Matrix groups over `Z/m` acting on `F_p^r`: orders, vector and subspace
//! orbits, stabilizers, and subspace classification.

use crate::arith::gaussian_binomial;
use crate::canon::{self, Acting, Node};
use crate::error::{AtlasError, Result};
use crate::fp::{all_subspaces, rref, Field, FpMat, FpVec, SubspaceRep};
use crate::group::{Chain, PointSpace};
use crate::mat::{Mat, MAX_RANK};
use crate::rootdata::{weyl_generators, RootDatum};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// Orbits up to this size get the lexicographically minimal representative.
pub const LEXMIN_ORBIT_LIMIT: u128 = 1 << 12;

/// Default subspace budget of the brute-force classifier.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// A finitely generated matrix group with a declared reduction modulus.
///
/// Generators are either genuinely over `Z/m`, or exact integer matrices (the
/// Weyl group on `Y`) that are only reduced when acting on `F_p^r`.
#[derive(Debug)]
pub struct ModMatrixGroup {
    pub modulus: u32,
    pub rank: usize,
    pub generators: Vec<Mat>,
    space: Arc<PointSpace>,
    chain: OnceLock<Chain>,
}

impl Clone for ModMatrixGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        ModMatrixGroup {
            modulus: self.modulus,
            rank: self.rank,
            generators: self.generators.clone(),
            space: self.space.clone(),
            chain,
        }
    }
}

impl ModMatrixGroup {
    /// A group over `Z/m` given by generators; entries are reduced mod `m`.
    pub fn new(modulus: u32, rank: usize, gens: &[Mat]) -> Result<ModMatrixGroup> {
        if modulus < 2 || rank == 0 || rank > MAX_RANK {
            return Err(AtlasError::RankTooLarge(rank));
        }
        let generators: Vec<Mat> = gens.iter().map(|g| g.reduce(modulus)).collect();
        for g in &generators {
            if g.n() != rank || g.inverse().is_none() {
                return Err(AtlasError::Internal("generator is not invertible".into()));
            }
        }
        Ok(ModMatrixGroup {
            modulus,
            rank,
            generators,
            space: Arc::new(PointSpace::standard(rank, modulus)),
            chain: OnceLock::new(),
        })
    }

    /// The Weyl group on `Y`, declared modulo `p` (odd `p`) or 4 (`p = 2`).
    pub fn weyl(rd: &RootDatum, p: u8) -> ModMatrixGroup {
        let r = rd.rank;
        let modulus = if p == 2 { 4 } else { p as u32 };
        let mut base: Vec<[i32; MAX_RANK]> = Vec::new();
        for i in 0..r {
            let mut v = [0; MAX_RANK];
            for (j, &x) in rd.coroots[i].iter().enumerate() {
                v[j] = x as i32;
            }
            base.push(v);
        }
        for i in 0..r {
            let mut v = [0; MAX_RANK];
            v[i] = 1;
            base.push(v);
        }
        ModMatrixGroup {
            modulus,
            rank: r,
            generators: weyl_generators(rd),
            space: Arc::new(PointSpace { n: r, modulus: 0, base }),
            chain: OnceLock::new(),
        }
    }

    /// Modulus of the stored matrices (0 for exact integer generators).
    pub fn element_modulus(&self) -> u32 {
        self.generators.first().map(|g| g.modulus()).unwrap_or(self.modulus)
    }

    pub fn space(&self) -> &Arc<PointSpace> {
        &self.space
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(self.rank, self.element_modulus())
    }

    pub fn chain(&self) -> &Chain {
        self.chain
            .get_or_init(|| Chain::from_gens(self.space.clone(), self.element_modulus(), &self.generators))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn whole(&self) -> StabilizerHandle {
        StabilizerHandle::from_chain(self.chain().clone())
    }

    /// Order of the group generated by the generators reduced mod `m`.
    pub fn reduced_order(&self, m: u32) -> u128 {
        let gens: Vec<Mat> = self.generators.iter().map(|g| g.reduce(m)).collect();
        Chain::from_gens(Arc::new(PointSpace::standard(self.rank, m)), m, &gens).order()
    }

    /// Order of the kernel of reduction to `GL_r(p)`.
    pub fn reduction_kernel_order(&self, p: u8) -> u128 {
        self.order() / self.reduced_order(p as u32)
    }

    /// Action of the generators on `F_p^r` (or its dual).
    pub fn actions(&self, p: u8, dual: bool) -> Vec<FpMat> {
        let ctx = Acting::new(p, self.rank, self.element_modulus(), dual, self.space.clone());
        self.generators.iter().map(|g| ctx.act(g)).collect()
    }

    /// Root node of the canonical-form tree for subspaces of `F_p^r` (or its dual).
    pub fn orbit_tree(&self, p: u8, dual: bool) -> Arc<Node> {
        let ctx = Arc::new(Acting::new(p, self.rank, self.element_modulus(), dual, self.space.clone()));
        Node::root(ctx, self.chain().clone(), self.generators.clone())
    }
}

/// A subgroup given by a stabilizer chain.
#[derive(Clone, Debug)]
pub struct StabilizerHandle {
    pub generators: Vec<Mat>,
    pub order: u128,
    pub chain: Arc<Chain>,
}

impl StabilizerHandle {
    pub fn from_chain(chain: Chain) -> StabilizerHandle {
        StabilizerHandle { generators: chain.generators().to_vec(), order: chain.order(), chain: Arc::new(chain) }
    }

    pub fn contains(&self, g: &Mat) -> bool {
        self.chain.contains(g)
    }
}

/// One orbit of subspaces.
#[derive(Clone, Debug)]
pub struct SubspaceClass {
    pub rep: SubspaceRep,
    pub orbit_size: u128,
    pub stabilizer: StabilizerHandle,
}

pub fn group_order(g: &ModMatrixGroup) -> u128 {
    g.order()
}

type Packed = [u64; MAX_RANK];

fn pack(rows: &[FpVec]) -> Packed {
    let mut k = [0u64; MAX_RANK];
    for (i, r) in rows.iter().enumerate() {
        k[i] = u64::from_be_bytes(*r);
    }
    k
}

fn unpack(k: &Packed, rank: usize) -> Vec<FpVec> {
    k[..rank].iter().map(|x| x.to_be_bytes()).collect()
}

fn apply_sub(a: &FpMat, rows: &[FpVec], n: usize, f: &Field) -> Vec<FpVec> {
    let mut out: Vec<FpVec> = rows.iter().map(|v| a.apply(v, f.p)).collect();
    rref(&mut out, n, f);
    out
}

/// Breadth-first orbit of a subspace with a Schreier tree.
struct SubOrbit {
    elems: Vec<Packed>,
    parent: Vec<u32>,
    via: Vec<u8>,
    index: HashMap<Packed, u32>,
}

fn sub_orbit(acts: &[FpMat], seed: &[FpVec], n: usize, f: &Field) -> SubOrbit {
    let k = seed.len();
    let start = pack(seed);
    let mut o = SubOrbit { elems: vec![start], parent: vec![0], via: vec![0], index: [(start, 0)].into() };
    let mut h = 0;
    while h < o.elems.len() {
        let rows = unpack(&o.elems[h], k);
        for (s, a) in acts.iter().enumerate() {
            let img = pack(&apply_sub(a, &rows, n, f));
            if !o.index.contains_key(&img) {
                o.index.insert(img, o.elems.len() as u32);
                o.elems.push(img);
                o.parent.push(h as u32);
                o.via.push(s as u8);
            }
        }
        h += 1;
    }
    o
}

impl SubOrbit {
    /// Element mapping the seed to orbit element `i`.
    fn transversal(&self, i: usize, gens: &[Mat], id: &Mat) -> Mat {
        let mut g = id.clone();
        let mut x = i;
        while x != 0 {
            g = g.mul(&gens[self.via[x] as usize]);
            x = self.parent[x] as usize;
        }
        g
    }

    fn stabilizer(&self, g: &ModMatrixGroup, acts: &[FpMat], n: usize, f: &Field, k: usize) -> Chain {
        let id = &g.identity();
        let target = g.order() / self.elems.len() as u128;
        let cands = (0..self.elems.len()).flat_map(|i| {
            let ui = self.transversal(i, &g.generators, id);
            let rows = unpack(&self.elems[i], k);
            acts.iter().enumerate().map(move |(s, a)| {
                let j = self.index[&pack(&apply_sub(a, &rows, n, f))] as usize;
                let uj = self.transversal(j, &g.generators, id);
                uj.inverse().expect("invertible").mul(&g.generators[s]).mul(&ui)
            })
        });
        Chain::from_candidates(g.space.clone(), g.element_modulus(), cands, target)
            .unwrap_or_else(|e| panic!("orbit stabilizer: {}", e))
    }
}

/// Orbits of the induced action on nonzero vectors of `F_p^r`, with
/// lexicographically minimal representatives and orbit sizes.
pub fn vector_orbits(g: &ModMatrixGroup, p: u8) -> Vec<(Vec<u8>, u64)> {
    let n = g.rank;
    let acts = g.actions(p, false);
    let total = (p as u64).pow(n as u32) as usize;
    let encode = |v: &FpVec| v[..n].iter().fold(0usize, |a, &x| a * p as usize + x as usize);
    let decode = |mut c: usize| {
        let mut v = [0u8; MAX_RANK];
        for i in (0..n).rev() {
            v[i] = (c % p as usize) as u8;
            c /= p as usize;
        }
        v
    };
    let mut seen = vec![false; total];
    let mut out = Vec::new();
    for start in 1..total {
        if seen[start] {
            continue;
        }
        // encoding order is lexicographic, so the first unseen vector is the minimum
        seen[start] = true;
        let mut queue = vec![start];
        let mut h = 0;
        while h < queue.len() {
            let v = decode(queue[h]);
            h += 1;
            for a in &acts {
                let c = encode(&a.apply(&v, p));
                if !seen[c] {
                    seen[c] = true;
                    queue.push(c);
                }
            }
        }
        out.push((decode(start)[..n].to_vec(), queue.len() as u64));
    }
    out
}

/// The orbit of a subspace (as RREF representatives) and its setwise stabilizer.
pub fn subspace_orbit(g: &ModMatrixGroup, seed: &SubspaceRep) -> (Vec<SubspaceRep>, StabilizerHandle) {
    let (p, n) = (seed.p, g.rank);
    let f = Field::new(p);
    let acts = g.actions(p, false);
    let rows = seed.rows();
    let o = sub_orbit(&acts, &rows, n, &f);
    let stab = o.stabilizer(g, &acts, n, &f, rows.len());
    let orbit = o.elems.iter().map(|k| SubspaceRep::from_rref(p, n, &unpack(k, rows.len()))).collect();
    (orbit, StabilizerHandle::from_chain(stab))
}

/// Stabilizer of `v` (mod `p`) inside the group with the given chain.
pub fn vector_stabilizer(chain: &Chain, v: &FpVec, p: u8, dual: bool) -> Chain {
    let space = chain.space().clone();
    let ctx = Acting::new(p, space.n, chain.identity().modulus(), dual, space.clone());
    let gens = chain.generators().to_vec();
    if gens.is_empty() {
        return chain.clone();
    }
    let acts: Vec<FpMat> = gens.iter().map(|g| ctx.act(g)).collect();
    let mut orbit = vec![*v];
    let mut parent = vec![0u32];
    let mut via = vec![0u8];
    let mut index: HashMap<FpVec, u32> = [(*v, 0)].into();
    let mut h = 0;
    while h < orbit.len() {
        let x = orbit[h];
        for (s, a) in acts.iter().enumerate() {
            let y = a.apply(&x, p);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y) {
                e.insert(orbit.len() as u32);
                orbit.push(y);
                parent.push(h as u32);
                via.push(s as u8);
            }
        }
        h += 1;
    }
    if orbit.len() == 1 {
        return chain.clone();
    }
    let id = chain.identity().clone();
    let transversal = |i: usize| {
        let mut g = id.clone();
        let mut x = i;
        while x != 0 {
            g = g.mul(&gens[via[x] as usize]);
            x = parent[x] as usize;
        }
        g
    };
    let target = chain.order() / orbit.len() as u128;
    let cands = (0..orbit.len()).flat_map(|i| {
        let ui = transversal(i);
        let x = orbit[i];
        let (acts, index, gens) = (&acts, &index, &gens);
        let transversal = &transversal;
        (0..gens.len()).map(move |s| {
            let j = index[&acts[s].apply(&x, p)] as usize;
            transversal(j).inverse().expect("invertible").mul(&gens[s]).mul(&ui)
        })
    });
    Chain::from_candidates(space, chain.identity().modulus(), cands, target)
        .unwrap_or_else(|e| panic!("vector stabilizer: {}", e))
}

/// Pointwise stabilizer of the subspace `e`, inside the group given by `chain`.
pub fn fix_pointwise(chain: &Chain, e: &SubspaceRep) -> Chain {
    let mut c = chain.clone();
    for v in e.rows() {
        c = vector_stabilizer(&c, &v, e.p, false);
    }
    c
}

pub fn pointwise_stabilizer(g: &ModMatrixGroup, e: &SubspaceRep) -> StabilizerHandle {
    StabilizerHandle::from_chain(fix_pointwise(g.chain(), e))
}

/// Options for the incremental classifier.
#[derive(Clone, Copy)]
pub struct ClassifyOptions<'a> {
    /// Classify ranks above half the ambient rank through the dual action.
    pub use_duality: bool,
    pub max_rank: Option<usize>,
    /// Restrict to subspaces satisfying an inherited predicate.
    pub keep: Option<&'a (dyn Fn(&[FpVec]) -> bool + Sync)>,
    pub lexmin_limit: u128,
    /// A prebuilt primal tree from `orbit_tree(p, false)`, to share line tables.
    pub tree: Option<&'a Arc<Node>>,
}

impl Default for ClassifyOptions<'_> {
    fn default() -> Self {
        ClassifyOptions { use_duality: true, max_rank: None, keep: None, lexmin_limit: LEXMIN_ORBIT_LIMIT, tree: None }
    }
}

/// One representative per orbit, for every rank, by orderly extension.
pub fn classify_subspaces_incremental(g: &ModMatrixGroup, p: u8) -> Result<Vec<Vec<SubspaceClass>>> {
    classify_with(g, p, ClassifyOptions::default())
}

pub fn classify_with(g: &ModMatrixGroup, p: u8, opts: ClassifyOptions) -> Result<Vec<Vec<SubspaceClass>>> {
    if !crate::arith::is_prime(p as u64) {
        return Err(AtlasError::NonPrime(p as u64));
    }
    let n = g.rank;
    let max_rank = opts.max_rank.unwrap_or(n).min(n);
    let dual = opts.use_duality && opts.keep.is_none() && max_rank == n;
    let order = g.order();
    let mut per_rank: Vec<Vec<(SubspaceRep, Chain)>> = vec![Vec::new(); max_rank + 1];
    let half = if dual { n / 2 } else { max_rank };
    let primal = match opts.tree {
        Some(t) => canon::orderly(t, half, opts.keep),
        None => canon::orderly(&g.orbit_tree(p, false), half, opts.keep),
    };
    for (k, level) in primal.into_iter().enumerate() {
        for c in level {
            per_rank[k].push((SubspaceRep::from_vectors(p, n, &c.node.flag), c.stabilizer));
        }
    }
    if dual {
        let levels = canon::orderly(&g.orbit_tree(p, true), n - half - 1, None);
        for (j, level) in levels.into_iter().enumerate() {
            for c in level {
                let rep = SubspaceRep::from_vectors(p, n, &c.node.flag).annihilator();
                per_rank[n - j].push((rep, c.stabilizer));
            }
        }
    }
    let f = Field::new(p);
    let acts = g.actions(p, false);
    let mut out = Vec::with_capacity(per_rank.len());
    for level in per_rank {
        let mut classes: Vec<SubspaceClass> = level
            .into_iter()
            .map(|(rep, stab)| {
                let orbit_size = order / stab.order();
                if orbit_size > 1 && orbit_size <= opts.lexmin_limit {
                    lexmin_class(g, &acts, &f, rep, &stab, orbit_size)
                } else {
                    SubspaceClass { rep, orbit_size, stabilizer: StabilizerHandle::from_chain(stab) }
                }
            })
            .collect();
        classes.sort_by(|a, b| a.rep.cmp(&b.rep));
        out.push(classes);
    }
    Ok(out)
}

fn lexmin_class(g: &ModMatrixGroup, acts: &[FpMat], f: &Field, rep: SubspaceRep, stab: &Chain, size: u128) -> SubspaceClass {
    let n = g.rank;
    let rows = rep.rows();
    let o = sub_orbit(acts, &rows, n, f);
    assert_eq!(o.elems.len() as u128, size, "orbit size disagrees with stabilizer order");
    let (imin, kmin) = o.elems.iter().enumerate().min_by_key(|(_, k)| **k).unwrap();
    let u = o.transversal(imin, &g.generators, &g.identity());
    let uinv = u.inverse().expect("invertible");
    let conj = stab.generators().iter().map(|h| u.mul(h).mul(&uinv));
    let chain = Chain::from_candidates(g.space.clone(), g.element_modulus(), conj, stab.order())
        .unwrap_or_else(|e| panic!("conjugated stabilizer: {}", e));
    SubspaceClass {
        rep: SubspaceRep::from_rref(f.p, n, &unpack(kmin, rows.len())),
        orbit_size: size,
        stabilizer: StabilizerHandle::from_chain(chain),
    }
}

/// Oracle classifier: enumerate every subspace and partition into orbits.
pub fn brute_force_classify(g: &ModMatrixGroup, p: u8, budget: u128) -> Result<Vec<Vec<SubspaceClass>>> {
    if !crate::arith::is_prime(p as u64) {
        return Err(AtlasError::NonPrime(p as u64));
    }
    let n = g.rank;
    let count: u128 = (0..=n as u32).map(|k| gaussian_binomial(n as u32, k, p as u64)).sum();
    if count > budget {
        return Err(AtlasError::BudgetExceeded { count, budget });
    }
    let f = Field::new(p);
    let acts = g.actions(p, false);
    let mut out = Vec::new();
    for k in 0..=n {
        let mut seen: HashMap<Packed, ()> = HashMap::new();
        let mut classes = Vec::new();
        for sub in all_subspaces(n, k, p) {
            let key = pack(&sub);
            if seen.contains_key(&key) {
                continue;
            }
            let o = sub_orbit(&acts, &sub, n, &f);
            for e in &o.elems {
                seen.insert(*e, ());
            }
            let min = *o.elems.iter().min().unwrap();
            let rows = unpack(&min, k);
            let o = sub_orbit(&acts, &rows, n, &f);
            let stab = o.stabilizer(g, &acts, n, &f, k);
            classes.push(SubspaceClass {
                rep: SubspaceRep::from_rref(p, n, &rows),
                orbit_size: o.elems.len() as u128,
                stabilizer: StabilizerHandle::from_chain(stab),
            });
        }
        classes.sort_by(|a, b| a.rep.cmp(&b.rep));
        out.push(classes);
    }
    Ok(out)
}

/// Comparison of the incremental classifier against the brute-force oracle.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub counts: Vec<usize>,
    pub oracle_counts: Vec<usize>,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty() && self.counts == self.oracle_counts
    }
}

/// Matches every incremental class to exactly one brute-force orbit with the same
/// orbit size and stabilizer order. Orbits within the lexmin limit must also
/// report the same representative.
pub fn oracle_equivalence(g: &ModMatrixGroup, p: u8, budget: u128) -> Result<OracleReport> {
    let oracle = brute_force_classify(g, p, budget)?;
    let ours = classify_with(g, p, ClassifyOptions::default())?;
    let mut mismatches = Vec::new();
    for (k, (a, b)) in ours.iter().zip(&oracle).enumerate() {
        let mut used = vec![false; b.len()];
        for c in a {
            let (orbit, _) = subspace_orbit(g, &c.rep);
            let orbit: std::collections::HashSet<SubspaceRep> = orbit.into_iter().collect();
            let hits: Vec<usize> = (0..b.len()).filter(|&j| orbit.contains(&b[j].rep)).collect();
            match hits.as_slice() {
                [j] if !used[*j]
                    && b[*j].orbit_size == c.orbit_size
                    && b[*j].stabilizer.order == c.stabilizer.order
                    && (c.orbit_size > LEXMIN_ORBIT_LIMIT || b[*j].rep == c.rep) =>
                {
                    used[*j] = true
                }
                _ => mismatches.push(format!("rank {} class {:?}: oracle orbits {:?}", k, c.rep.basis, hits)),
            }
        }
    }
    Ok(OracleReport {
        counts: ours.iter().map(|l| l.len()).collect(),
        oracle_counts: oracle.iter().map(|l| l.len()).collect(),
        mismatches,
    })
}
