//! Canonical forms of subspaces under a matrix group, by descending a tree of
//! partial flags.
//!
//! A node at depth `j` holds a subspace `F_j` of dimension `j` and the group
//! `H_j` stabilising the flag that leads to it. Lines of `V / F_j` are sorted
//! into `H_j`-orbits, and each orbit gets a key (orbits ordered by size, then
//! by smallest line index). The canonical form of `D` is reached by choosing,
//! level by level, a line of `D / F_j` with the smallest key and moving it to
//! the orbit representative; every such choice lands on the same child node,
//! so after `dim D` steps the node subspace is the canonical form.

use crate::fp::{reduce_mod, rref, Field, FpMat, FpVec, LineIndex};
use crate::group::{Chain, PointSpace};
use crate::mat::{Mat, MAX_RANK};
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

const S: usize = MAX_RANK;

/// How group elements act on `V = F_p^n`.
#[derive(Debug)]
pub struct Acting {
    pub p: u8,
    pub n: usize,
    pub modulus: u32,
    /// Act on the dual space by `g -> (g^-1)^T`.
    pub dual: bool,
    pub field: Field,
    pub space: Arc<PointSpace>,
}

impl Acting {
    pub fn new(p: u8, n: usize, modulus: u32, dual: bool, space: Arc<PointSpace>) -> Acting {
        Acting { p, n, modulus, dual, field: Field::new(p), space }
    }

    pub fn act(&self, g: &Mat) -> FpMat {
        if self.dual {
            let t = g.inverse().expect("group element must be invertible").transpose();
            FpMat::from_mat(&t, self.p)
        } else {
            FpMat::from_mat(g, self.p)
        }
    }
}

#[derive(Debug)]
struct LineTable {
    key: Vec<u32>,
    parent: Vec<u32>,
    via: Vec<u8>,
    reps: Vec<u32>,
    sizes: Vec<u32>,
}

pub struct Node {
    ctx: Arc<Acting>,
    pub keys: Vec<u32>,
    pub flag: Vec<FpVec>,
    pivots: Vec<usize>,
    free: Vec<usize>,
    pub group: Chain,
    gens: Vec<Mat>,
    inv: Vec<Mat>,
    gen_act: Vec<FpMat>,
    inv_act: Vec<FpMat>,
    quot: Vec<FpMat>,
    lines: LineIndex,
    table: OnceLock<Option<LineTable>>,
    children: Mutex<HashMap<u32, Arc<OnceLock<Arc<Node>>>>>,
}

impl Node {
    /// The root node for a group with the given generators and stabilizer chain.
    pub fn root(ctx: Arc<Acting>, group: Chain, gens: Vec<Mat>) -> Arc<Node> {
        Arc::new(Node::new(ctx, Vec::new(), Vec::new(), group, gens))
    }

    fn new(ctx: Arc<Acting>, keys: Vec<u32>, mut flag: Vec<FpVec>, group: Chain, gens: Vec<Mat>) -> Node {
        let n = ctx.n;
        let pivots = rref(&mut flag, n, &ctx.field);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let inv: Vec<Mat> = gens.iter().map(|g| g.inverse().expect("invertible generator")).collect();
        let gen_act: Vec<FpMat> = gens.iter().map(|g| ctx.act(g)).collect();
        let inv_act: Vec<FpMat> = inv.iter().map(|g| ctx.act(g)).collect();
        let mut node = Node {
            lines: LineIndex::new(free.len(), ctx.p),
            ctx,
            keys,
            flag,
            pivots,
            free,
            group,
            gens,
            inv,
            gen_act,
            inv_act,
            quot: Vec::new(),
            table: OnceLock::new(),
            children: Mutex::new(HashMap::new()),
        };
        node.quot = node.gen_act.iter().map(|a| node.quotient_matrix(a)).collect();
        node
    }

    pub fn depth(&self) -> usize {
        self.flag.len()
    }

    pub fn context(&self) -> &Arc<Acting> {
        &self.ctx
    }

    pub fn generators(&self) -> &[Mat] {
        &self.gens
    }

    /// Action of a generator of `H_j` on the whole space.
    pub fn generator_action(&self, s: usize) -> &FpMat {
        &self.gen_act[s]
    }

    fn quotient_matrix(&self, a: &FpMat) -> FpMat {
        let d = self.free.len();
        let mut q = FpMat { n: d as u8, a: [0; S * S] };
        for (b, &cb) in self.free.iter().enumerate() {
            let mut v = [0u8; S];
            v[cb] = 1;
            let mut w = a.apply(&v, self.ctx.p);
            reduce_mod(&mut w, &self.flag, &self.pivots, self.ctx.n, &self.ctx.field);
            for (r, &cr) in self.free.iter().enumerate() {
                q.a[r * S + b] = w[cr];
            }
        }
        q
    }

    /// Coordinates of `v` in `V / F_j` (not normalized).
    pub fn quotient_coords(&self, v: &FpVec) -> FpVec {
        let mut w = *v;
        reduce_mod(&mut w, &self.flag, &self.pivots, self.ctx.n, &self.ctx.field);
        let mut out = [0u8; S];
        for (a, &c) in self.free.iter().enumerate() {
            out[a] = w[c];
        }
        out
    }

    /// A vector of `V` lifting quotient coordinates.
    pub fn lift(&self, q: &FpVec) -> FpVec {
        let mut v = [0u8; S];
        for (a, &c) in self.free.iter().enumerate() {
            v[c] = q[a];
        }
        v
    }

    pub fn line_count(&self) -> u32 {
        self.lines.count
    }

    pub fn line_vector(&self, line: u32) -> FpVec {
        self.lines.vector(line)
    }

    pub fn line_of(&self, q: &FpVec) -> u32 {
        let mut w = *q;
        self.ctx.field.normalize(&mut w, self.free.len());
        self.lines.index_normalized(&w)
    }

    fn table(&self) -> Option<&LineTable> {
        self.table.get_or_init(|| self.build_table()).as_ref()
    }

    fn build_table(&self) -> Option<LineTable> {
        let p = self.ctx.p;
        let d = self.free.len();
        if d == 0 || self.quot.iter().all(|q| q.is_scalar(p)) {
            return None;
        }
        let count = self.lines.count as usize;
        let mut key = vec![u32::MAX; count];
        let mut parent = vec![0u32; count];
        let mut via = vec![0u8; count];
        let mut orbits: Vec<(u32, u32)> = Vec::new();
        let mut queue: Vec<u32> = Vec::new();
        for start in 0..count {
            if key[start] != u32::MAX {
                continue;
            }
            let id = orbits.len() as u32;
            key[start] = id;
            parent[start] = start as u32;
            queue.clear();
            queue.push(start as u32);
            let mut h = 0;
            while h < queue.len() {
                let x = queue[h];
                h += 1;
                let v = self.lines.vector(x);
                for (s, q) in self.quot.iter().enumerate() {
                    let mut w = q.apply(&v, p);
                    self.ctx.field.normalize(&mut w, d);
                    let y = self.lines.index_normalized(&w) as usize;
                    if key[y] == u32::MAX {
                        key[y] = id;
                        parent[y] = x;
                        via[y] = s as u8;
                        queue.push(y as u32);
                    }
                }
            }
            orbits.push((queue.len() as u32, start as u32));
        }
        let mut order: Vec<usize> = (0..orbits.len()).collect();
        order.sort_by_key(|&i| orbits[i]);
        let mut rank = vec![0u32; orbits.len()];
        for (k, &i) in order.iter().enumerate() {
            rank[i] = k as u32;
        }
        for k in key.iter_mut() {
            *k = rank[*k as usize];
        }
        Some(LineTable {
            key,
            parent,
            via,
            reps: order.iter().map(|&i| orbits[i].1).collect(),
            sizes: order.iter().map(|&i| orbits[i].0).collect(),
        })
    }

    pub fn key(&self, line: u32) -> u32 {
        match self.table() {
            Some(t) => t.key[line as usize],
            None => line,
        }
    }

    pub fn num_keys(&self) -> u32 {
        match self.table() {
            Some(t) => t.reps.len() as u32,
            None => self.lines.count,
        }
    }

    pub fn rep_line(&self, key: u32) -> u32 {
        match self.table() {
            Some(t) => t.reps[key as usize],
            None => key,
        }
    }

    pub fn orbit_size(&self, key: u32) -> u32 {
        match self.table() {
            Some(t) => t.sizes[key as usize],
            None => 1,
        }
    }

    /// Generator indices `s_1, ..., s_t` with `line = g_{s_t} ... g_{s_1} (rep)`,
    /// listed from `line` back towards the representative.
    fn path(&self, line: u32) -> Vec<u8> {
        let mut out = Vec::new();
        if let Some(t) = self.table() {
            let mut x = line as usize;
            while t.parent[x] as usize != x {
                out.push(t.via[x]);
                x = t.parent[x] as usize;
            }
        }
        out
    }

    /// Element of `H_j` mapping the line to its orbit representative.
    pub fn to_rep(&self, line: u32) -> Mat {
        let mut g = self.group.identity().clone();
        for s in self.path(line) {
            g = self.inv[s as usize].mul(&g);
        }
        g
    }

    /// Element of `H_j` mapping the orbit representative to the line.
    pub fn from_rep(&self, line: u32) -> Mat {
        let mut g = self.group.identity().clone();
        for s in self.path(line) {
            g = g.mul(&self.gens[s as usize]);
        }
        g
    }

    /// Moves vectors of `V` by the element taking `line` to its representative.
    pub fn move_to_rep(&self, line: u32, vecs: &mut [FpVec]) {
        for s in self.path(line) {
            for v in vecs.iter_mut() {
                *v = self.inv_act[s as usize].apply(v, self.ctx.p);
            }
        }
    }

    pub fn child(&self, key: u32) -> Arc<Node> {
        let cell = {
            let mut map = self.children.lock().unwrap();
            map.entry(key).or_insert_with(|| Arc::new(OnceLock::new())).clone()
        };
        cell.get_or_init(|| Arc::new(self.make_child(key))).clone()
    }

    fn make_child(&self, key: u32) -> Node {
        let rep = self.rep_line(key);
        let u = self.lift(&self.lines.vector(rep));
        let mut flag = self.flag.clone();
        flag.push(u);
        let mut keys = self.keys.clone();
        keys.push(key);
        let Some(table) = self.table() else {
            return Node::new(self.ctx.clone(), keys, flag, self.group.clone(), self.gens.clone());
        };
        let size = table.sizes[key as usize] as u128;
        let target = self.group.order() / size;
        // orbit lines from the representative
        let d = self.free.len();
        let mut orbit = vec![rep];
        let mut seen: HashSet<u32> = [rep].into();
        let mut h = 0;
        while h < orbit.len() {
            let v = self.lines.vector(orbit[h]);
            h += 1;
            for q in &self.quot {
                let mut w = q.apply(&v, self.ctx.p);
                self.ctx.field.normalize(&mut w, d);
                let y = self.lines.index_normalized(&w);
                if seen.insert(y) {
                    orbit.push(y);
                }
            }
        }
        let candidates = orbit.iter().flat_map(|&x| {
            let ux = self.from_rep(x);
            let v = self.lines.vector(x);
            (0..self.gens.len()).map(move |s| {
                let mut w = self.quot[s].apply(&v, self.ctx.p);
                self.ctx.field.normalize(&mut w, d);
                let y = self.lines.index_normalized(&w);
                self.to_rep(y).mul(&self.gens[s]).mul(&ux)
            })
        });
        let chain = Chain::from_candidates(self.ctx.space.clone(), self.group.identity().modulus(), candidates, target)
            .unwrap_or_else(|e| panic!("line stabilizer: {}", e));
        let gens = chain.generators().to_vec();
        Node::new(self.ctx.clone(), keys, flag, chain, gens)
    }
}

/// Result of canonicalising a subspace `D`.
pub struct Canon {
    pub keys: Vec<u32>,
    pub node: Arc<Node>,
    /// Element mapping `D` onto `node.flag` (identity unless tracked).
    pub elem: Mat,
    /// Number of minimal flags of `D`; `|Stab(D)| = |H_k| * mult`.
    pub mult: u128,
    /// Elements of `Stab(D)` found while merging branches.
    pub autos: Vec<Mat>,
}

impl Canon {
    pub fn stabilizer_order(&self) -> u128 {
        self.node.group.order() * self.mult
    }

    /// Stabilizer of the canonical subspace `node.flag`.
    pub fn stabilizer(&self) -> Chain {
        let node = &self.node;
        let einv = self.elem.inverse().expect("invertible");
        let conj = self.autos.iter().map(|a| self.elem.mul(a).mul(&einv));
        let cands = node.gens.iter().cloned().chain(conj);
        Chain::from_candidates(node.ctx.space.clone(), node.group.identity().modulus(), cands, self.stabilizer_order())
            .unwrap_or_else(|e| panic!("subspace stabilizer: {}", e))
    }
}

struct Branch {
    sub: Vec<FpVec>,
    elem: Option<Mat>,
    mult: u128,
}

/// Canonical form of the subspace with RREF basis `d`. With `target`, returns
/// `None` as soon as the key sequence departs from it.
pub fn canon(root: &Arc<Node>, d: &[FpVec], target: Option<&[u32]>, track: bool) -> Option<Canon> {
    let ctx = root.ctx.clone();
    let (p, n, f) = (ctx.p, ctx.n, &ctx.field);
    let k = d.len();
    let mut node = root.clone();
    let mut branches = vec![Branch {
        sub: d.to_vec(),
        elem: track.then(|| root.group.identity().clone()),
        mult: 1,
    }];
    let mut autos = Vec::new();
    let mut keys = Vec::with_capacity(k);
    for j in 0..k {
        let dq = node.free.len();
        let mut best = u32::MAX;
        let mut picks: Vec<(usize, u32)> = Vec::new();
        for (bi, b) in branches.iter().enumerate() {
            let mut q: Vec<FpVec> = b.sub.iter().map(|v| node.quotient_coords(v)).collect();
            rref(&mut q, dq, f);
            let qp: Vec<usize> = q.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()).collect();
            debug_assert_eq!(q.len(), k - j);
            for lead in 0..q.len() {
                let tail = q.len() - lead - 1;
                let total = (p as u64).pow(tail as u32);
                for code in 0..total {
                    let mut v = q[lead];
                    let mut c = code;
                    for row in q.iter().skip(lead + 1) {
                        let a = (c % p as u64) as u8;
                        c /= p as u64;
                        f.axpy(&mut v, a, row, dq);
                    }
                    debug_assert_eq!(v[qp[lead]], 1);
                    let line = node.lines.index_normalized(&v);
                    let key = node.key(line);
                    if key < best {
                        best = key;
                        picks.clear();
                    }
                    if key == best {
                        picks.push((bi, line));
                    }
                }
            }
        }
        if let Some(t) = target {
            if best != t[j] {
                return None;
            }
        }
        keys.push(best);
        let mut next: Vec<Branch> = Vec::new();
        let mut index: HashMap<Vec<FpVec>, usize> = HashMap::new();
        for (bi, line) in picks {
            let b = &branches[bi];
            let mut sub = b.sub.clone();
            node.move_to_rep(line, &mut sub);
            rref(&mut sub, n, f);
            let elem = b.elem.as_ref().map(|e| node.to_rep(line).mul(e));
            match index.get(&sub) {
                Some(&i) => {
                    next[i].mult += b.mult;
                    if let (Some(e1), Some(e2)) = (&next[i].elem, &elem) {
                        autos.push(e1.inverse().expect("invertible").mul(e2));
                    }
                }
                None => {
                    index.insert(sub.clone(), next.len());
                    next.push(Branch { sub, elem, mult: b.mult });
                }
            }
        }
        branches = next;
        node = node.child(best);
    }
    debug_assert_eq!(branches.len(), 1);
    let b = branches.pop().unwrap();
    debug_assert_eq!(b.sub, node.flag);
    Some(Canon {
        keys,
        elem: b.elem.unwrap_or_else(|| root.group.identity().clone()),
        mult: b.mult,
        autos,
        node,
    })
}

/// One orbit found by orderly generation.
pub struct Found {
    pub node: Arc<Node>,
    pub stabilizer: Chain,
}

/// Orderly generation of one canonical subspace per orbit, ranks `0..=max_rank`.
/// With `keep`, only subspaces passing the predicate are generated (the
/// predicate must be inherited by subspaces).
pub fn orderly(root: &Arc<Node>, max_rank: usize, keep: Option<&(dyn Fn(&[FpVec]) -> bool + Sync)>) -> Vec<Vec<Found>> {
    let mut out: Vec<Vec<Found>> = vec![vec![Found { node: root.clone(), stabilizer: root.group.clone() }]];
    let n = root.ctx.n;
    let f = &root.ctx.field;
    for k in 0..max_rank.min(n) {
        let prev = &out[k];
        let jobs: Vec<(usize, u32)> = prev
            .iter()
            .enumerate()
            .flat_map(|(i, c)| (0..c.node.num_keys()).map(move |key| (i, key)))
            .collect();
        let level: Vec<Found> = jobs
            .par_iter()
            .filter_map(|&(i, key)| {
                let c = &prev[i].node;
                let rep = c.rep_line(key);
                let mut d = c.flag.clone();
                d.push(c.lift(&c.line_vector(rep)));
                rref(&mut d, n, f);
                if let Some(keep) = keep {
                    if !keep(&d) {
                        return None;
                    }
                }
                let mut target = c.keys.clone();
                target.push(key);
                canon(root, &d, Some(&target), false)?;
                let full = canon(root, &d, Some(&target), true).expect("accepted subspace");
                let stabilizer = full.stabilizer();
                Some(Found { node: full.node, stabilizer })
            })
            .collect();
        if level.is_empty() {
            break;
        }
        out.push(level);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gaussian_binomial;

    fn gl_root(n: usize, p: u8) -> Arc<Node> {
        // transvection and a cycle generate SL_n(p); add a diagonal for GL
        let mut t = Mat::identity(n, p as u32);
        t.set(0, 1, 1);
        let mut c = Mat::zero(n, p as u32);
        for i in 0..n {
            c.set((i + 1) % n, i, 1);
        }
        let mut dg = Mat::identity(n, p as u32);
        dg.set(0, 0, if p > 2 { 2 } else { 1 });
        let gens = vec![t, c, dg];
        let space = Arc::new(PointSpace::standard(n, p as u32));
        let chain = Chain::from_gens(space.clone(), p as u32, &gens);
        Node::root(Arc::new(Acting::new(p, n, p as u32, false, space)), chain, gens)
    }

    #[test]
    fn general_linear_group_is_transitive_on_each_rank() {
        let root = gl_root(4, 3);
        let levels = orderly(&root, 4, None);
        for (k, level) in levels.iter().enumerate() {
            assert_eq!(level.len(), 1, "rank {}", k);
            let orbit = root.group.order() / level[0].stabilizer.order();
            assert_eq!(orbit, gaussian_binomial(4, k as u32, 3));
        }
    }

    #[test]
    fn trivial_group_gives_all_subspaces() {
        let n = 3;
        let space = Arc::new(PointSpace::standard(n, 2));
        let chain = Chain::trivial(space.clone(), 2);
        let root = Node::root(Arc::new(Acting::new(2, n, 2, false, space)), chain, Vec::new());
        let levels = orderly(&root, n, None);
        let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        assert_eq!(counts, vec![1, 7, 7, 1]);
    }
}
