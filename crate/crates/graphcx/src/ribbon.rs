//! Ribbon graphs as permutations of flags, grafting along ordered partitions,
//! the ribbon graph complex with `delta` and `delta1`, and the map from
//! trivalent-compatible oriented graphs.
//!
//! Flags are `0..2k`; edge `i` is the pair `(2i, 2i + 1)`, so the involution
//! is `f ^ 1` and only `sigma` is stored.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::canon::perm_sign;
use crate::error::{Error, Result};
use crate::graph::LabeledDiGraph;
use crate::matrix::{SparseRationalMatrix, Q};

/// Largest edge count for which [`rgc_basis`] enumerates permutations.
pub const MAX_BASIS_EDGES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RibbonGraph {
    pub k: usize,
    /// Image array of the vertex permutation on flags.
    pub sigma: Vec<usize>,
}

pub type RibbonCombo = BTreeMap<RibbonGraph, Q>;

#[inline]
pub fn iota(f: usize) -> usize {
    f ^ 1
}

/// Cycles of a permutation, each starting at its smallest element, listed
/// by smallest element.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut f = start;
        while !seen[f] {
            seen[f] = true;
            cyc.push(f);
            f = perm[f];
        }
        out.push(cyc);
    }
    out
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn boundary_map(sigma: &[usize]) -> Vec<usize> {
    let inv = inverse(sigma);
    (0..sigma.len()).map(|f| inv[iota(f)]).collect()
}

fn orbit_of(perm: &[usize], f: usize) -> Vec<usize> {
    let mut cyc = vec![f];
    let mut x = perm[f];
    while x != f {
        cyc.push(x);
        x = perm[x];
    }
    cyc
}

impl RibbonGraph {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        if sigma.len() % 2 != 0 {
            return Err(Error::Invalid("a ribbon graph needs an even number of flags".into()));
        }
        let mut seen = vec![false; sigma.len()];
        for &x in &sigma {
            if x >= sigma.len() || seen[x] {
                return Err(Error::Invalid(format!("{sigma:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(RibbonGraph { k: sigma.len() / 2, sigma })
    }

    /// One edge between two univalent vertices.
    pub fn edge() -> Self {
        RibbonGraph { k: 1, sigma: vec![0, 1] }
    }

    /// One edge whose two flags sit at the same vertex.
    pub fn loop_graph() -> Self {
        RibbonGraph { k: 1, sigma: vec![1, 0] }
    }

    pub fn flags(&self) -> usize {
        2 * self.k
    }

    pub fn vertices(&self) -> Vec<Vec<usize>> {
        cycles(&self.sigma)
    }

    /// Orbits of `sigma^-1 . iota`.
    pub fn boundaries(&self) -> Vec<Vec<usize>> {
        cycles(&boundary_map(&self.sigma))
    }

    pub fn vertex_of(&self, f: usize) -> Vec<usize> {
        orbit_of(&self.sigma, f)
    }

    pub fn boundary_of(&self, f: usize) -> Vec<usize> {
        orbit_of(&boundary_map(&self.sigma), f)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.flags();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for g in [self.sigma[f], iota(f)] {
                if !seen[g] {
                    seen[g] = true;
                    stack.push(g);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// `(2 - V + E - B) / 2` for a connected ribbon graph.
    pub fn genus(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Invalid("genus needs a connected ribbon graph".into()));
        }
        let chi = self.vertices().len() as i64 - self.k as i64 + self.boundaries().len() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::Invalid(format!("Euler characteristic {chi} is not of a surface")));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    /// Flags of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &RibbonGraph) -> RibbonGraph {
        let off = self.flags();
        let mut sigma = self.sigma.clone();
        sigma.extend(other.sigma.iter().map(|&x| x + off));
        RibbonGraph { k: self.k + other.k, sigma }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "k": self.k,
            "sigma": self.sigma,
            "vlabels": self.vertices(),
            "blabels": self.boundaries(),
        })
        .to_string()
    }
}

/// An ordered partition of a vertex over the corners of a boundary:
/// `blocks[i]` is the ordered block attached to corner `corners[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    pub corners: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

/// All ordered partitions of the cyclic set `v` over the cyclic set `b`:
/// the blocks, read in the cyclic order of `b`, concatenate to a rotation
/// of `v`.
pub fn ordered_partitions(b: &[usize], v: &[usize]) -> Vec<OrderedPartition> {
    let mut out = Vec::new();
    if b.is_empty() {
        if v.is_empty() {
            out.push(OrderedPartition { corners: Vec::new(), blocks: Vec::new() });
        }
        return out;
    }
    let rotations = v.len().max(1);
    let mut sizes = vec![0; b.len()];
    for r in 0..rotations {
        let seq: Vec<usize> = (0..v.len()).map(|i| v[(i + r) % v.len()]).collect();
        split(0, v.len(), &mut sizes, &mut |sizes| {
            let mut blocks = Vec::with_capacity(b.len());
            let mut at = 0;
            for &s in sizes.iter() {
                blocks.push(seq[at..at + s].to_vec());
                at += s;
            }
            out.push(OrderedPartition { corners: b.to_vec(), blocks });
        });
    }
    out
}

fn split(i: usize, left: usize, sizes: &mut [usize], emit: &mut dyn FnMut(&[usize])) {
    if i + 1 == sizes.len() {
        sizes[i] = left;
        emit(sizes);
        return;
    }
    for s in 0..=left {
        sizes[i] = s;
        split(i + 1, left - s, sizes, emit);
    }
}

/// Grafted vertex permutation: the flags of the partitioned vertex are
/// spliced into the corners of the boundary. Flags elsewhere keep their
/// images.
pub fn graft_sigma(sigma: &[usize], p: &OrderedPartition) -> Vec<usize> {
    let mut out = sigma.to_vec();
    for (&j, block) in p.corners.iter().zip(&p.blocks) {
        let Some(&first) = block.first() else { continue };
        out[j] = first;
        for w in block.windows(2) {
            out[w[0]] = w[1];
        }
        out[*block.last().unwrap()] = sigma[j];
    }
    out
}

/// Grafts the vertex `v` into the boundary `b` of `r` along `p`.
pub fn graft(r: &RibbonGraph, v: &[usize], b: &[usize], p: &OrderedPartition) -> Result<RibbonGraph> {
    if v.iter().any(|f| b.contains(f)) {
        return Err(Error::Invalid("grafted vertex meets the boundary".into()));
    }
    Ok(RibbonGraph { k: r.k, sigma: graft_sigma(&r.sigma, p) })
}

/// Signed canonical representative under edge permutations (sign of the
/// permutation) and edge reversals (no sign). Labels, when given as
/// representative flags, are carried along and take part in the comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonCanonical {
    pub graph: RibbonGraph,
    pub vlabels: Vec<usize>,
    pub blabels: Vec<usize>,
    pub sign: i64,
    pub is_zero: bool,
}

fn number_from(r: &RibbonGraph, start: usize) -> Vec<usize> {
    let n = r.flags();
    let mut new = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    new[start] = 0;
    new[iota(start)] = 1;
    order.push(start);
    order.push(iota(start));
    let mut at = 0;
    while at < order.len() {
        let g = r.sigma[order[at]];
        if new[g] == usize::MAX {
            let m = order.len();
            new[g] = m;
            new[iota(g)] = m + 1;
            order.push(g);
            order.push(iota(g));
        }
        at += 1;
    }
    new
}

pub fn canonical_labeled(r: &RibbonGraph, vlabels: &[usize], blabels: &[usize]) -> Result<RibbonCanonical> {
    if !r.is_connected() {
        return Err(Error::Invalid("canonical forms need a connected ribbon graph".into()));
    }
    let n = r.flags();
    let bmap = boundary_map(&r.sigma);
    let mut best: Option<(Vec<usize>, Vec<usize>, Vec<usize>)> = None;
    let mut signs = Vec::new();
    for start in 0..n {
        let new = number_from(r, start);
        let mut sigma = vec![0; n];
        for f in 0..n {
            sigma[new[f]] = new[r.sigma[f]];
        }
        let min_in = |perm: &[usize], f: usize| orbit_of(perm, f).into_iter().map(|x| new[x]).min().unwrap();
        let vl: Vec<usize> = vlabels.iter().map(|&f| min_in(&r.sigma, f)).collect();
        let bl: Vec<usize> = blabels.iter().map(|&f| min_in(&bmap, f)).collect();
        let edge_perm: Vec<usize> = (0..r.k).map(|e| new[2 * e] / 2).collect();
        let sign = perm_sign(&edge_perm);
        let cand = (sigma, vl, bl);
        match &best {
            Some(b) if cand > *b => {}
            Some(b) if cand == *b => signs.push(sign),
            _ => {
                best = Some(cand);
                signs = vec![sign];
            }
        }
    }
    let (sigma, vlabels, blabels) = best.unwrap();
    let is_zero = signs.iter().any(|&s| s != signs[0]);
    Ok(RibbonCanonical { graph: RibbonGraph { k: r.k, sigma }, vlabels, blabels, sign: signs[0], is_zero })
}

/// Unlabeled canonical form.
pub fn canonical(r: &RibbonGraph) -> Result<RibbonCanonical> {
    canonical_labeled(r, &[], &[])
}

pub fn add_ribbon(combo: &mut RibbonCombo, r: &RibbonGraph, c: Q) -> Result<()> {
    let t = canonical(r)?;
    if t.is_zero {
        return Ok(());
    }
    let x = c * Q::from_integer(t.sign);
    let entry = combo.entry(t.graph.clone()).or_insert(Q::from_integer(0));
    *entry += x;
    if *entry == Q::from_integer(0) {
        combo.remove(&t.graph);
    }
    Ok(())
}

pub fn add_ribbon_combo(into: &mut RibbonCombo, other: &RibbonCombo, factor: Q) {
    for (g, &c) in other {
        let e = into.entry(g.clone()).or_insert(Q::from_integer(0));
        *e += c * factor;
        if *e == Q::from_integer(0) {
            into.remove(g);
        }
    }
}

// ---------------------------------------------------------------------------
// labeled composition

/// A ribbon graph with numbered vertices and boundaries, each given by one of
/// its flags.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledRibbon {
    pub graph: RibbonGraph,
    pub vlabels: Vec<usize>,
    pub blabels: Vec<usize>,
}

pub type LabeledCombo = BTreeMap<LabeledRibbon, Q>;

impl LabeledRibbon {
    /// Labels in the default order (by smallest flag).
    pub fn with_default_labels(graph: RibbonGraph) -> Self {
        let vlabels = graph.vertices().iter().map(|c| c[0]).collect();
        let blabels = graph.boundaries().iter().map(|c| c[0]).collect();
        LabeledRibbon { graph, vlabels, blabels }
    }

    /// Canonical representative with its sign, or `None` for a zero class.
    /// Disconnected graphs are only normalized (labels moved to the smallest
    /// flag of their orbit).
    pub fn normalized(&self) -> Result<Option<(LabeledRibbon, i64)>> {
        if !self.graph.is_connected() {
            let bmap = boundary_map(&self.graph.sigma);
            let low = |perm: &[usize], f: usize| orbit_of(perm, f).into_iter().min().unwrap();
            let vlabels = self.vlabels.iter().map(|&f| low(&self.graph.sigma, f)).collect();
            let blabels = self.blabels.iter().map(|&f| low(&bmap, f)).collect();
            return Ok(Some((LabeledRibbon { graph: self.graph.clone(), vlabels, blabels }, 1)));
        }
        let c = canonical_labeled(&self.graph, &self.vlabels, &self.blabels)?;
        if c.is_zero {
            return Ok(None);
        }
        Ok(Some((LabeledRibbon { graph: c.graph, vlabels: c.vlabels, blabels: c.blabels }, c.sign)))
    }
}

fn add_labeled(combo: &mut LabeledCombo, r: LabeledRibbon, c: Q) -> Result<()> {
    let Some((t, sign)) = r.normalized()? else { return Ok(()) };
    let e = combo.entry(t.clone()).or_insert(Q::from_integer(0));
    *e += c * Q::from_integer(sign);
    if *e == Q::from_integer(0) {
        combo.remove(&t);
    }
    Ok(())
}

/// Composes the last `k` boundaries of `a` with the first `k` vertices of
/// `b`, summing over all ordered partitions. Vertices of the result are
/// those of `a` followed by the remaining ones of `b`; boundaries are the
/// remaining ones of `a` followed by those of `b`. Edges of `a` come first.
pub fn prop_compose_one(a: &LabeledRibbon, b: &LabeledRibbon, k: usize) -> Result<LabeledCombo> {
    let (m1, n2) = (a.blabels.len(), b.vlabels.len());
    if k > m1 || k > n2 {
        return Err(Error::Invalid(format!("cannot compose {k} boundaries into {n2} vertices from {m1} boundaries")));
    }
    let off = a.graph.flags();
    let union = a.graph.disjoint_union(&b.graph);
    let mut vlabels = a.vlabels.clone();
    vlabels.extend(b.vlabels[k..].iter().map(|&f| f + off));
    let mut blabels = a.blabels[..m1 - k].to_vec();
    blabels.extend(b.blabels.iter().map(|&f| f + off));

    let mut sigmas = vec![union.sigma.clone()];
    for i in 0..k {
        let bflag = a.blabels[m1 - k + i];
        let vflag = b.vlabels[i] + off;
        let mut next = Vec::new();
        for s in &sigmas {
            let bnd = orbit_of(&boundary_map(s), bflag);
            let vtx = orbit_of(s, vflag);
            if vtx.iter().any(|f| bnd.contains(f)) {
                return Err(Error::Invalid("grafted vertex meets the boundary".into()));
            }
            for p in ordered_partitions(&bnd, &vtx) {
                next.push(graft_sigma(s, &p));
            }
        }
        sigmas = next;
    }
    let mut out = LabeledCombo::new();
    for s in sigmas {
        let r = LabeledRibbon { graph: RibbonGraph { k: union.k, sigma: s }, vlabels: vlabels.clone(), blabels: blabels.clone() };
        add_labeled(&mut out, r, Q::from_integer(1))?;
    }
    Ok(out)
}

/// Bilinear extension of [`prop_compose_one`].
pub fn prop_compose(a: &LabeledCombo, b: &LabeledCombo, k: usize) -> Result<LabeledCombo> {
    let mut out = LabeledCombo::new();
    for (x, &cx) in a {
        for (y, &cy) in b {
            for (z, cz) in prop_compose_one(x, y, k)? {
                let e = out.entry(z.clone()).or_insert(Q::from_integer(0));
                *e += cx * cy * cz;
                if *e == Q::from_integer(0) {
                    out.remove(&z);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// the complex

/// Degree of a ribbon graph with `k` edges; both parts of the differential
/// add one edge and raise it by one.
pub fn ribbon_degree(k: usize) -> i64 {
    k as i64
}

fn extended(r: &RibbonGraph, as_loop: bool) -> Vec<usize> {
    let n = r.flags();
    let mut sigma = r.sigma.clone();
    if as_loop {
        sigma.extend([n + 1, n]);
    } else {
        sigma.extend([n, n + 1]);
    }
    sigma
}

/// Vertex splitting. The new edge comes last in the edge order. Both
/// orientations of the new edge are summed, hence the factor one half.
pub fn delta(r: &RibbonGraph) -> Result<RibbonCombo> {
    let n = r.flags();
    let base = extended(r, false);
    let k = r.k + 1;
    let mut out = RibbonCombo::new();
    let one = Q::new(1, 2);
    for v in r.vertices() {
        for p in ordered_partitions(&[n, n + 1], &v) {
            add_ribbon(&mut out, &RibbonGraph { k, sigma: graft_sigma(&base, &p) }, one)?;
        }
    }
    for b in r.boundaries() {
        for end in [n, n + 1] {
            for p in ordered_partitions(&b, &[end]) {
                add_ribbon(&mut out, &RibbonGraph { k, sigma: graft_sigma(&base, &p) }, -one)?;
            }
        }
    }
    Ok(out)
}

/// Edge insertion between corners of one boundary. The new edge comes last;
/// normalized like [`delta`].
pub fn delta1(r: &RibbonGraph) -> Result<RibbonCombo> {
    let n = r.flags();
    let base = extended(r, true);
    let k = r.k + 1;
    let mut out = RibbonCombo::new();
    let one = Q::new(1, 2);
    for b in r.boundaries() {
        for p in ordered_partitions(&b, &[n, n + 1]) {
            add_ribbon(&mut out, &RibbonGraph { k, sigma: graft_sigma(&base, &p) }, one)?;
        }
    }
    for v in r.vertices() {
        for p in ordered_partitions(&[n], &v).into_iter().chain(ordered_partitions(&[n + 1], &v)) {
            add_ribbon(&mut out, &RibbonGraph { k, sigma: graft_sigma(&base, &p) }, -one)?;
        }
    }
    Ok(out)
}

pub fn apply_ribbon<F>(c: &RibbonCombo, f: F) -> Result<RibbonCombo>
where
    F: Fn(&RibbonGraph) -> Result<RibbonCombo>,
{
    let mut out = RibbonCombo::new();
    for (g, &x) in c {
        add_ribbon_combo(&mut out, &f(g)?, x);
    }
    Ok(out)
}

fn for_each_perm(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(perm: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize])) {
        if perm.len() == used.len() {
            f(perm);
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                perm.push(x);
                rec(perm, used, f);
                perm.pop();
                used[x] = false;
            }
        }
    }
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], f);
}

fn all_classes(k: usize) -> Result<std::sync::Arc<Vec<RibbonGraph>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<Vec<RibbonGraph>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&k) {
        return Ok(v.clone());
    }
    if k > MAX_BASIS_EDGES {
        return Err(Error::Budget(format!("ribbon bases are enumerated up to {MAX_BASIS_EDGES} edges")));
    }
    let mut classes = std::collections::BTreeSet::new();
    let mut err = None;
    for_each_perm(2 * k, &mut |p| {
        let r = RibbonGraph { k, sigma: p.to_vec() };
        if k == 0 || !r.is_connected() {
            return;
        }
        match canonical(&r) {
            Ok(c) if !c.is_zero => {
                classes.insert(c.graph);
            }
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let v = std::sync::Arc::new(classes.into_iter().collect::<Vec<_>>());
    cache.lock().unwrap().insert(k, v.clone());
    Ok(v)
}

/// Canonical nonzero connected ribbon graphs with `k` edges, `n` vertices and
/// `m` boundaries. `None` leaves the count free.
pub fn rgc_basis(k: usize, n: Option<usize>, m: Option<usize>) -> Result<Vec<RibbonGraph>> {
    Ok(all_classes(k)?
        .iter()
        .filter(|r| n.is_none_or(|n| r.vertices().len() == n) && m.is_none_or(|m| r.boundaries().len() == m))
        .cloned()
        .collect())
}

/// Matrix of a ribbon operator between two ordered bases.
pub fn ribbon_matrix<F>(src: &[RibbonGraph], dst: &[RibbonGraph], op: F) -> Result<SparseRationalMatrix>
where
    F: Fn(&RibbonGraph) -> Result<RibbonCombo>,
{
    let index: HashMap<&RibbonGraph, usize> = dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut triplets = Vec::new();
    for (j, g) in src.iter().enumerate() {
        for (h, c) in op(g)? {
            let i = *index.get(&h).ok_or_else(|| Error::MissingTerm(h.to_json()))?;
            triplets.push((i, j, c));
        }
    }
    SparseRationalMatrix::from_triplets(dst.len(), src.len(), triplets)
}

/// The ribbon complex with `delta + delta1` (or `delta` alone when `graded`)
/// on graphs with `1..=kmax` edges, graded by the edge count. Both ends of the
/// window are treated as truncated.
pub fn rgc_window(kmax: usize, graded: bool) -> Result<crate::linalg::ChainComplexWindow> {
    let bases = (1..=kmax).map(|k| rgc_basis(k, None, None)).collect::<Result<Vec<_>>>()?;
    let op = |r: &RibbonGraph| {
        let mut out = delta(r)?;
        if !graded {
            add_ribbon_combo(&mut out, &delta1(r)?, Q::from_integer(1));
        }
        Ok(out)
    };
    let diffs = bases.windows(2).map(|w| ribbon_matrix(&w[0], &w[1], op)).collect::<Result<Vec<_>>>()?;
    Ok(crate::linalg::ChainComplexWindow {
        lo: ribbon_degree(1),
        dims: bases.iter().map(|b| b.len()).collect(),
        diffs,
        closed_below: false,
        closed_above: false,
    })
}

// ---------------------------------------------------------------------------
// the map from oriented graphs

/// Whether every vertex is trivalent once sources get an incoming leg and
/// targets an outgoing one.
pub fn is_trivalent_compatible(g: &LabeledDiGraph) -> bool {
    let (ind, outd) = (g.in_degrees(), g.out_degrees());
    (0..g.v).all(|x| {
        let i = ind[x] + usize::from(ind[x] == 0);
        let o = outd[x] + usize::from(outd[x] == 0);
        (i, o) == (2, 1) || (i, o) == (1, 2)
    })
}

/// Vertex orders compatible with the edge directions, smallest index first.
pub fn topological_order(g: &LabeledDiGraph) -> Option<Vec<usize>> {
    let mut indeg = g.in_degrees();
    let mut order = Vec::with_capacity(g.v);
    let mut ready: std::collections::BTreeSet<usize> = (0..g.v).filter(|&x| indeg[x] == 0).collect();
    while let Some(x) = ready.pop_first() {
        order.push(x);
        for &(t, h) in &g.edges {
            if t as usize == x {
                indeg[h as usize] -= 1;
                if indeg[h as usize] == 0 {
                    ready.insert(h as usize);
                }
            }
        }
    }
    (order.len() == g.v).then_some(order)
}

/// The map with the default topological order.
pub fn f_map(g: &LabeledDiGraph) -> Result<RibbonCombo> {
    let order = topological_order(g).ok_or_else(|| Error::WrongFamily(format!("{g} has a directed cycle")))?;
    f_map_with_order(g, &order)
}

/// Each vertex `x` becomes the one-edge ribbon graph on flags `2x, 2x + 1`:
/// the edge graph for two inputs, the loop graph for two outputs. Wiring is
/// done by grafting input vertices into output boundaries, visiting the
/// vertices in `order`.
pub fn f_map_with_order(g: &LabeledDiGraph, order: &[usize]) -> Result<RibbonCombo> {
    let mut out = RibbonCombo::new();
    // (-1)^targets makes the map commute with delta + delta1 as displayed
    let sign = if g.count_targets() % 2 == 0 { 1 } else { -1 };
    for s in f_grafts(g, order)? {
        add_ribbon(&mut out, &RibbonGraph { k: g.v, sigma: s }, Q::from_integer(sign))?;
    }
    Ok(out)
}

/// Vertex permutations of all grafted terms, before canonicalization, sorted.
/// Empty unless `g` is trivalent-compatible.
pub fn f_grafts(g: &LabeledDiGraph, order: &[usize]) -> Result<Vec<Vec<usize>>> {
    if !is_trivalent_compatible(g) {
        return Ok(Vec::new());
    }
    let ind = g.in_degrees();
    let mut sigma = vec![0; 2 * g.v];
    let mut inputs: Vec<Vec<usize>> = vec![Vec::new(); g.v];
    let mut outputs: Vec<Vec<usize>> = vec![Vec::new(); g.v];
    for x in 0..g.v {
        let two_in = ind[x] + usize::from(ind[x] == 0) == 2;
        if two_in {
            sigma[2 * x] = 2 * x;
            sigma[2 * x + 1] = 2 * x + 1;
            inputs[x] = vec![2 * x, 2 * x + 1];
            outputs[x] = vec![2 * x];
        } else {
            sigma[2 * x] = 2 * x + 1;
            sigma[2 * x + 1] = 2 * x;
            inputs[x] = vec![2 * x];
            outputs[x] = vec![2 * x, 2 * x + 1];
        }
    }
    // the i-th incoming edge uses the i-th input, likewise for outputs
    let mut wires = Vec::with_capacity(g.e());
    let (mut used_in, mut used_out) = (vec![0; g.v], vec![0; g.v]);
    for &(t, h) in &g.edges {
        let (t, h) = (t as usize, h as usize);
        let bflag = outputs[t][used_out[t]];
        let vflag = inputs[h][used_in[h]];
        used_out[t] += 1;
        used_in[h] += 1;
        wires.push((h, bflag, vflag));
    }
    let mut pos = vec![usize::MAX; g.v];
    for (i, &x) in order.iter().enumerate() {
        if x >= g.v || pos[x] != usize::MAX {
            return Err(Error::Invalid(format!("{order:?} is not an ordering of the vertices of {g}")));
        }
        pos[x] = i;
    }
    if order.len() != g.v {
        return Err(Error::Invalid(format!("{order:?} is not an ordering of the vertices of {g}")));
    }
    for &(t, h) in &g.edges {
        if pos[t as usize] >= pos[h as usize] {
            return Err(Error::Invalid(format!("{order:?} is not a topological order of {g}")));
        }
    }
    wires.sort_by_key(|&(h, b, v)| (pos[h], b, v));
    let mut sigmas = vec![sigma];
    for &(_, bflag, vflag) in &wires {
        let mut next = Vec::new();
        for s in &sigmas {
            let bnd = orbit_of(&boundary_map(s), bflag);
            let vtx = orbit_of(s, vflag);
            if vtx.iter().any(|f| bnd.contains(f)) {
                return Err(Error::Invalid("grafted vertex meets the boundary".into()));
            }
            for p in ordered_partitions(&bnd, &vtx) {
                next.push(graft_sigma(s, &p));
            }
        }
        sigmas = next;
    }
    sigmas.sort();
    Ok(sigmas)
}
