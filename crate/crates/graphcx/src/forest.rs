//! Spanning forests of hairy graphs and the map from hairy graphs to oriented
//! graphs with one more unit of degree, its dual, and the skeleton
//! representation of oriented graphs.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complexes::{add_term, Combo, ComplexSlice, Differential, SliceKey, SliceStore};
use crate::canon::perm_sign;
use crate::error::{Error, Result};
use crate::graph::{canonicalize, CanonicalTerm, Family, FamilyTag, LabeledDiGraph, Vx};

/// Sorted edge indices of a host hairy graph.
pub type Forest = Vec<usize>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Spanning,
    DoubleHair,
    Cycled,
}

struct Components {
    parent: Vec<usize>,
    hairs: Vec<usize>,
}

impl Components {
    fn new(g: &LabeledDiGraph) -> Self {
        Components { parent: (0..g.v).collect(), hairs: g.hair_counts() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }
}

struct Enumerator<'a> {
    g: &'a LabeledDiGraph,
    mode: Mode,
    size: usize,
    chosen: Vec<usize>,
    out: Vec<Forest>,
}

impl Enumerator<'_> {
    /// `extra` is 1 once the single cycle of a cycled forest has been used.
    fn go(&mut self, i: usize, comps: &Components, extra: usize) {
        if self.chosen.len() == self.size {
            let all_hairy = (0..self.g.v).all(|x| comps.find(x) != x || comps.hairs[x] > 0);
            // a double-hair forest has one component fewer than hairs, so
            // with every component hairy and at most two hairs each, exactly
            // one carries two
            let done = match self.mode {
                Mode::Cycled => extra == 1,
                _ => true,
            };
            if all_hairy && done {
                self.out.push(self.chosen.clone());
            }
            return;
        }
        if self.g.e() - i < self.size - self.chosen.len() {
            return;
        }
        let (a, b) = self.g.edges[i];
        let (ra, rb) = (comps.find(a as usize), comps.find(b as usize));
        let step = if ra == rb {
            (self.mode == Mode::Cycled && extra == 0).then_some(1)
        } else {
            let merged = comps.hairs[ra] + comps.hairs[rb];
            let cap = if self.mode == Mode::DoubleHair { 2 } else { 1 };
            (merged <= cap).then_some(extra)
        };
        if let Some(next_extra) = step {
            let mut c2 = Components { parent: comps.parent.clone(), hairs: comps.hairs.clone() };
            if ra != rb {
                c2.parent[ra] = rb;
                c2.hairs[rb] += c2.hairs[ra];
            }
            self.chosen.push(i);
            self.go(i + 1, &c2, next_extra);
            self.chosen.pop();
        }
        self.go(i + 1, comps, extra);
    }
}

fn enumerate(g: &LabeledDiGraph, mode: Mode) -> Vec<Forest> {
    let s = g.s();
    if s == 0 || s > g.v {
        return Vec::new();
    }
    let size = match mode {
        Mode::Spanning => g.v - s,
        _ => g.v - s + 1,
    };
    if size > g.e() {
        return Vec::new();
    }
    let mut en = Enumerator { g, mode, size, chosen: Vec::new(), out: Vec::new() };
    en.go(0, &Components::new(g), 0);
    en.out
}

/// Acyclic edge sets covering all vertices whose every component carries
/// exactly one hair.
pub fn spanning_forests(g: &LabeledDiGraph) -> Vec<Forest> {
    enumerate(g, Mode::Spanning)
}

/// A forest with one component carrying two hairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleHairForest {
    pub edges: Forest,
    /// The two hairs sharing a component, `j < k`.
    pub hairs: (usize, usize),
    /// Edges of the path joining the vertices of the two hairs.
    pub path: Vec<usize>,
}

/// A spanning subgraph with one cycle whose components carry one hair each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycledForest {
    pub edges: Forest,
    pub cycle: Vec<usize>,
}

fn path_between(g: &LabeledDiGraph, edges: &[usize], from: usize, to: usize) -> Vec<usize> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.v];
    for &i in edges {
        let (a, b) = (g.edges[i].0 as usize, g.edges[i].1 as usize);
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut via: Vec<Option<(usize, usize)>> = vec![None; g.v];
    let mut seen = vec![false; g.v];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, i) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((x, i));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = to;
    while let Some((p, i)) = via[x] {
        path.push(i);
        x = p;
    }
    path.sort_unstable();
    path
}

pub fn double_hair_forests(g: &LabeledDiGraph) -> Vec<DoubleHairForest> {
    enumerate(g, Mode::DoubleHair)
        .into_iter()
        .map(|edges| {
            let mut comps = Components::new(g);
            for &i in &edges {
                let (ra, rb) = (comps.find(g.edges[i].0 as usize), comps.find(g.edges[i].1 as usize));
                comps.parent[ra] = rb;
            }
            let roots: Vec<usize> = g.hairs.iter().map(|&x| comps.find(x as usize)).collect();
            let (j, k) = (0..g.s())
                .flat_map(|j| ((j + 1)..g.s()).map(move |k| (j, k)))
                .find(|&(j, k)| roots[j] == roots[k])
                .expect("double hair component");
            let path = path_between(g, &edges, g.hairs[j] as usize, g.hairs[k] as usize);
            DoubleHairForest { edges, hairs: (j, k), path }
        })
        .collect()
}

pub fn cycled_forests(g: &LabeledDiGraph) -> Vec<CycledForest> {
    enumerate(g, Mode::Cycled)
        .into_iter()
        .map(|edges| {
            let cycle = edges
                .iter()
                .copied()
                .filter(|&i| {
                    let rest: Vec<usize> = edges.iter().copied().filter(|&j| j != i).collect();
                    let (a, b) = (g.edges[i].0 as usize, g.edges[i].1 as usize);
                    !path_between(g, &rest, a, b).is_empty() || a == b
                })
                .collect();
            CycledForest { edges, cycle }
        })
        .collect()
}

/// Whether `tau` is a spanning forest of `g`.
pub fn is_spanning_forest(g: &LabeledDiGraph, tau: &[usize]) -> bool {
    let mut sorted = tau.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len() == tau.len() && tau.iter().all(|&i| i < g.e()) && spanning_forests(g).contains(&sorted)
}

/// Parent of every vertex along the forest, directed away from the hairs:
/// `incoming[x]` is the forest edge entering `x` (none at hairy vertices),
/// and `reversed[i]` tells whether forest edge `i` points against its stored
/// direction.
struct Rooted {
    incoming: Vec<Option<usize>>,
    reversed: Vec<bool>,
}

fn root_forest(g: &LabeledDiGraph, tau: &[usize]) -> Rooted {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.v];
    for &i in tau {
        let (a, b) = (g.edges[i].0 as usize, g.edges[i].1 as usize);
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut incoming = vec![None; g.v];
    let mut reversed = vec![false; g.e()];
    let mut seen = vec![false; g.v];
    let mut queue: VecDeque<usize> = g.hairs.iter().map(|&x| x as usize).collect();
    for &x in &queue {
        seen[x] = true;
    }
    while let Some(x) = queue.pop_front() {
        for &(y, i) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                incoming[y] = Some(i);
                reversed[i] = g.edges[i].0 as usize != x;
                queue.push_back(y);
            }
        }
    }
    Rooted { incoming, reversed }
}

/// The oriented graph attached to a hairy graph and one of its spanning
/// forests, with its orientation sign. Forest edges point away from the hairs;
/// each edge outside the forest becomes a new bivalent target fed by its two
/// endpoints; hairs disappear, leaving their vertices as the sources.
///
/// The result lives in the oriented family with parameter `n + 1` where `n`
/// is the parameter of `tag`.
pub fn phi_tau_raw(g: &LabeledDiGraph, tau: &[usize], tag: &FamilyTag) -> (LabeledDiGraph, i64) {
    let rooted = root_forest(g, tau);
    let in_tau = {
        let mut m = vec![false; g.e()];
        for &i in tau {
            m[i] = true;
        }
        m
    };
    let directed = |i: usize| -> (usize, usize) {
        let (a, b) = (g.edges[i].0 as usize, g.edges[i].1 as usize);
        if rooted.reversed[i] {
            (b, a)
        } else {
            (a, b)
        }
    };
    if tag.rules().odd_edges {
        // Hairy edges and hairs are odd, oriented vertices are odd: number the
        // new vertices by the token each one comes from.
        let e = g.e();
        let mut label = vec![0usize; g.v];
        for (j, &x) in g.hairs.iter().enumerate() {
            label[x as usize] = e + j;
        }
        for x in 0..g.v {
            if let Some(i) = rooted.incoming[x] {
                label[x] = i;
            }
        }
        let mut edges = Vec::new();
        for i in 0..e {
            let (a, b) = directed(i);
            if in_tau[i] {
                edges.push((label[a] as Vx, label[b] as Vx));
            } else {
                edges.push((label[a] as Vx, i as Vx));
                edges.push((label[b] as Vx, i as Vx));
            }
        }
        (LabeledDiGraph::new(e + g.s(), edges, Vec::new()), 1)
    } else {
        // Hairy vertices and hairs are odd, oriented edges are odd. Pair each
        // hair with its vertex and every other vertex with its incoming forest
        // edge; an edge outside the forest becomes an even pair of edges.
        let hairy: Vec<usize> = g.hairs.iter().map(|&x| x as usize).collect();
        let mut order: Vec<usize> = Vec::with_capacity(g.v + g.s());
        for (j, &x) in hairy.iter().enumerate() {
            order.push(x);
            order.push(g.v + j);
        }
        let others: Vec<usize> = (0..g.v).filter(|x| !hairy.contains(x)).collect();
        order.extend(others.iter().copied());
        // order[pos] = token; the permutation sends token -> pos
        let mut perm = vec![0usize; order.len()];
        for (pos, &tok) in order.iter().enumerate() {
            perm[tok] = pos;
        }
        let mut sign = perm_sign(&perm);
        for &i in tau {
            if rooted.reversed[i] {
                sign = -sign;
            }
        }
        let mut targets = g.v;
        let mut edges = Vec::new();
        for &x in &others {
            let i = rooted.incoming[x].expect("non-hairy vertex has a forest parent");
            let (a, b) = directed(i);
            edges.push((a as Vx, b as Vx));
        }
        for i in 0..g.e() {
            if !in_tau[i] {
                let (a, b) = g.edges[i];
                edges.push((a, targets as Vx));
                edges.push((b, targets as Vx));
                targets += 1;
            }
        }
        (LabeledDiGraph::new(targets, edges, Vec::new()), sign)
    }
}

/// Oriented family with parameter `n + 1`.
pub fn target_tag(tag: &FamilyTag) -> FamilyTag {
    FamilyTag::new(Family::Oriented, tag.n + 1)
}

/// Global sign attached to the map on the slice (v, e, s); chosen so that the
/// map commutes with the differentials under the sign conventions of
/// [`phi_tau_raw`].
pub fn slice_sign(tag: &FamilyTag, v: usize, e: usize, s: usize) -> i64 {
    let _ = (v, e);
    if tag.rules().odd_edges && s % 2 == 1 {
        -1
    } else {
        1
    }
}

pub fn phi_tau(g: &LabeledDiGraph, tau: &[usize], tag: &FamilyTag) -> Result<CanonicalTerm> {
    if !is_spanning_forest(g, tau) {
        return Err(Error::Invalid(format!("{tau:?} is not a spanning forest of {g}")));
    }
    let (h, sign) = phi_tau_raw(g, tau, tag);
    let mut t = canonicalize(&h, &target_tag(tag).rules());
    t.coeff *= sign * slice_sign(tag, g.v, g.e(), g.s());
    Ok(t)
}

/// Sum over all spanning forests.
pub fn phi(g: &LabeledDiGraph, tag: &FamilyTag) -> Result<Combo> {
    let rules = target_tag(tag).rules();
    let global = slice_sign(tag, g.v, g.e(), g.s());
    let mut out = Combo::new();
    for tau in spanning_forests(g) {
        let (h, sign) = phi_tau_raw(g, &tau, tag);
        if !h.is_acyclic() {
            continue;
        }
        add_term(&mut out, &canonicalize(&h, &rules), sign * global)?;
    }
    Ok(out)
}

/// For each bivalent target created by [`phi_tau_raw`], the hairy edge
/// outside the forest it comes from, as `(target vertex, hairy edge)`.
pub fn phi_tau_targets(g: &LabeledDiGraph, tau: &[usize], tag: &FamilyTag) -> Vec<(usize, usize)> {
    let mut in_tau = vec![false; g.e()];
    for &i in tau {
        in_tau[i] = true;
    }
    let outside = (0..g.e()).filter(|&i| !in_tau[i]);
    if tag.rules().odd_edges {
        outside.map(|i| (i, i)).collect()
    } else {
        outside.enumerate().map(|(r, i)| (g.v + r, i)).collect()
    }
}

/// The terms of `d` applied to the image of each spanning forest, sorted by
/// the kind of edge contracted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifferentialParts {
    /// Edges coming from the forest.
    pub forest: Combo,
    /// Edges into a target made from an edge joining two forest components.
    pub joining: Combo,
    /// Edges into a target made from an edge closing a cycle in the forest.
    pub cycle: Combo,
}

/// Splits `d(phi(g))` by where the contracted edge comes from. The three
/// parts sum to `d(phi(g))`; the cycle part vanishes, the joining part is
/// `phi(h g)` and the forest part is `phi(d g)`.
pub fn differential_parts(g: &LabeledDiGraph, tag: &FamilyTag) -> Result<DifferentialParts> {
    let otag = target_tag(tag);
    let global = slice_sign(tag, g.v, g.e(), g.s());
    let mut parts = DifferentialParts::default();
    for tau in spanning_forests(g) {
        let (h, sign) = phi_tau_raw(g, &tau, tag);
        let mut comp: Vec<usize> = (0..g.v).collect();
        fn find(c: &mut [usize], mut x: usize) -> usize {
            while c[x] != x {
                c[x] = c[c[x]];
                x = c[x];
            }
            x
        }
        for &i in &tau {
            let (a, b) = (find(&mut comp, g.edges[i].0 as usize), find(&mut comp, g.edges[i].1 as usize));
            comp[a] = b;
        }
        let targets = phi_tau_targets(g, &tau, tag);
        for a in 0..h.e() {
            let head = h.edges[a].1 as usize;
            let term = crate::complexes::contract_edge(&h, a, &otag)?;
            let into = match targets.iter().find(|&&(t, _)| t == head) {
                None => &mut parts.forest,
                Some(&(_, i)) => {
                    let (x, y) = (g.edges[i].0 as usize, g.edges[i].1 as usize);
                    if find(&mut comp, x) == find(&mut comp, y) {
                        &mut parts.cycle
                    } else {
                        &mut parts.joining
                    }
                }
            };
            add_term(into, &term, sign * global)?;
        }
    }
    Ok(parts)
}

/// Slice of oriented graphs with `s` sources receiving the hairy slice.
pub fn phi_target_key(key: &SliceKey) -> Result<SliceKey> {
    let Family::Hairy(s) = key.tag.family else {
        return Err(Error::WrongFamily("the forest map starts at hairy graphs".into()));
    };
    let big_v = key.e + s;
    let big_e = (2 * key.e + s).checked_sub(key.v).ok_or_else(|| Error::Invalid(format!("no target for {key}")))?;
    Ok(SliceKey::with_sources(target_tag(&key.tag), big_v, big_e, s))
}

pub fn phi_matrix(store: &SliceStore, src: &ComplexSlice) -> Result<Differential> {
    let dst_key = phi_target_key(&src.key)?;
    let dst = vec![store.get(dst_key)?];
    let tag = src.key.tag;
    let matrix = crate::complexes::operator_matrix(store.exec, src, &dst, |g| phi(g, &tag))?;
    Ok(Differential { matrix, dst })
}

/// Edge types of the skeleton representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeType {
    /// An ordinary edge from tail to head.
    #[serde(rename = "A")]
    Arrow,
    /// Two edges into a bivalent target.
    #[serde(rename = "X")]
    Crossed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkeletonGraph {
    pub v: usize,
    pub edges: Vec<(Vx, Vx, EdgeType)>,
}

impl SkeletonGraph {
    pub fn crossed(&self) -> usize {
        self.edges.iter().filter(|e| e.2 == EdgeType::Crossed).count()
    }
}

/// Replace every crossed edge by a fresh bivalent target.
pub fn kappa_expand(sk: &SkeletonGraph) -> LabeledDiGraph {
    let mut next = sk.v;
    let mut edges = Vec::new();
    for &(a, b, t) in &sk.edges {
        match t {
            EdgeType::Arrow => edges.push((a, b)),
            EdgeType::Crossed => {
                edges.push((a, next as Vx));
                edges.push((b, next as Vx));
                next += 1;
            }
        }
    }
    LabeledDiGraph::new(next, edges, Vec::new())
}

/// Bivalent targets with two distinct in-neighbours, with those neighbours.
pub fn ede_targets(g: &LabeledDiGraph) -> Vec<(usize, usize, usize)> {
    let (ind, outd) = (g.in_degrees(), g.out_degrees());
    let mut out = Vec::new();
    for t in 0..g.v {
        if ind[t] == 2 && outd[t] == 0 {
            let tails: Vec<usize> = g.edges.iter().filter(|e| e.1 as usize == t).map(|e| e.0 as usize).collect();
            if tails[0] != tails[1] {
                out.push((t, tails[0], tails[1]));
            }
        }
    }
    out
}

/// Contract every bivalent target back into a crossed edge.
pub fn kappa(g: &LabeledDiGraph) -> Result<SkeletonGraph> {
    let (ind, outd) = (g.in_degrees(), g.out_degrees());
    let bivalent: Vec<bool> = (0..g.v).map(|t| ind[t] == 2 && outd[t] == 0).collect();
    let ede = ede_targets(g);
    if ede.len() != bivalent.iter().filter(|&&b| b).count() {
        return Err(Error::Invalid(format!("{g} has a bivalent target fed twice by one vertex")));
    }
    for x in 0..g.v {
        let d = ind[x] + outd[x];
        if !bivalent[x] && d < 3 && !(d == 2 && ind[x] == 0) {
            return Err(Error::Invalid(format!("vertex {x} of {g} has no skeleton form")));
        }
    }
    let mut relabel = vec![usize::MAX; g.v];
    let mut next = 0;
    for x in 0..g.v {
        if !bivalent[x] {
            relabel[x] = next;
            next += 1;
        }
    }
    let mut edges: Vec<(Vx, Vx, EdgeType)> = g
        .edges
        .iter()
        .filter(|e| !bivalent[e.1 as usize])
        .map(|&(a, b)| (relabel[a as usize] as Vx, relabel[b as usize] as Vx, EdgeType::Arrow))
        .collect();
    for (_, x, y) in ede {
        edges.push((relabel[x] as Vx, relabel[y] as Vx, EdgeType::Crossed));
    }
    Ok(SkeletonGraph { v: next, edges })
}

/// Hairs on every source, bivalent targets contracted to plain edges. A
/// target fed twice by the same vertex turns into a tadpole, so the result is
/// not admissible in that case.
pub fn hairy_skeleton(g: &LabeledDiGraph) -> LabeledDiGraph {
    let (ind, outd) = (g.in_degrees(), g.out_degrees());
    let bivalent: Vec<bool> = (0..g.v).map(|t| ind[t] == 2 && outd[t] == 0).collect();
    let mut relabel = vec![usize::MAX; g.v];
    let mut next = 0;
    for x in 0..g.v {
        if !bivalent[x] {
            relabel[x] = next;
            next += 1;
        }
    }
    let mut edges: Vec<(Vx, Vx)> = g
        .edges
        .iter()
        .filter(|e| !bivalent[e.1 as usize])
        .map(|&(a, b)| (relabel[a as usize] as Vx, relabel[b as usize] as Vx))
        .collect();
    for t in (0..g.v).filter(|&t| bivalent[t]) {
        let tails: Vec<usize> = g.edges.iter().filter(|e| e.1 as usize == t).map(|e| e.0 as usize).collect();
        edges.push((relabel[tails[0]] as Vx, relabel[tails[1]] as Vx));
    }
    let hairs = (0..g.v).filter(|&x| ind[x] == 0).map(|x| relabel[x] as Vx).collect();
    LabeledDiGraph::new(next, edges, hairs)
}

/// The hairy skeleton together with the forest formed by its arrow edges,
/// when the arrow edges form a spanning forest.
fn skeleton_with_forest(g: &LabeledDiGraph) -> Option<(LabeledDiGraph, Forest)> {
    let h = hairy_skeleton(g);
    if h.has_tadpole() {
        return None;
    }
    let (ind, outd) = (g.in_degrees(), g.out_degrees());
    let arrows = g.edges.iter().filter(|e| !(ind[e.1 as usize] == 2 && outd[e.1 as usize] == 0)).count();
    let tau: Forest = (0..arrows).collect();
    is_spanning_forest(&h, &tau).then_some((h, tau))
}

/// Dual of the forest map on one oriented graph. `tag` is the hairy family
/// tag (parameter `n`); `g` lives in the oriented family with `n + 1`.
pub fn g_map(g: &LabeledDiGraph, tag: &FamilyTag) -> CanonicalTerm {
    let zero = CanonicalTerm { graph: g.clone(), coeff: 0, is_zero: true };
    let Some((h, tau)) = skeleton_with_forest(g) else { return zero };
    let htag = tag.with_family(Family::Hairy(h.s()));
    let (image, sign) = phi_tau_raw(&h, &tau, &htag);
    let orules = target_tag(tag).rules();
    let a = canonicalize(&image, &orules);
    let b = canonicalize(g, &orules);
    let mut t = canonicalize(&h, &htag.rules());
    if a.is_zero || b.is_zero || a.graph != b.graph {
        return zero;
    }
    t.coeff *= sign * a.coeff * b.coeff * slice_sign(&htag, h.v, h.e(), h.s());
    t
}

/// Whether `g` is the image of its hairy skeleton under some forest term.
pub fn is_forest_image(g: &LabeledDiGraph, tag: &FamilyTag) -> bool {
    let h = hairy_skeleton(g);
    if h.has_tadpole() || !h.is_well_formed() {
        return false;
    }
    let htag = tag.with_family(Family::Hairy(h.s()));
    let orules = target_tag(tag).rules();
    let target = canonicalize(g, &orules).graph;
    spanning_forests(&h).iter().any(|tau| {
        let (image, _) = phi_tau_raw(&h, tau, &htag);
        canonicalize(&image, &orules).graph == target
    })
}

/// Matrix of the dual map from an oriented slice with fixed sources into the
/// hairy slice it pairs with.
pub fn g_matrix(store: &SliceStore, src: &ComplexSlice, hairy_key: SliceKey) -> Result<Differential> {
    let dst: Vec<Arc<ComplexSlice>> = vec![store.get(hairy_key)?];
    let tag = hairy_key.tag;
    let matrix = crate::complexes::operator_matrix(store.exec, src, &dst, |g| {
        let mut out = Combo::new();
        add_term(&mut out, &g_map(g, &tag), 1)?;
        Ok(out)
    })?;
    Ok(Differential { matrix, dst })
}
