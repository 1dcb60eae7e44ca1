//! Labeled directed multigraphs with optional hairs, the graph families and
//! their sign rules, and signed canonical forms.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canon::{best_labelings, perm_sign, sorting_positions, Shape};

pub type Vx = u8;

/// Directed multigraph on vertices `0..v`. `hairs[i]` is the vertex carrying
/// hair `i`. For hairy graphs the stored edge direction is arbitrary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledDiGraph {
    pub v: usize,
    pub edges: Vec<(Vx, Vx)>,
    #[serde(default)]
    pub hairs: Vec<Vx>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Directed,
    Oriented,
    /// Exactly `s` sources.
    Sourced(usize),
    /// Exactly `s` hairs.
    Hairy(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyTag {
    pub family: Family,
    pub n: i64,
}

/// Which symmetries act with a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityRules {
    pub odd_vertices: bool,
    pub odd_edges: bool,
    pub odd_hairs: bool,
    /// Reversing an edge contributes -1 (hairy graphs, odd n).
    pub odd_flips: bool,
    /// Edges are undirected up to the flip sign (hairy graphs).
    pub undirected: bool,
}

/// Canonical representative of an isomorphism class. The input graph equals
/// `coeff` times `graph` in the (co)invariant space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalTerm {
    pub graph: LabeledDiGraph,
    pub coeff: i64,
    pub is_zero: bool,
}

impl Family {
    pub fn is_hairy(self) -> bool {
        matches!(self, Family::Hairy(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Directed => "directed",
            Family::Oriented => "oriented",
            Family::Sourced(_) => "sourced",
            Family::Hairy(_) => "hairy",
        }
    }

    /// The hair or source count carried by the tag, zero otherwise.
    pub fn s(self) -> usize {
        match self {
            Family::Sourced(s) | Family::Hairy(s) => s,
            _ => 0,
        }
    }
}

impl FamilyTag {
    pub fn new(family: Family, n: i64) -> Self {
        FamilyTag { family, n }
    }

    pub fn rules(&self) -> ParityRules {
        ParityRules::new(self.n, self.family.is_hairy())
    }

    pub fn with_family(&self, family: Family) -> Self {
        FamilyTag { family, n: self.n }
    }
}

impl ParityRules {
    pub fn new(n: i64, hairy: bool) -> Self {
        let odd = n.rem_euclid(2) == 1;
        ParityRules {
            odd_vertices: odd,
            odd_edges: !odd,
            odd_hairs: hairy,
            odd_flips: hairy && odd,
            undirected: hairy,
        }
    }
}

impl LabeledDiGraph {
    pub fn new(v: usize, edges: Vec<(Vx, Vx)>, hairs: Vec<Vx>) -> Self {
        LabeledDiGraph { v, edges, hairs }
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn s(&self) -> usize {
        self.hairs.len()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.v];
        for &(_, h) in &self.edges {
            d[h as usize] += 1;
        }
        d
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.v];
        for &(t, _) in &self.edges {
            d[t as usize] += 1;
        }
        d
    }

    pub fn hair_counts(&self) -> Vec<usize> {
        let mut d = vec![0; self.v];
        for &x in &self.hairs {
            d[x as usize] += 1;
        }
        d
    }

    /// Valence counting edge ends and hairs.
    pub fn valences(&self) -> Vec<usize> {
        let mut d = self.hair_counts();
        for &(t, h) in &self.edges {
            d[t as usize] += 1;
            d[h as usize] += 1;
        }
        d
    }

    pub fn has_tadpole(&self) -> bool {
        self.edges.iter().any(|&(t, h)| t == h)
    }

    pub fn is_well_formed(&self) -> bool {
        self.edges.iter().all(|&(t, h)| (t as usize) < self.v && (h as usize) < self.v)
            && self.hairs.iter().all(|&x| (x as usize) < self.v)
    }

    pub fn is_connected(&self) -> bool {
        if self.v == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.v).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = self.v;
        for &(t, h) in &self.edges {
            let (a, b) = (find(&mut parent, t as usize), find(&mut parent, h as usize));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps == 1
    }

    pub fn count_sources(&self) -> usize {
        self.in_degrees().iter().filter(|&&d| d == 0).count()
    }

    pub fn count_targets(&self) -> usize {
        self.out_degrees().iter().filter(|&&d| d == 0).count()
    }

    /// True when there is no closed directed path.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg = self.in_degrees();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.v];
        for &(t, h) in &self.edges {
            out[t as usize].push(h as usize);
        }
        let mut stack: Vec<usize> = (0..self.v).filter(|&x| indeg[x] == 0).collect();
        let mut seen = 0;
        while let Some(x) = stack.pop() {
            seen += 1;
            for &y in &out[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    stack.push(y);
                }
            }
        }
        seen == self.v
    }

    /// Inv: reverse every edge.
    pub fn reversed(&self) -> Self {
        LabeledDiGraph {
            v: self.v,
            edges: self.edges.iter().map(|&(t, h)| (h, t)).collect(),
            hairs: self.hairs.clone(),
        }
    }

    /// Relabel vertices by `vperm[old] = new`, reorder edges so that old edge
    /// `i` lands at `eperm[i]`, flip the edges marked in `flips`, and move
    /// hair `i` to `hperm[i]`.
    pub fn relabeled(&self, vperm: &[usize], eperm: &[usize], flips: &[bool], hperm: &[usize]) -> Self {
        let mut edges = vec![(0, 0); self.e()];
        for (i, &(t, h)) in self.edges.iter().enumerate() {
            let (a, b) = (vperm[t as usize] as Vx, vperm[h as usize] as Vx);
            edges[eperm[i]] = if flips[i] { (b, a) } else { (a, b) };
        }
        let mut hairs = vec![0; self.s()];
        for (i, &x) in self.hairs.iter().enumerate() {
            hairs[hperm[i]] = vperm[x as usize] as Vx;
        }
        LabeledDiGraph { v: self.v, edges, hairs }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization")
    }
}

impl fmt::Display for LabeledDiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Sign of the relabeling described as in [`LabeledDiGraph::relabeled`].
pub fn relabel_sign(rules: &ParityRules, vperm: &[usize], eperm: &[usize], flips: &[bool], hperm: &[usize]) -> i64 {
    let mut sign = 1;
    if rules.odd_vertices {
        sign *= perm_sign(vperm);
    }
    if rules.odd_edges {
        sign *= perm_sign(eperm);
    }
    if rules.odd_hairs {
        sign *= perm_sign(hperm);
    }
    if rules.odd_flips && flips.iter().filter(|&&f| f).count() % 2 == 1 {
        sign = -sign;
    }
    sign
}

pub fn loop_order(g: &LabeledDiGraph) -> i64 {
    g.e() as i64 - g.v as i64
}

pub fn degree(g: &LabeledDiGraph, tag: &FamilyTag) -> i64 {
    degree_of(tag, g.v, g.e(), g.s())
}

/// n - vn - (1-n)e, minus s for hairy graphs.
pub fn degree_of(tag: &FamilyTag, v: usize, e: usize, s: usize) -> i64 {
    let n = tag.n;
    let base = n - v as i64 * n - (1 - n) * e as i64;
    if tag.family.is_hairy() {
        base - s as i64
    } else {
        base
    }
}

pub fn is_admissible(g: &LabeledDiGraph, tag: &FamilyTag) -> bool {
    if !g.is_well_formed() || g.has_tadpole() || !g.is_connected() {
        return false;
    }
    match tag.family {
        Family::Hairy(s) => g.s() == s && g.valences().iter().all(|&d| d >= 3),
        fam => {
            if !g.hairs.is_empty() {
                return false;
            }
            let (ind, outd) = (g.in_degrees(), g.out_degrees());
            let valence_ok = (0..g.v).all(|x| {
                let d = ind[x] + outd[x];
                d >= 2 && !(d == 2 && ind[x] == 1)
            });
            valence_ok
                && match fam {
                    Family::Directed => true,
                    Family::Oriented => g.is_acyclic(),
                    Family::Sourced(s) => g.count_sources() == s,
                    Family::Hairy(_) => unreachable!(),
                }
        }
    }
}

struct Candidate {
    graph: LabeledDiGraph,
    sign: i64,
}

fn labelings(g: &LabeledDiGraph, rules: &ParityRules) -> Vec<Candidate> {
    let arcs: Vec<(usize, usize)> = g.edges.iter().map(|&(t, h)| (t as usize, h as usize)).collect();
    let colors: Vec<u32> = g.hair_counts().iter().map(|&c| c as u32).collect();
    let shape = Shape { n: g.v, colors, arcs: &arcs, directed: !rules.undirected };
    let found = best_labelings(&shape);
    found
        .perms
        .into_iter()
        .map(|vperm| {
            let mut flips = vec![false; g.e()];
            let moved: Vec<(Vx, Vx)> = g
                .edges
                .iter()
                .enumerate()
                .map(|(i, &(t, h))| {
                    let (a, b) = (vperm[t as usize] as Vx, vperm[h as usize] as Vx);
                    if rules.undirected && a > b {
                        flips[i] = true;
                        (b, a)
                    } else {
                        (a, b)
                    }
                })
                .collect();
            let eperm = sorting_positions(&moved);
            let hmoved: Vec<Vx> = g.hairs.iter().map(|&x| vperm[x as usize] as Vx).collect();
            let hperm = sorting_positions(&hmoved);
            let sign = relabel_sign(rules, &vperm, &eperm, &flips, &hperm);
            let graph = g.relabeled(&vperm, &eperm, &vec![false; g.e()], &hperm);
            let graph = LabeledDiGraph {
                edges: graph
                    .edges
                    .iter()
                    .map(|&(a, b)| if rules.undirected && a > b { (b, a) } else { (a, b) })
                    .collect(),
                ..graph
            };
            Candidate { graph, sign }
        })
        .collect()
}

fn has_repeats<T: PartialEq>(sorted: &[T]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Canonical representative, relabeling sign, and zero flag. Tadpoles are
/// not expected: the sign of reversing one is ignored.
pub fn canonicalize(g: &LabeledDiGraph, rules: &ParityRules) -> CanonicalTerm {
    let cands = labelings(g, rules);
    let first = &cands[0];
    let mut is_zero = cands.iter().any(|c| c.sign != first.sign);
    if rules.odd_edges && has_repeats(&first.graph.edges) {
        is_zero = true;
    }
    if rules.odd_hairs && has_repeats(&first.graph.hairs) {
        is_zero = true;
    }
    CanonicalTerm { graph: first.graph.clone(), coeff: first.sign, is_zero }
}

/// Signs realized by automorphisms of `g`.
pub fn automorphism_signs(g: &LabeledDiGraph, rules: &ParityRules) -> BTreeSet<i64> {
    let cands = labelings(g, rules);
    let first = cands[0].sign;
    let mut out: BTreeSet<i64> = cands.iter().map(|c| c.sign * first).collect();
    if rules.odd_edges && has_repeats(&cands[0].graph.edges) {
        out.insert(-1);
    }
    if rules.odd_hairs && has_repeats(&cands[0].graph.hairs) {
        out.insert(-1);
    }
    out
}

/// Order of the stabilizer of `g` in the full relabeling group (vertex
/// permutations, edge permutations with flips for hairy graphs, hair
/// permutations).
pub fn automorphism_count(g: &LabeledDiGraph, rules: &ParityRules) -> u64 {
    let cands = labelings(g, rules);
    let mut count = cands.len() as u64;
    let canon = &cands[0].graph;
    count *= multiplicity_factorials(&canon.edges);
    count *= multiplicity_factorials(&canon.hairs);
    count
}

fn multiplicity_factorials<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 1u64;
    let mut run = 1u64;
    for w in 1..=sorted.len() {
        if w < sorted.len() && sorted[w] == sorted[w - 1] {
            run += 1;
            total *= run;
        } else {
            run = 1;
        }
    }
    total
}
