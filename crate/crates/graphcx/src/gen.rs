//! Basis generation.
//!
//! Every admissible graph has a *core*: the undirected multigraph left after
//! dropping hairs (hairy families) or after replacing each bivalent target by
//! a single crossed edge (directed families). Cores have minimum degree two,
//! and their degree-two vertices are hairy vertices or sources. Cores in turn
//! are subdivisions of reduced multigraphs of minimum degree three, which are
//! small enough to enumerate by filling adjacency matrices.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use crate::canon::{best_labelings, Shape};
use crate::exec::{self, Exec};
use crate::graph::{canonicalize, is_admissible, Family, FamilyTag, LabeledDiGraph, Vx};

/// Undirected edge list with `a <= b` in every pair.
pub(crate) type UEdges = Vec<(usize, usize)>;

pub(crate) fn canonical_undirected(n: usize, edges: &[(usize, usize)]) -> UEdges {
    let shape = Shape { n, colors: vec![0; n], arcs: edges, directed: false };
    let found = best_labelings(&shape);
    let perm = &found.perms[0];
    let mut out: UEdges = edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort_unstable();
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

/// Nonincreasing degree sequences with entries at least 3 summing to `total`.
fn degree_sequences(n: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let slots = n - cur.len();
        if left < 3 * slots {
            return;
        }
        let hi = cap.min(left - 3 * (slots - 1));
        for d in (3..=hi).rev() {
            cur.push(d);
            rec(n, left - d, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, total, &mut Vec::new(), &mut out);
    out
}

struct Filler<'a> {
    n: usize,
    rest: Vec<usize>,
    edges: UEdges,
    seen: &'a mut HashSet<UEdges>,
}

impl Filler<'_> {
    /// Fill vertex `i`: loops first, then multiplicities towards `j > i`.
    fn vertex(&mut self, i: usize) {
        if i == self.n {
            if connected(self.n, &self.edges) {
                self.seen.insert(canonical_undirected(self.n, &self.edges));
            }
            return;
        }
        let r = self.rest[i];
        for loops in 0..=r / 2 {
            self.rest[i] -= 2 * loops;
            for _ in 0..loops {
                self.edges.push((i, i));
            }
            self.neighbour(i, i + 1);
            self.edges.truncate(self.edges.len() - loops);
            self.rest[i] += 2 * loops;
        }
    }

    fn neighbour(&mut self, i: usize, j: usize) {
        if self.rest[i] == 0 {
            self.vertex(i + 1);
            return;
        }
        if j == self.n {
            return;
        }
        let hi = self.rest[i].min(self.rest[j]);
        for m in (0..=hi).rev() {
            self.rest[i] -= m;
            self.rest[j] -= m;
            for _ in 0..m {
                self.edges.push((i, j));
            }
            self.neighbour(i, j + 1);
            self.edges.truncate(self.edges.len() - m);
            self.rest[i] += m;
            self.rest[j] += m;
        }
    }
}

/// Connected multigraphs (loops allowed) with all degrees at least 3, up to
/// isomorphism.
pub(crate) fn reduced_graphs(n: usize, e: usize) -> Arc<Vec<UEdges>> {
    static MEMO: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<UEdges>>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = memo.lock().unwrap().get(&(n, e)) {
        return hit.clone();
    }
    let mut seen = HashSet::new();
    if n > 0 {
        for seq in degree_sequences(n, 2 * e) {
            let mut filler = Filler { n, rest: seq, edges: Vec::new(), seen: &mut seen };
            filler.vertex(0);
        }
    }
    let mut out: Vec<UEdges> = seen.into_iter().collect();
    out.sort();
    let out = Arc::new(out);
    memo.lock().unwrap().insert((n, e), out.clone());
    out
}

fn compositions(k: usize, parts: usize, min_first: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let i = cur.len();
    if parts == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return;
    }
    let lo = min_first[i];
    if i + 1 == parts {
        if k >= lo {
            cur.push(k);
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    for x in lo..=k {
        cur.push(x);
        compositions(k - x, parts, min_first, cur, out);
        cur.pop();
    }
}

/// Subdivide edge `i` of `base` by `parts[i]` new vertices.
fn subdivide(n: usize, base: &[(usize, usize)], parts: &[usize]) -> (usize, UEdges) {
    let mut next = n;
    let mut edges = Vec::new();
    for (&(a, b), &k) in base.iter().zip(parts) {
        let mut prev = a;
        for _ in 0..k {
            edges.push((prev.min(next), prev.max(next)));
            prev = next;
            next += 1;
        }
        edges.push((prev.min(b), prev.max(b)));
    }
    (next, edges)
}

/// Connected multigraphs with `n` vertices, `e` edges, all degrees at least 2
/// and at most `max_deg2` vertices of degree 2, up to isomorphism.
pub(crate) fn cores(n: usize, e: usize, loops: bool, max_deg2: usize) -> Vec<UEdges> {
    if n == 0 || e < n {
        return Vec::new();
    }
    let b = e - n;
    if b == 0 {
        if n > max_deg2 || (!loops && n < 2) {
            return Vec::new();
        }
        let edges = (0..n).map(|i| {
            let j = (i + 1) % n;
            (i.min(j), i.max(j))
        });
        return vec![canonical_undirected(n, &edges.collect::<Vec<_>>())];
    }
    let mut seen: HashSet<UEdges> = HashSet::new();
    let lo = n.saturating_sub(max_deg2).max(1);
    for nr in lo..=n.min(2 * b) {
        let er = nr + b;
        let k = n - nr;
        for base in reduced_graphs(nr, er).iter() {
            let mins: Vec<usize> = base.iter().map(|&(a, c)| usize::from(!loops && a == c)).collect();
            let mut parts = Vec::new();
            compositions(k, er, &mins, &mut Vec::new(), &mut parts);
            for p in parts {
                let (total, edges) = subdivide(nr, base, &p);
                debug_assert_eq!(total, n);
                seen.insert(canonical_undirected(n, &edges));
            }
        }
    }
    let mut out: Vec<UEdges> = seen.into_iter().collect();
    out.sort();
    out
}

fn degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut d = vec![0; n];
    for &(a, b) in edges {
        d[a] += 1;
        d[b] += 1;
    }
    d
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn finish(found: Vec<Vec<LabeledDiGraph>>) -> Vec<LabeledDiGraph> {
    let mut set: HashSet<LabeledDiGraph> = HashSet::new();
    for part in found {
        set.extend(part);
    }
    let mut out: Vec<LabeledDiGraph> = set.into_iter().collect();
    out.sort();
    out
}

/// Canonical nonzero hairy graphs with `v` vertices, `e` edges, `s` hairs.
pub fn hairy_basis(tag: &FamilyTag, v: usize, e: usize, s: usize, exec: Exec) -> Vec<LabeledDiGraph> {
    let rules = tag.rules();
    let cs = cores(v, e, false, s);
    let found = exec::map(exec, &cs, |core| {
        let deg = degrees(v, core);
        let forced: Vec<usize> = (0..v).filter(|&x| deg[x] == 2).collect();
        let free: Vec<usize> = (0..v).filter(|&x| deg[x] > 2).collect();
        let mut out = Vec::new();
        if forced.len() > s {
            return out;
        }
        for pick in k_subsets(free.len(), s - forced.len()) {
            let mut hairs: Vec<Vx> = forced.iter().map(|&x| x as Vx).collect();
            hairs.extend(pick.iter().map(|&i| free[i] as Vx));
            hairs.sort_unstable();
            let edges = core.iter().map(|&(a, b)| (a as Vx, b as Vx)).collect();
            let g = LabeledDiGraph::new(v, edges, hairs);
            debug_assert!(is_admissible(&g, tag));
            let t = canonicalize(&g, &rules);
            if !t.is_zero {
                out.push(t.graph);
            }
        }
        out
    });
    finish(found)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Typ {
    Forward,
    Backward,
    Crossed,
}

struct Typer<'a> {
    n: usize,
    core: &'a [(usize, usize)],
    deg: Vec<usize>,
    crossed_target: usize,
    family: Family,
    sources: Option<usize>,
    types: Vec<Typ>,
    indeg: Vec<usize>,
    left: Vec<usize>,
    crossed: usize,
    out: Vec<LabeledDiGraph>,
}

impl Typer<'_> {
    fn ok_so_far(&self) -> bool {
        let Some(s) = self.sources else { return true };
        let settled_sources = (0..self.n).filter(|&x| self.left[x] == 0 && self.indeg[x] == 0).count();
        let non_sources = self.indeg.iter().filter(|&&d| d > 0).count();
        settled_sources <= s && non_sources + s <= self.n
    }

    fn go(&mut self, i: usize) {
        let remaining = self.core.len() - i;
        if self.crossed > self.crossed_target || self.crossed + remaining < self.crossed_target {
            return;
        }
        if !self.ok_so_far() {
            return;
        }
        if i == self.core.len() {
            self.emit();
            return;
        }
        let (a, b) = self.core[i];
        let options: &[Typ] = if a == b { &[Typ::Crossed] } else { &[Typ::Forward, Typ::Backward, Typ::Crossed] };
        for &t in options {
            let head = match t {
                Typ::Forward => Some(b),
                Typ::Backward => Some(a),
                Typ::Crossed => None,
            };
            if let Some(h) = head {
                if self.deg[h] == 2 {
                    continue;
                }
                self.indeg[h] += 1;
            } else {
                self.crossed += 1;
            }
            self.left[a] -= 1;
            self.left[b] -= 1;
            self.types.push(t);
            self.go(i + 1);
            self.types.pop();
            self.left[a] += 1;
            self.left[b] += 1;
            match head {
                Some(h) => self.indeg[h] -= 1,
                None => self.crossed -= 1,
            }
        }
    }

    fn emit(&mut self) {
        let mut edges = Vec::new();
        let mut next = self.n;
        for (&(a, b), &t) in self.core.iter().zip(&self.types) {
            match t {
                Typ::Forward => edges.push((a as Vx, b as Vx)),
                Typ::Backward => edges.push((b as Vx, a as Vx)),
                Typ::Crossed => {
                    edges.push((a as Vx, next as Vx));
                    edges.push((b as Vx, next as Vx));
                    next += 1;
                }
            }
        }
        let g = LabeledDiGraph::new(next, edges, Vec::new());
        let keep = match self.family {
            Family::Oriented => g.is_acyclic(),
            _ => true,
        };
        if keep {
            self.out.push(g);
        }
    }
}

/// Canonical nonzero graphs of a non-hairy family with `v` vertices and `e`
/// edges, optionally restricted to exactly `sources` sources.
pub fn directed_basis(tag: &FamilyTag, v: usize, e: usize, sources: Option<usize>, exec: Exec) -> Vec<LabeledDiGraph> {
    let rules = tag.rules();
    let sources = match tag.family {
        Family::Sourced(s) => Some(s),
        _ => sources,
    };
    let mut jobs = Vec::new();
    for c in 0..v {
        if c > e {
            break;
        }
        let (nv, ne) = (v - c, e - c);
        let max_deg2 = sources.unwrap_or(nv);
        for core in cores(nv, ne, true, max_deg2) {
            jobs.push((c, nv, core));
        }
    }
    let found = exec::map(exec, &jobs, |(c, nv, core)| {
        let deg = degrees(*nv, core);
        let mut typer = Typer {
            n: *nv,
            core,
            left: deg.clone(),
            deg,
            crossed_target: *c,
            family: tag.family,
            sources,
            types: Vec::new(),
            indeg: vec![0; *nv],
            crossed: 0,
            out: Vec::new(),
        };
        typer.go(0);
        let mut out = Vec::new();
        for g in typer.out {
            if let Some(s) = sources {
                if g.count_sources() != s {
                    continue;
                }
            }
            debug_assert!(is_admissible(&g, tag), "{g}");
            let t = canonicalize(&g, &rules);
            if !t.is_zero {
                out.push(t.graph);
            }
        }
        out
    });
    finish(found)
}

pub fn basis(tag: &FamilyTag, v: usize, e: usize, sources: Option<usize>, exec: Exec) -> Vec<LabeledDiGraph> {
    match tag.family {
        Family::Hairy(s) => hairy_basis(tag, v, e, s, exec),
        _ => directed_basis(tag, v, e, sources, exec),
    }
}
