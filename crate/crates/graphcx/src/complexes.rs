//! Slices of fixed (family, n, v, e, s), the differentials d, d0 and h, and
//! their matrices.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::gen;
use crate::graph::{canonicalize, degree_of, CanonicalTerm, Family, FamilyTag, LabeledDiGraph, Vx};
use crate::matrix::{offsets, SparseRationalMatrix, Q};

/// Finite linear combination of canonical graphs.
pub type Combo = BTreeMap<LabeledDiGraph, i64>;

pub fn add_term(combo: &mut Combo, term: &CanonicalTerm, factor: i64) -> Result<()> {
    if term.is_zero || factor == 0 {
        return Ok(());
    }
    let c = term.coeff.checked_mul(factor).ok_or(Error::Overflow("combination"))?;
    add_to(combo, term.graph.clone(), c)
}

pub fn add_to(combo: &mut Combo, g: LabeledDiGraph, c: i64) -> Result<()> {
    match combo.entry(g) {
        Entry::Occupied(mut slot) => {
            let x = slot.get().checked_add(c).ok_or(Error::Overflow("combination"))?;
            if x == 0 {
                slot.remove();
            } else {
                *slot.get_mut() = x;
            }
        }
        Entry::Vacant(slot) => {
            if c != 0 {
                slot.insert(c);
            }
        }
    }
    Ok(())
}

pub fn add_combo(into: &mut Combo, other: &Combo, factor: i64) -> Result<()> {
    for (g, &c) in other {
        let c = c.checked_mul(factor).ok_or(Error::Overflow("combination"))?;
        add_to(into, g.clone(), c)?;
    }
    Ok(())
}

/// Extend `f` linearly to a combination.
pub fn apply_linear<F>(c: &Combo, f: F) -> Result<Combo>
where
    F: Fn(&LabeledDiGraph) -> Result<Combo>,
{
    let mut out = Combo::new();
    for (g, &x) in c {
        add_combo(&mut out, &f(g)?, x)?;
    }
    Ok(out)
}

/// Identifies a slice. `sources` restricts a directed or oriented slice to
/// graphs with exactly that many sources; for sourced and hairy families the
/// count lives in the family tag and `sources` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SliceKey {
    pub tag: FamilyTag,
    pub v: usize,
    pub e: usize,
    pub sources: Option<usize>,
}

impl SliceKey {
    pub fn new(tag: FamilyTag, v: usize, e: usize) -> Self {
        SliceKey { tag, v, e, sources: None }
    }

    pub fn with_sources(tag: FamilyTag, v: usize, e: usize, sources: usize) -> Self {
        SliceKey { tag, v, e, sources: Some(sources) }
    }

    /// Hair count for hairy slices, source count when fixed, else zero.
    pub fn s(&self) -> usize {
        match self.tag.family {
            Family::Hairy(s) | Family::Sourced(s) => s,
            _ => self.sources.unwrap_or(0),
        }
    }

    pub fn degree(&self) -> i64 {
        degree_of(&self.tag, self.v, self.e, self.s())
    }

    pub fn loop_order(&self) -> i64 {
        self.e as i64 - self.v as i64
    }

    /// Same slice shape with a different source or hair count.
    pub fn with_s(&self, s: usize) -> Self {
        match self.tag.family {
            Family::Hairy(_) => SliceKey { tag: self.tag.with_family(Family::Hairy(s)), ..*self },
            Family::Sourced(_) => SliceKey { tag: self.tag.with_family(Family::Sourced(s)), ..*self },
            _ => SliceKey { sources: Some(s), ..*self },
        }
    }

    pub fn shifted(&self, dv: i64, de: i64) -> Option<Self> {
        let v = self.v as i64 + dv;
        let e = self.e as i64 + de;
        if v < 0 || e < 0 {
            return None;
        }
        Some(SliceKey { v: v as usize, e: e as usize, ..*self })
    }
}

impl fmt::Display for SliceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} v={} e={} s={}", self.tag.family.name(), self.tag.n, self.v, self.e, self.s())
    }
}

/// Ordered basis of canonical generators.
#[derive(Clone, Debug)]
pub struct ComplexSlice {
    pub key: SliceKey,
    pub basis: Vec<LabeledDiGraph>,
    index: HashMap<LabeledDiGraph, usize>,
}

impl ComplexSlice {
    pub fn from_basis(key: SliceKey, basis: Vec<LabeledDiGraph>) -> Self {
        let index = basis.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        ComplexSlice { key, basis, index }
    }

    pub fn generate(key: SliceKey, exec: Exec) -> Self {
        let basis = if key.v == 0 { Vec::new() } else { gen::basis(&key.tag, key.v, key.e, key.sources, exec) };
        Self::from_basis(key, basis)
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn position(&self, g: &LabeledDiGraph) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Inverse of [`ComplexSlice::to_jsonl`]. The header must describe `key`.
    pub fn from_jsonl(key: SliceKey, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: serde_json::Value =
            serde_json::from_str(lines.next().ok_or_else(|| Error::Invalid("missing slice header".into()))?)?;
        let expect = [("v", key.v as i64), ("e", key.e as i64), ("s", key.s() as i64), ("n", key.tag.n)];
        for (field, want) in expect {
            if header.get(field).and_then(|x| x.as_i64()) != Some(want) {
                return Err(Error::Invalid(format!("slice header does not match {key}: {header}")));
            }
        }
        let basis = lines.map(serde_json::from_str).collect::<std::result::Result<Vec<LabeledDiGraph>, _>>()?;
        Ok(Self::from_basis(key, basis))
    }

    /// JSON-lines: a header object, then one canonical graph per line.
    pub fn to_jsonl(&self) -> String {
        let header = serde_json::json!({
            "family": self.key.tag.family.name(),
            "n": self.key.tag.n,
            "v": self.key.v,
            "e": self.key.e,
            "s": self.key.s(),
            "degree": self.key.degree(),
        });
        let mut out = header.to_string();
        out.push('\n');
        for g in &self.basis {
            out.push_str(&g.to_json());
            out.push('\n');
        }
        out
    }
}

/// Memoized slices shared between computations.
#[derive(Debug)]
pub struct SliceStore {
    pub exec: Exec,
    /// Generation refuses slices with more vertices than this.
    pub max_vertices: usize,
    slices: Mutex<HashMap<SliceKey, Arc<ComplexSlice>>>,
}

impl Default for SliceStore {
    fn default() -> Self {
        SliceStore::new(Exec::default())
    }
}

impl SliceStore {
    pub fn new(exec: Exec) -> Self {
        SliceStore { exec, max_vertices: 16, slices: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, key: SliceKey) -> Result<Arc<ComplexSlice>> {
        if let Some(s) = self.slices.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        if key.v > self.max_vertices || key.v > Vx::MAX as usize {
            return Err(Error::Budget(format!("slice {key} exceeds the vertex cap {}", self.max_vertices)));
        }
        let slice = Arc::new(ComplexSlice::generate(key, self.exec));
        self.slices.lock().unwrap().entry(key).or_insert(slice.clone());
        Ok(slice)
    }

    /// Seeds the store with a slice computed elsewhere, for example one read
    /// back from disk. An existing entry wins.
    pub fn insert(&self, slice: ComplexSlice) -> Arc<ComplexSlice> {
        let slice = Arc::new(slice);
        self.slices.lock().unwrap().entry(slice.key).or_insert(slice).clone()
    }

    pub fn contains(&self, key: &SliceKey) -> bool {
        self.slices.lock().unwrap().contains_key(key)
    }

    /// Every slice held, in key order.
    pub fn snapshot(&self) -> Vec<Arc<ComplexSlice>> {
        let mut out: Vec<_> = self.slices.lock().unwrap().values().cloned().collect();
        out.sort_by_key(|s| s.key);
        out
    }
}

/// The graph with edge `a` contracted, with its orientation sign, or `None`
/// when a tadpole or a forbidden vertex appears. Not canonicalized.
pub fn contract_raw(g: &LabeledDiGraph, a: usize, tag: &FamilyTag) -> Option<(LabeledDiGraph, i64)> {
    let rules = tag.rules();
    let (t, h) = (g.edges[a].0 as usize, g.edges[a].1 as usize);
    // the vertex that disappears, and the one it merges into
    let (gone, keep, sign) = if rules.odd_vertices {
        (h, t, if h % 2 == 0 { 1 } else { -1 })
    } else {
        (t.max(h), t.min(h), if a % 2 == 0 { 1 } else { -1 })
    };
    let map = |x: Vx| -> Vx {
        let x = x as usize;
        let x = if x == gone { keep } else { x };
        (if x > gone { x - 1 } else { x }) as Vx
    };
    let mut edges = Vec::with_capacity(g.e() - 1);
    for (i, &(x, y)) in g.edges.iter().enumerate() {
        if i == a {
            continue;
        }
        let (x, y) = (map(x), map(y));
        if x == y {
            return None;
        }
        edges.push((x, y));
    }
    let hairs = g.hairs.iter().map(|&x| map(x)).collect();
    let out = LabeledDiGraph::new(g.v - 1, edges, hairs);
    if !tag.family.is_hairy() {
        let merged = map(keep as Vx) as usize;
        let (ind, outd) = (out.in_degrees(), out.out_degrees());
        if ind[merged] + outd[merged] == 2 && ind[merged] == 1 {
            return None;
        }
        match tag.family {
            Family::Oriented if !out.is_acyclic() => return None,
            Family::Sourced(_) if out.count_sources() == 0 => return None,
            _ => {}
        }
    }
    Some((out, sign))
}

pub fn contract_edge(g: &LabeledDiGraph, a: usize, tag: &FamilyTag) -> Result<CanonicalTerm> {
    if a >= g.e() {
        return Err(Error::Invalid(format!("edge index {a} out of range for {g}")));
    }
    Ok(match contract_raw(g, a, tag) {
        Some((out, sign)) => canonical_with_sign(&out, tag, sign),
        None => zero_term(g),
    })
}

fn zero_term(g: &LabeledDiGraph) -> CanonicalTerm {
    CanonicalTerm { graph: g.clone(), coeff: 0, is_zero: true }
}

fn canonical_with_sign(g: &LabeledDiGraph, tag: &FamilyTag, sign: i64) -> CanonicalTerm {
    let mut t = canonicalize(g, &tag.rules());
    t.coeff *= sign;
    t
}

/// The graph with hair `i` deleted, with sign, or `None` for the last hair or
/// when a bivalent vertex appears.
pub fn delete_hair_raw(g: &LabeledDiGraph, i: usize, tag: &FamilyTag) -> Option<(LabeledDiGraph, i64)> {
    if g.s() <= 1 {
        return None;
    }
    let x = g.hairs[i] as usize;
    if g.valences()[x] == 3 {
        return None;
    }
    let rules = tag.rules();
    let offset = if rules.odd_vertices { g.v } else { g.e() };
    let sign = if (offset + i) % 2 == 0 { 1 } else { -1 };
    let mut hairs = g.hairs.clone();
    hairs.remove(i);
    Some((LabeledDiGraph::new(g.v, g.edges.clone(), hairs), sign))
}

pub fn delete_hair(g: &LabeledDiGraph, i: usize, tag: &FamilyTag) -> Result<CanonicalTerm> {
    if !tag.family.is_hairy() {
        return Err(Error::WrongFamily("hair deletion needs a hairy family".into()));
    }
    if i >= g.s() {
        return Err(Error::Invalid(format!("hair index {i} out of range for {g}")));
    }
    let tag = tag.with_family(Family::Hairy(g.s() - 1));
    Ok(match delete_hair_raw(g, i, &tag) {
        Some((out, sign)) => canonical_with_sign(&out, &tag, sign),
        None => zero_term(g),
    })
}

/// Which contraction terms to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    All,
    /// Terms that keep the number of sources.
    SourcePreserving,
    /// Terms that keep the number of targets.
    TargetPreserving,
}

/// d applied to one graph. Contracted terms are canonicalized with the family
/// of their own source count when the family fixes it.
pub fn d_graph(g: &LabeledDiGraph, tag: &FamilyTag, part: Part) -> Result<Combo> {
    let mut out = Combo::new();
    let (s0, t0) = (g.count_sources(), g.count_targets());
    for a in 0..g.e() {
        let Some((h, sign)) = contract_raw(g, a, tag) else { continue };
        let keep = match part {
            Part::All => true,
            Part::SourcePreserving => h.count_sources() == s0,
            Part::TargetPreserving => h.count_targets() == t0,
        };
        if !keep {
            continue;
        }
        let tag_h = match tag.family {
            Family::Sourced(_) => tag.with_family(Family::Sourced(h.count_sources())),
            _ => *tag,
        };
        add_term(&mut out, &canonical_with_sign(&h, &tag_h, sign), 1)?;
    }
    Ok(out)
}

pub fn h_graph(g: &LabeledDiGraph, tag: &FamilyTag) -> Result<Combo> {
    let mut out = Combo::new();
    for i in 0..g.s() {
        add_term(&mut out, &delete_hair(g, i, tag)?, 1)?;
    }
    Ok(out)
}

/// Matrix of `op` from `src` into the stacked basis of `dst`.
pub fn operator_matrix<F>(exec: Exec, src: &ComplexSlice, dst: &[Arc<ComplexSlice>], op: F) -> Result<SparseRationalMatrix>
where
    F: Fn(&LabeledDiGraph) -> Result<Combo> + Sync + Send,
{
    let sizes: Vec<usize> = dst.iter().map(|s| s.len()).collect();
    let off = offsets(&sizes);
    let columns = exec::try_map(exec, &src.basis, |g| -> Result<Vec<(usize, i64)>> {
        let combo = op(g)?;
        let mut col = Vec::with_capacity(combo.len());
        for (h, c) in combo {
            let pos = dst
                .iter()
                .enumerate()
                .find_map(|(k, s)| s.position(&h).map(|p| off[k] + p))
                .ok_or_else(|| Error::MissingTerm(format!("{h} (image of {g})")))?;
            col.push((pos, c));
        }
        Ok(col)
    })?;
    SparseRationalMatrix::from_int_columns(off[dst.len()], &columns)
}

/// A differential as a matrix together with the slices stacked as its target.
#[derive(Clone, Debug)]
pub struct Differential {
    pub matrix: SparseRationalMatrix,
    pub dst: Vec<Arc<ComplexSlice>>,
}

fn source_counts_below(key: &SliceKey, keep_same_only: bool) -> Vec<usize> {
    let s = key.s();
    if keep_same_only || s == 0 {
        vec![s]
    } else if s == 1 {
        vec![1]
    } else {
        vec![s, s - 1]
    }
}

/// d from `src` into the slices with one vertex and one edge fewer.
pub fn differential_d(store: &SliceStore, src: &ComplexSlice) -> Result<Differential> {
    let key = src.key;
    let Some(down) = key.shifted(-1, -1) else {
        return Ok(Differential { matrix: SparseRationalMatrix::zeros(0, src.len()), dst: Vec::new() });
    };
    let fixes_sources = matches!(key.tag.family, Family::Sourced(_)) || key.sources.is_some();
    let dst: Vec<Arc<ComplexSlice>> = if fixes_sources && !key.tag.family.is_hairy() {
        source_counts_below(&key, false)
            .into_iter()
            .map(|s| store.get(down.with_s(s)))
            .collect::<Result<_>>()?
    } else {
        vec![store.get(down)?]
    };
    let tag = key.tag;
    let matrix = operator_matrix(store.exec, src, &dst, |g| d_graph(g, &tag, Part::All))?;
    Ok(Differential { matrix, dst })
}

/// The source-preserving part of d, for oriented or sourced slices with a
/// fixed source count.
pub fn differential_d0(store: &SliceStore, src: &ComplexSlice) -> Result<Differential> {
    differential_part(store, src, Part::SourcePreserving)
}

/// Source- or target-preserving part of d on oriented or sourced slices.
pub fn differential_part(store: &SliceStore, src: &ComplexSlice, part: Part) -> Result<Differential> {
    let key = src.key;
    match key.tag.family {
        Family::Oriented | Family::Sourced(_) | Family::Directed => {}
        Family::Hairy(_) => return Err(Error::WrongFamily("d0 is defined on oriented and sourced graphs".into())),
    }
    if part == Part::SourcePreserving && key.sources.is_none() && !matches!(key.tag.family, Family::Sourced(_)) {
        return Err(Error::WrongFamily("d0 needs a fixed source count".into()));
    }
    let Some(down) = key.shifted(-1, -1) else {
        return Ok(Differential { matrix: SparseRationalMatrix::zeros(0, src.len()), dst: Vec::new() });
    };
    let dst = vec![store.get(down)?];
    let tag = key.tag;
    let matrix = operator_matrix(store.exec, src, &dst, |g| d_graph(g, &tag, part))?;
    Ok(Differential { matrix, dst })
}

pub fn differential_h(store: &SliceStore, src: &ComplexSlice) -> Result<Differential> {
    let key = src.key;
    let Family::Hairy(s) = key.tag.family else {
        return Err(Error::WrongFamily("h is defined on hairy graphs".into()));
    };
    if s == 0 {
        return Err(Error::WrongFamily("h needs at least one hair".into()));
    }
    if s == 1 {
        // deleting the last hair gives zero
        return Ok(Differential { matrix: SparseRationalMatrix::zeros(0, src.len()), dst: Vec::new() });
    }
    let dst = vec![store.get(key.with_s(s - 1))?];
    let tag = key.tag;
    let matrix = operator_matrix(store.exec, src, &dst, |g| h_graph(g, &tag))?;
    Ok(Differential { matrix, dst })
}

/// Restriction from sourced graphs to the acyclic ones: the matrix sending
/// each sourced basis graph to itself when oriented, to zero otherwise.
pub fn projection_matrix(store: &SliceStore, src: &ComplexSlice) -> Result<Differential> {
    let key = src.key;
    let Family::Sourced(s) = key.tag.family else {
        return Err(Error::WrongFamily("projection starts at sourced graphs".into()));
    };
    let dst_key = SliceKey::with_sources(key.tag.with_family(Family::Oriented), key.v, key.e, s);
    let dst = vec![store.get(dst_key)?];
    let rules = dst_key.tag.rules();
    let matrix = operator_matrix(store.exec, src, &dst, |g| {
        let mut out = Combo::new();
        if g.is_acyclic() {
            add_term(&mut out, &canonicalize(g, &rules), 1)?;
        }
        Ok(out)
    })?;
    Ok(Differential { matrix, dst })
}

/// Diagonal of automorphism group orders, used to pass between the chain side
/// and the dual side.
pub fn aut_orders(slice: &ComplexSlice) -> Vec<Q> {
    let rules = slice.key.tag.rules();
    slice
        .basis
        .iter()
        .map(|g| Q::from_integer(crate::graph::automorphism_count(g, &rules) as i64))
        .collect()
}

/// Dual of `m: src -> dst` under the pairing `<G, G> = |Aut G|`:
/// `diag(A_src)^-1 m^T diag(A_dst)`.
pub fn dual_matrix(m: &SparseRationalMatrix, a_src: &[Q], a_dst: &[Q]) -> Result<SparseRationalMatrix> {
    let inv: Vec<Q> = a_src.iter().map(|x| x.recip()).collect();
    m.transpose().scaled(&inv, a_dst)
}
