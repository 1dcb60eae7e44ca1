//! Assembly of graded windows from slices: fixed-hair and fixed-source
//! complexes at a given loop order, the total hairy and oriented complexes,
//! and the chain maps between them.

use std::sync::Arc;

use crate::complexes::{add_combo, d_graph, h_graph, operator_matrix, Combo, ComplexSlice, Part, SliceKey, SliceStore};
use crate::error::{Error, Result};
use crate::forest::{phi, target_tag};
use crate::graph::{canonicalize, Family, FamilyTag, LabeledDiGraph};
use crate::linalg::{ChainComplexWindow, ChainMap};
use crate::matrix::SparseRationalMatrix;

/// A window together with the slices stacked in each degree.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub window: ChainComplexWindow,
    pub blocks: Vec<Vec<Arc<ComplexSlice>>>,
}

impl Assembled {
    pub fn block(&self, k: i64) -> &[Arc<ComplexSlice>] {
        let w = &self.window;
        if k < w.lo || k > w.hi() {
            &[]
        } else {
            &self.blocks[(k - w.lo) as usize]
        }
    }
}

/// Matrix of `op` from the stacked `src` slices into the stacked `dst` slices.
pub fn block_matrix<F>(store: &SliceStore, src: &[Arc<ComplexSlice>], dst: &[Arc<ComplexSlice>], op: F) -> Result<SparseRationalMatrix>
where
    F: Fn(&LabeledDiGraph, &SliceKey) -> Result<Combo> + Sync + Send,
{
    let rows: usize = dst.iter().map(|s| s.len()).sum();
    let cols: usize = src.iter().map(|s| s.len()).sum();
    let mut triplets = Vec::new();
    let mut off = 0;
    for s in src {
        let key = s.key;
        let m = operator_matrix(store.exec, s, dst, |g| op(g, &key))?;
        triplets.extend(m.entries().iter().map(|&(r, c, x)| (r, c + off, x)));
        off += s.len();
    }
    SparseRationalMatrix::from_triplets(rows, cols, triplets)
}

/// Builds a window from blocks listed in increasing degree, with `op` of
/// degree +1 as the differential.
pub fn assemble<F>(store: &SliceStore, keys: &[Vec<SliceKey>], closed: (bool, bool), op: F) -> Result<Assembled>
where
    F: Fn(&LabeledDiGraph, &SliceKey) -> Result<Combo> + Sync + Send,
{
    let lo = keys
        .iter()
        .flatten()
        .map(|k| k.degree())
        .min()
        .ok_or_else(|| Error::Invalid("empty window".into()))?;
    let mut blocks = Vec::new();
    for (i, ks) in keys.iter().enumerate() {
        if let Some(k) = ks.iter().find(|k| k.degree() != lo + i as i64) {
            return Err(Error::Invalid(format!("slice {k} sits in the wrong degree")));
        }
        blocks.push(ks.iter().map(|&k| store.get(k)).collect::<Result<Vec<_>>>()?);
    }
    let dims = blocks.iter().map(|b| b.iter().map(|s| s.len()).sum()).collect();
    let diffs = blocks
        .windows(2)
        .map(|w| block_matrix(store, &w[0], &w[1], &op))
        .collect::<Result<Vec<_>>>()?;
    let window = ChainComplexWindow { lo, dims, diffs, closed_below: closed.0, closed_above: closed.1 };
    Ok(Assembled { window, blocks })
}

/// Per-degree matrices of `op` from `src` into `dst`, raising degree by `shift`.
pub fn assemble_map<F>(store: &SliceStore, src: &Assembled, dst: &Assembled, shift: i64, op: F) -> Result<ChainMap>
where
    F: Fn(&LabeledDiGraph, &SliceKey) -> Result<Combo> + Sync + Send,
{
    let maps = (0..src.blocks.len())
        .map(|i| {
            let k = src.window.lo + i as i64;
            block_matrix(store, &src.blocks[i], dst.block(k + shift), &op)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainMap { shift, maps })
}

/// Largest vertex count of a hairy graph with loop order `b` and `s` hairs
/// when every vertex is at least trivalent.
pub fn hairy_max_vertices(b: i64, s: usize) -> usize {
    (2 * b + s as i64).max(0) as usize
}

/// Largest vertex count of an oriented graph with loop order `b` and `s`
/// sources.
pub fn oriented_max_vertices(b: i64, s: usize) -> usize {
    (3 * b + 2 * s as i64).max(0) as usize
}

fn hairy_d(g: &LabeledDiGraph, key: &SliceKey) -> Result<Combo> {
    d_graph(g, &key.tag, Part::All)
}

fn hairy_d_plus_h(g: &LabeledDiGraph, key: &SliceKey) -> Result<Combo> {
    let mut out = d_graph(g, &key.tag, Part::All)?;
    if g.s() > 1 {
        add_combo(&mut out, &h_graph(g, &key.tag)?, 1)?;
    }
    Ok(out)
}

fn source_preserving(g: &LabeledDiGraph, key: &SliceKey) -> Result<Combo> {
    d_graph(g, &key.tag, Part::SourcePreserving)
}

fn full_d(g: &LabeledDiGraph, key: &SliceKey) -> Result<Combo> {
    d_graph(g, &key.tag, Part::All)
}

/// `(H_s G_n, d)` at loop order `b`: finite, closed on both ends.
pub fn fixed_hair_complex(store: &SliceStore, n: i64, s: usize, b: i64) -> Result<Assembled> {
    fixed_hair_complex_upto(store, n, s, b, usize::MAX)
}

/// [`fixed_hair_complex`] restricted to at most `vcap` vertices. The window is
/// open at the bottom when the cap cuts anything off.
pub fn fixed_hair_complex_upto(store: &SliceStore, n: i64, s: usize, b: i64, vcap: usize) -> Result<Assembled> {
    let tag = FamilyTag::new(Family::Hairy(s), n);
    let full = hairy_max_vertices(b, s);
    let vmax = full.min(vcap);
    let keys: Vec<Vec<SliceKey>> = (1..=vmax)
        .rev()
        .filter(|&v| v as i64 + b >= 0)
        .map(|v| vec![SliceKey::new(tag, v, (v as i64 + b) as usize)])
        .collect();
    assemble(store, &keys, (vmax >= full, true), hairy_d)
}

/// Fixed-source complex with `d0`: oriented graphs with `s` sources, or the
/// sourced family when `sourced` is set, at loop order `b`, restricted to
/// vertex counts in `vrange`.
pub fn fixed_source_complex(
    store: &SliceStore,
    n: i64,
    s: usize,
    b: i64,
    vrange: (usize, usize),
    sourced: bool,
) -> Result<Assembled> {
    let full = oriented_max_vertices(b, s);
    let (vlo, vhi) = (vrange.0.max(1), vrange.1.min(full));
    let keys: Vec<Vec<SliceKey>> = (vlo..=vhi)
        .rev()
        .filter(|&v| v as i64 + b >= 0)
        .map(|v| {
            let e = (v as i64 + b) as usize;
            vec![if sourced {
                SliceKey::new(FamilyTag::new(Family::Sourced(s), n), v, e)
            } else {
                SliceKey::with_sources(FamilyTag::new(Family::Oriented, n), v, e, s)
            }]
        })
        .collect();
    assemble(store, &keys, (vhi >= full, vlo <= 1), source_preserving)
}

/// `(HG_n, d + h)` at loop order `b`, for `v + s` in `nrange`. The complex
/// is unbounded in `v + s`, so the bottom of the window is never closed.
pub fn total_hairy_complex(store: &SliceStore, n: i64, b: i64, nrange: (usize, usize)) -> Result<Assembled> {
    let keys: Vec<Vec<SliceKey>> = (nrange.0.max(2)..=nrange.1)
        .rev()
        .map(|total| {
            (1..total)
                .filter_map(|s| {
                    let v = total - s;
                    let e = v as i64 + b;
                    (e >= 0 && v <= hairy_max_vertices(b, s))
                        .then(|| SliceKey::new(FamilyTag::new(Family::Hairy(s), n), v, e as usize))
                })
                .collect()
        })
        .collect();
    assemble(store, &keys, (false, nrange.0 <= 2), hairy_d_plus_h)
}

/// `(OG_n, d)` at loop order `b`, all source counts, vertex counts in `vrange`.
pub fn total_oriented_complex(store: &SliceStore, n: i64, b: i64, vrange: (usize, usize)) -> Result<Assembled> {
    let tag = FamilyTag::new(Family::Oriented, n);
    let keys: Vec<Vec<SliceKey>> = (vrange.0.max(1)..=vrange.1)
        .rev()
        .filter(|&v| v as i64 + b >= 0)
        .map(|v| vec![SliceKey::new(tag, v, (v as i64 + b) as usize)])
        .collect();
    assemble(store, &keys, (false, vrange.0 <= 1), full_d)
}

/// The forest map between assembled windows.
pub fn phi_chain_map(store: &SliceStore, src: &Assembled, dst: &Assembled) -> Result<ChainMap> {
    assemble_map(store, src, dst, 1, |g, key| phi(g, &key.tag))
}

/// Restriction from sourced to oriented graphs.
pub fn projection_chain_map(store: &SliceStore, src: &Assembled, dst: &Assembled) -> Result<ChainMap> {
    assemble_map(store, src, dst, 0, |g, key| {
        let mut out = Combo::new();
        if g.is_acyclic() {
            let rules = key.tag.with_family(Family::Oriented).rules();
            crate::complexes::add_term(&mut out, &canonicalize(g, &rules), 1)?;
        }
        Ok(out)
    })
}

/// Oriented parameter receiving the hairy parameter `n`.
pub fn oriented_n(n: i64) -> i64 {
    target_tag(&FamilyTag::new(Family::Hairy(1), n)).n
}
