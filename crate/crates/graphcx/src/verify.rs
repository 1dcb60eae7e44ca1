//! Exhaustive checks of the algebraic identities over ranges of slices.
//! Every check reports the number of basis elements examined and the first
//! counterexample, if any.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complexes::{
    add_combo, aut_orders, apply_linear, d_graph, differential_d, differential_part, dual_matrix, h_graph, Combo, Part, SliceKey,
    SliceStore,
};
use crate::error::Result;
use crate::forest::{differential_parts, ede_targets, g_map, g_matrix, hairy_skeleton, is_forest_image, phi, phi_matrix, phi_target_key};
use crate::graph::{canonicalize, degree, is_admissible, relabel_sign, Family, FamilyTag, LabeledDiGraph};
use crate::linalg::{verify_quasi_iso, QuasiIsoReport, RankMode};
use crate::matrix::Q;
use crate::ribbon::{self, add_ribbon_combo, apply_ribbon, RibbonCombo, RibbonGraph};
use crate::total::{fixed_hair_complex_upto, fixed_source_complex, oriented_max_vertices, phi_chain_map, projection_chain_map};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failure: Option<String>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport { name: name.to_string(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    fn fail(&mut self, msg: String) {
        if self.failure.is_none() {
            self.failure = Some(msg);
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        if let Some(f) = other.failure {
            self.fail(f);
        }
    }
}

/// Bounds on the slices visited by a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub vmax: usize,
    pub emax: usize,
    pub smax: usize,
}

/// Tag of the family a graph belongs to after an operation that may change
/// its source or hair count.
fn own_tag(g: &LabeledDiGraph, tag: &FamilyTag) -> FamilyTag {
    match tag.family {
        Family::Sourced(_) => tag.with_family(Family::Sourced(g.count_sources())),
        Family::Hairy(_) => tag.with_family(Family::Hairy(g.s())),
        _ => *tag,
    }
}

fn d_of(c: &Combo, tag: &FamilyTag, part: Part) -> Result<Combo> {
    apply_linear(c, |g| d_graph(g, &own_tag(g, tag), part))
}

fn h_of(c: &Combo, tag: &FamilyTag) -> Result<Combo> {
    apply_linear(c, |g| if g.s() > 1 { h_graph(g, &own_tag(g, tag)) } else { Ok(Combo::new()) })
}

fn slice_keys(family: Family, n: i64, b: &Bounds) -> Vec<SliceKey> {
    let mut keys = Vec::new();
    let families: Vec<Family> = match family {
        Family::Hairy(_) => (1..=b.smax).map(Family::Hairy).collect(),
        Family::Sourced(_) => (1..=b.smax).map(Family::Sourced).collect(),
        f => vec![f],
    };
    for f in families {
        for v in 1..=b.vmax {
            for e in 0..=b.emax {
                keys.push(SliceKey::new(FamilyTag::new(f, n), v, e));
            }
        }
    }
    keys
}

/// `d^2 = 0` on every family; `d0^2 = 0` on oriented and sourced graphs
/// (oriented with each fixed source count up to `smax`); `h^2 = 0`,
/// `dh + hd = 0` and `(d + h)^2 = 0` on hairy graphs.
pub fn check_squares(store: &SliceStore, family: Family, n: i64, b: &Bounds) -> Result<CheckReport> {
    let mut rep = CheckReport::new("d2");
    for key in slice_keys(family, n, b) {
        let slice = store.get(key)?;
        let tag = key.tag;
        for g in &slice.basis {
            rep.checked += 1;
            let unit: Combo = [(g.clone(), 1)].into_iter().collect();
            let d1 = d_of(&unit, &tag, Part::All)?;
            if !d_of(&d1, &tag, Part::All)?.is_empty() {
                rep.fail(format!("d^2 != 0 on {g} ({key})"));
            }
            match tag.family {
                Family::Oriented | Family::Sourced(_) => {
                    let d0 = d_of(&unit, &tag, Part::SourcePreserving)?;
                    if !d_of(&d0, &tag, Part::SourcePreserving)?.is_empty() {
                        rep.fail(format!("d0^2 != 0 on {g} ({key})"));
                    }
                }
                Family::Hairy(_) => {
                    let h1 = h_of(&unit, &tag)?;
                    if !h_of(&h1, &tag)?.is_empty() {
                        rep.fail(format!("h^2 != 0 on {g} ({key})"));
                    }
                    let mut anti = d_of(&h1, &tag, Part::All)?;
                    add_combo(&mut anti, &h_of(&d1, &tag)?, 1)?;
                    if !anti.is_empty() {
                        rep.fail(format!("dh + hd != 0 on {g} ({key})"));
                    }
                    let mut total = d1.clone();
                    add_combo(&mut total, &h1, 1)?;
                    let mut sq = d_of(&total, &tag, Part::All)?;
                    add_combo(&mut sq, &h_of(&total, &tag)?, 1)?;
                    if !sq.is_empty() {
                        rep.fail(format!("(d + h)^2 != 0 on {g} ({key})"));
                    }
                }
                Family::Directed => {}
            }
        }
    }
    Ok(rep)
}

fn phi_of(c: &Combo, tag: &FamilyTag) -> Result<Combo> {
    apply_linear(c, |g| phi(g, &own_tag(g, tag)))
}

/// `phi((d + h) g) = d phi(g)`, `phi(d g) = d0 phi(g)`, degree raised by one
/// and every output term carrying `s` sources, for every hairy basis graph.
pub fn check_phi_chain_map(store: &SliceStore, n: i64, b: &Bounds) -> Result<CheckReport> {
    let mut rep = CheckReport::new("chainmap-phi");
    for key in slice_keys(Family::Hairy(1), n, b) {
        let slice = store.get(key)?;
        let tag = key.tag;
        let otag = crate::forest::target_tag(&tag);
        for g in &slice.basis {
            rep.checked += 1;
            let unit: Combo = [(g.clone(), 1)].into_iter().collect();
            let image = phi(g, &tag)?;
            for h in image.keys() {
                if degree(h, &otag) != degree(g, &tag) + 1 {
                    rep.fail(format!("degree not raised by one on {g}"));
                }
                if h.count_sources() != g.s() {
                    rep.fail(format!("term {h} of phi({g}) has the wrong number of sources"));
                }
            }
            let mut dh = d_of(&unit, &tag, Part::All)?;
            add_combo(&mut dh, &h_of(&unit, &tag)?, 1)?;
            if phi_of(&dh, &tag)? != d_of(&image, &otag, Part::All)? {
                rep.fail(format!("phi((d+h) g) != d phi(g) for {g} ({key})"));
            }
            if phi_of(&d_of(&unit, &tag, Part::All)?, &tag)? != d_of(&image, &otag, Part::SourcePreserving)? {
                rep.fail(format!("phi(d g) != d0 phi(g) for {g} ({key})"));
            }
        }
    }
    Ok(rep)
}

/// The per-forest decomposition of `d phi(g)`: the cycle part vanishes, the
/// joining part equals `phi(h g)` and the forest part equals `phi(d g)`.
pub fn check_lemma_identities(store: &SliceStore, n: i64, b: &Bounds) -> Result<CheckReport> {
    let mut rep = CheckReport::new("lemma-identities");
    for key in slice_keys(Family::Hairy(1), n, b) {
        let slice = store.get(key)?;
        let tag = key.tag;
        for g in &slice.basis {
            rep.checked += 1;
            let unit: Combo = [(g.clone(), 1)].into_iter().collect();
            let parts = differential_parts(g, &tag)?;
            if !parts.cycle.is_empty() {
                rep.fail(format!("cycle part does not cancel for {g}"));
            }
            if parts.joining != phi_of(&h_of(&unit, &tag)?, &tag)? {
                rep.fail(format!("joining part differs from phi(h g) for {g}"));
            }
            if parts.forest != phi_of(&d_of(&unit, &tag, Part::All)?, &tag)? {
                rep.fail(format!("forest part differs from phi(d g) for {g}"));
            }
        }
    }
    Ok(rep)
}

/// `delta^2 = 0`, `delta1^2 = 0`, `delta delta1 + delta1 delta = 0` on every
/// ribbon basis graph with at most `kmax` edges.
pub fn check_ribbon_squares(kmax: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("rgc-d2");
    for k in 1..=kmax {
        for g in ribbon::rgc_basis(k, None, None)? {
            rep.checked += 1;
            let d = ribbon::delta(&g)?;
            let a = ribbon::delta1(&g)?;
            if !apply_ribbon(&d, ribbon::delta)?.is_empty() {
                rep.fail(format!("delta^2 != 0 on {}", g.to_json()));
            }
            if !apply_ribbon(&a, ribbon::delta1)?.is_empty() {
                rep.fail(format!("delta1^2 != 0 on {}", g.to_json()));
            }
            let mut anti = apply_ribbon(&d, ribbon::delta1)?;
            add_ribbon_combo(&mut anti, &apply_ribbon(&a, ribbon::delta)?, Q::from_integer(1));
            if !anti.is_empty() {
                rep.fail(format!("delta delta1 + delta1 delta != 0 on {}", g.to_json()));
            }
        }
    }
    Ok(rep)
}

fn topological_orders(g: &LabeledDiGraph, limit: usize) -> Vec<Vec<usize>> {
    fn rec(g: &LabeledDiGraph, indeg: &mut Vec<usize>, order: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if order.len() == g.v {
            out.push(order.clone());
            return;
        }
        for x in 0..g.v {
            if indeg[x] == 0 && !order.contains(&x) {
                for &(t, h) in &g.edges {
                    if t as usize == x {
                        indeg[h as usize] -= 1;
                    }
                }
                order.push(x);
                rec(g, indeg, order, out, limit);
                order.pop();
                for &(t, h) in &g.edges {
                    if t as usize == x {
                        indeg[h as usize] += 1;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(g, &mut g.in_degrees(), &mut Vec::new(), &mut out, limit);
    out
}

/// The ribbon map against the dual of `d` on oriented graphs with parameter
/// one: `F delta_O = (delta + delta1) F` and, for the target-preserving part,
/// `F delta_O0 = delta F`; every output term has as many boundaries as the
/// graph has targets; the grafted terms do not depend on the topological
/// order used.
pub fn check_f_chain_map(store: &SliceStore, b: &Bounds) -> Result<CheckReport> {
    let mut rep = CheckReport::new("chainmap-F");
    let tag = FamilyTag::new(Family::Oriented, 1);
    for v in 1..=b.vmax {
        for e in v.saturating_sub(1)..=b.emax.min(3 * v / 2) {
            let small = store.get(SliceKey::new(tag, v, e))?;
            if small.is_empty() {
                continue;
            }
            let big = store.get(SliceKey::new(tag, v + 1, e + 1))?;
            let (a_small, a_big) = (aut_orders(&small), aut_orders(&big));
            let big_images: Vec<RibbonCombo> = big.basis.iter().map(ribbon::f_map).collect::<Result<_>>()?;
            for (part, graded) in [(Part::All, false), (Part::TargetPreserving, true)] {
                let d = if graded { differential_part(store, &big, part)? } else { differential_d(store, &big)? };
                let cols = dual_matrix(&d.matrix, &a_big, &a_small)?.columns();
                for (j, g) in small.basis.iter().enumerate() {
                    let fg = ribbon::f_map(g)?;
                    let mut lhs = apply_ribbon(&fg, ribbon::delta)?;
                    if !graded {
                        add_ribbon_combo(&mut lhs, &apply_ribbon(&fg, ribbon::delta1)?, Q::from_integer(1));
                    }
                    let mut rhs = RibbonCombo::new();
                    for &(i, c) in &cols[j] {
                        add_ribbon_combo(&mut rhs, &big_images[i], c);
                    }
                    if lhs != rhs {
                        let what = if graded { "F delta_O0 != delta F" } else { "F delta_O != (delta + delta1) F" };
                        rep.fail(format!("{what} on {g}"));
                    }
                }
            }
            for g in &small.basis {
                rep.checked += 1;
                let targets = g.count_targets();
                for r in ribbon::f_map(g)?.keys() {
                    if r.boundaries().len() != targets {
                        rep.fail(format!("F({g}) has a term with the wrong number of boundaries"));
                    }
                }
                let orders = topological_orders(g, 64);
                let first = ribbon::f_grafts(g, &orders[0])?;
                for o in &orders[1..] {
                    if ribbon::f_grafts(g, o)? != first {
                        rep.fail(format!("F({g}) depends on the topological order {o:?}"));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Quasi-isomorphism check of `phi: (H_s G_n, d) -> (S_s OG_{n+1}, d0)` at
/// loop order `b`. Oriented slices with more than `vcap` vertices are left
/// out, which marks the affected degrees as boundary degrees.
pub fn quasi_iso_phi(store: &SliceStore, n: i64, s: usize, b: i64, vcap: usize, mode: RankMode) -> Result<QuasiIsoReport> {
    let vhi = vcap.min(oriented_max_vertices(b, s));
    // phi adds b + s vertices, so the hairy side is cut to match
    let h = fixed_hair_complex_upto(store, n, s, b, (vhi as i64 - b - s as i64).max(0) as usize)?;
    let o = fixed_source_complex(store, n + 1, s, b, (1, vhi), false)?;
    let f = phi_chain_map(store, &h, &o)?;
    verify_quasi_iso(&f, &h.window, &o.window, mode)
}

/// Quasi-isomorphism check of the projection from sourced to oriented graphs
/// with `s` sources and parameter `n` at loop order `b`.
pub fn quasi_iso_p(store: &SliceStore, n: i64, s: usize, b: i64, vcap: usize, mode: RankMode) -> Result<QuasiIsoReport> {
    let range = (1, vcap.min(oriented_max_vertices(b, s)));
    let src = fixed_source_complex(store, n, s, b, range, true)?;
    let dst = fixed_source_complex(store, n, s, b, range, false)?;
    let f = projection_chain_map(store, &src, &dst)?;
    verify_quasi_iso(&f, &src.window, &dst.window, mode)
}

/// The target slice of `phi` on a hairy slice, re-exported for callers that
/// only hold keys.
pub fn phi_target(key: &SliceKey) -> Result<SliceKey> {
    phi_target_key(key)
}

/// Convenience for callers holding one ribbon graph.
pub fn ribbon_differential(r: &RibbonGraph) -> Result<RibbonCombo> {
    let mut out = ribbon::delta(r)?;
    add_ribbon_combo(&mut out, &ribbon::delta1(r)?, Q::from_integer(1));
    Ok(out)
}

/// Canonical forms are invariant under random relabelings, with the sign of
/// the relabeling: `canon(r g) = sign(r) canon(g)`.
pub fn check_relabeling(store: &SliceStore, family: Family, n: i64, b: &Bounds, seed: u64, trials: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("relabeling");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for key in slice_keys(family, n, b) {
        let slice = store.get(key)?;
        let rules = key.tag.rules();
        for g in &slice.basis {
            rep.checked += 1;
            let base = canonicalize(g, &rules);
            for _ in 0..trials {
                let mut vperm: Vec<usize> = (0..g.v).collect();
                let mut eperm: Vec<usize> = (0..g.e()).collect();
                let mut hperm: Vec<usize> = (0..g.s()).collect();
                vperm.shuffle(&mut rng);
                eperm.shuffle(&mut rng);
                hperm.shuffle(&mut rng);
                let flips: Vec<bool> = (0..g.e()).map(|_| rules.undirected && rng.gen()).collect();
                let moved = canonicalize(&g.relabeled(&vperm, &eperm, &flips, &hperm), &rules);
                let sign = relabel_sign(&rules, &vperm, &eperm, &flips, &hperm);
                if moved.graph != base.graph || moved.is_zero != base.is_zero || moved.coeff != base.coeff * sign {
                    rep.fail(format!("canonical form of {g} changes under relabeling {vperm:?} {eperm:?} {flips:?} {hperm:?}"));
                }
            }
        }
    }
    Ok(rep)
}

/// The dual map on oriented graphs with parameter `n + 1`, at most `vmax`
/// vertices and loop order at most `bmax`: the number of bivalent targets reaches `e - v + s` of the
/// hairy skeleton exactly when the graph is a forest image; the dual map is
/// nonzero exactly there, unless the skeleton itself vanishes by symmetry;
/// and its matrix is the dual of the forest map matrix under the pairing by
/// automorphism group orders.
pub fn check_g_duality(store: &SliceStore, n: i64, vmax: usize, smax: usize, bmax: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("g-duality");
    let htag1 = FamilyTag::new(Family::Hairy(1), n);
    let otag = crate::forest::target_tag(&htag1);
    for s in 1..=smax {
        let htag = htag1.with_family(Family::Hairy(s));
        for big_v in 1..=vmax {
            for big_e in big_v.saturating_sub(1)..=(big_v + bmax) {
                let okey = SliceKey::with_sources(otag, big_v, big_e, s);
                let oslice = store.get(okey)?;
                for g in &oslice.basis {
                    rep.checked += 1;
                    let hs = hairy_skeleton(g);
                    let bivalent = ede_targets(g).len() as i64;
                    let threshold = bivalent == hs.e() as i64 - hs.v as i64 + hs.s() as i64;
                    let image = is_forest_image(g, &htag);
                    if threshold != image {
                        rep.fail(format!("{g}: {bivalent} bivalent targets but forest image = {image}"));
                    }
                    let hs_alive = !hs.has_tadpole()
                        && is_admissible(&hs, &htag.with_family(Family::Hairy(hs.s())))
                        && !canonicalize(&hs, &htag.rules()).is_zero;
                    let nonzero = !g_map(g, &htag).is_zero;
                    if nonzero != (threshold && hs_alive) {
                        rep.fail(format!("{g}: dual map nonzero = {nonzero}, threshold met = {threshold}"));
                    }
                }
                // Matrix duality against the hairy slice mapping here.
                let v = big_v as i64 - (big_e as i64 - big_v as i64) - s as i64;
                let e = big_v as i64 - s as i64;
                if v < 1 || e < 0 {
                    continue;
                }
                let hkey = SliceKey::new(htag, v as usize, e as usize);
                if phi_target_key(&hkey)? != okey {
                    continue;
                }
                let hslice = store.get(hkey)?;
                let phi_m = phi_matrix(store, &hslice)?.matrix;
                let g_m = g_matrix(store, &oslice, hkey)?.matrix;
                let dual = dual_matrix(&phi_m, &aut_orders(&hslice), &aut_orders(&oslice))?;
                if g_m != dual {
                    rep.fail(format!("dual map matrix differs from the dual of the forest map at {okey}"));
                }
            }
        }
    }
    Ok(rep)
}
