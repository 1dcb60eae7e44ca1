//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion, then
//! asserts that the only failures are the documented ones.
//!
//! All ranks are computed by exact integer elimination.

mod common;

use std::collections::BTreeSet;
use std::io::Write;

use common::{brute_force_basis, oracle_cycled, oracle_double_hair, oracle_spanning};
use graphcx::complexes::{ComplexSlice, SliceKey};
use graphcx::forest::{cycled_forests, double_hair_forests, spanning_forests};
use graphcx::linalg::{homology_dims, verify_quasi_iso, HomologySummary, QuasiIsoReport, RankMode};
use graphcx::ribbon::{rgc_window, RibbonGraph};
use graphcx::total::{oriented_n, phi_chain_map, total_hairy_complex, total_oriented_complex};
use graphcx::verify::*;
use graphcx::{Exec, Family, FamilyTag, LabeledDiGraph, SliceStore};

struct Outcome {
    id: usize,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Euler {
    windows: usize,
    bad: Vec<String>,
}

impl Euler {
    fn record(&mut self, what: &str, h: &HomologySummary) {
        self.windows += 1;
        if h.euler_chain() != h.euler_homology() {
            self.bad.push(what.to_string());
        }
    }

    fn report(&mut self, what: &str, rep: &QuasiIsoReport) {
        self.record(&format!("{what} source"), &rep.src_homology);
        self.record(&format!("{what} target"), &rep.dst_homology);
    }
}

fn summary(reps: &[CheckReport]) -> (bool, String) {
    let checked: usize = reps.iter().map(|r| r.checked).sum();
    match reps.iter().find_map(|r| r.failure.clone()) {
        None => (true, format!("{checked} basis elements")),
        Some(f) => (false, f),
    }
}

fn squares() -> Outcome {
    let store = SliceStore::default();
    let b = Bounds { vmax: 6, emax: 8, smax: 3 };
    let mut reps = Vec::new();
    for n in 0..=2 {
        for fam in [Family::Directed, Family::Oriented, Family::Sourced(1), Family::Hairy(1)] {
            reps.push(check_squares(&store, fam, n, &b).unwrap());
        }
    }
    let (ok, detail) = summary(&reps);
    Outcome { id: 1, ok, detail }
}

fn phi_chain_map_identities() -> Outcome {
    let store = SliceStore::default();
    let b = Bounds { vmax: 5, emax: 7, smax: 3 };
    let reps: Vec<CheckReport> = (0..=1).map(|n| check_phi_chain_map(&store, n, &b).unwrap()).collect();
    let (ok, detail) = summary(&reps);
    Outcome { id: 2, ok, detail }
}

/// Vertex caps on the oriented side at loop order three, where the full
/// windows do not fit the memory and time budget of a test run.
fn phi_cap(b: i64, s: usize) -> usize {
    match (b, s) {
        (3, 2) => 9,
        (3, 3) => 8,
        _ => usize::MAX,
    }
}

fn p_cap(b: i64, s: usize) -> usize {
    match (b, s) {
        (3, 2) | (3, 3) => 8,
        _ => usize::MAX,
    }
}

fn cap_note(cap: fn(i64, usize) -> usize) -> String {
    let capped: Vec<String> =
        (1..=3).filter(|&s| cap(3, s) != usize::MAX).map(|s| format!("s={s} V<={}", cap(3, s))).collect();
    format!("b=3 oriented side capped at {}", capped.join(", "))
}

fn mismatches(rep: &QuasiIsoReport) -> String {
    rep.records
        .iter()
        .filter(|r| r.status == "mismatch")
        .map(|r| format!("deg {} H {}/{} rank {}", r.degree, r.h_src, r.h_dst, r.induced_rank))
        .collect::<Vec<_>>()
        .join("; ")
}

fn forest_quasi_iso(euler: &mut Euler) -> (Outcome, BTreeSet<(i64, usize, i64)>) {
    let mut failed = BTreeSet::new();
    let mut notes = Vec::new();
    let mut degrees = 0;
    for b in 0..=3 {
        // a fresh store per loop order keeps the peak memory down
        let store = SliceStore::default();
        for n in 0..=1 {
            for s in 1..=3 {
                let rep = quasi_iso_phi(&store, n, s, b, phi_cap(b, s), RankMode::Exact).unwrap();
                euler.report(&format!("fixed hairs n={n} s={s} b={b}"), &rep);
                degrees += rep.records.iter().filter(|r| r.status == "iso").count();
                if !rep.passed() {
                    failed.insert((n, s, b));
                    notes.push(format!("n={n} s={s} b={b}: {}", mismatches(&rep)));
                }
            }
        }
    }
    let detail = if notes.is_empty() {
        format!("{degrees} interior degrees iso; {}", cap_note(phi_cap))
    } else {
        format!("{degrees} interior degrees iso; mismatches at {}; {}", notes.join(", "), cap_note(phi_cap))
    };
    (Outcome { id: 3, ok: failed.is_empty(), detail }, failed)
}

fn projection_quasi_iso(euler: &mut Euler) -> Outcome {
    let mut notes = Vec::new();
    let mut degrees = 0;
    for b in 0..=3 {
        let store = SliceStore::default();
        for n in 1..=2 {
            for s in 1..=3 {
                let rep = quasi_iso_p(&store, n, s, b, p_cap(b, s), RankMode::Exact).unwrap();
                euler.report(&format!("sourced n={n} s={s} b={b}"), &rep);
                degrees += rep.records.iter().filter(|r| r.status == "iso").count();
                if !rep.passed() {
                    notes.push(format!("n={n} s={s} b={b}: {}", mismatches(&rep)));
                }
            }
        }
    }
    let ok = notes.is_empty();
    let detail = if ok {
        format!("{degrees} interior degrees iso; {}", cap_note(p_cap))
    } else {
        format!("mismatches at {}", notes.join(", "))
    };
    Outcome { id: 4, ok, detail }
}

fn total_quasi_iso(euler: &mut Euler) -> (Outcome, BTreeSet<(i64, i64)>) {
    let mut failed = BTreeSet::new();
    let mut notes = Vec::new();
    let mut degrees = 0;
    for b in 0..=3i64 {
        let store = SliceStore::default();
        let vmax = if b == 3 { 8 } else { 9 };
        for n in 0..=1 {
            let h = total_hairy_complex(&store, n, b, (2, vmax - b as usize)).unwrap();
            let o = total_oriented_complex(&store, oriented_n(n), b, (1, vmax)).unwrap();
            let f = phi_chain_map(&store, &h, &o).unwrap();
            let rep = verify_quasi_iso(&f, &h.window, &o.window, RankMode::Exact).unwrap();
            euler.report(&format!("total n={n} b={b}"), &rep);
            degrees += rep.records.iter().filter(|r| r.status == "iso").count();
            if !rep.passed() {
                failed.insert((n, b));
                notes.push(format!("n={n} b={b}: {}", mismatches(&rep)));
            }
        }
    }
    let scope = "oriented side V<=9 (V<=8 at b=3), lowest degree truncated";
    let detail = if notes.is_empty() {
        format!("{degrees} interior degrees iso; {scope}")
    } else {
        format!("{degrees} interior degrees iso; mismatches at {}; {scope}", notes.join(", "))
    };
    (Outcome { id: 5, ok: failed.is_empty(), detail }, failed)
}

fn ribbon_identities(euler: &mut Euler) -> Outcome {
    let rep = check_ribbon_squares(4).unwrap();
    let mut ok = rep.passed();
    // the full and graded differentials as matrices, composed
    for graded in [false, true] {
        let w = rgc_window(4, graded).unwrap();
        ok &= w.validate().is_ok();
        let h = homology_dims(&w, RankMode::Exact).unwrap();
        euler.record(&format!("ribbon graded={graded}"), &h);
    }
    let detail = match &rep.failure {
        None => format!("{} ribbon graphs with e<=4", rep.checked),
        Some(f) => f.clone(),
    };
    Outcome { id: 6, ok, detail }
}

fn worked_boundaries() -> Outcome {
    let edge = RibbonGraph::edge().boundaries();
    let lp = RibbonGraph::loop_graph().boundaries();
    let ok = edge == vec![vec![0, 1]] && lp == vec![vec![0], vec![1]];
    Outcome { id: 7, ok, detail: format!("edge {edge:?}, loop {lp:?} (flags counted from 0)") }
}

fn f_chain_map() -> Outcome {
    let store = SliceStore::default();
    // nothing is trivalent-compatible with a nonzero image below six vertices
    let rep = check_f_chain_map(&store, &Bounds { vmax: 6, emax: 9, smax: 1 }).unwrap();
    let detail = match &rep.failure {
        None => format!("{} oriented graphs with v<=6, both identities and order independence", rep.checked),
        Some(f) => f.clone(),
    };
    Outcome { id: 8, ok: rep.passed(), detail }
}

fn hairy_graphs(emax: usize) -> Vec<LabeledDiGraph> {
    let store = SliceStore::default();
    let mut out = BTreeSet::new();
    for n in 0..=1 {
        for s in 1..=3 {
            for v in 1..=emax + 1 {
                for e in v - 1..=emax {
                    out.extend(store.get(SliceKey::new(FamilyTag::new(Family::Hairy(s), n), v, e)).unwrap().basis.iter().cloned());
                }
            }
        }
    }
    out.into_iter().collect()
}

fn oracles(euler: &Euler) -> Outcome {
    let mut problems = Vec::new();
    let graphs = hairy_graphs(10);
    for g in &graphs {
        let spanning: BTreeSet<Vec<usize>> = spanning_forests(g).into_iter().collect();
        let double: BTreeSet<Vec<usize>> = double_hair_forests(g).into_iter().map(|f| f.edges).collect();
        let cycled: BTreeSet<Vec<usize>> = cycled_forests(g).into_iter().map(|f| f.edges).collect();
        if spanning != oracle_spanning(g) || double != oracle_double_hair(g) || cycled != oracle_cycled(g) {
            problems.push(format!("forest enumeration on {g}"));
            break;
        }
    }
    let mut slices = 0;
    let mut families: Vec<(FamilyTag, Option<usize>)> = Vec::new();
    for n in 0..=2 {
        for fam in [Family::Directed, Family::Oriented, Family::Sourced(1), Family::Sourced(2)] {
            families.push((FamilyTag::new(fam, n), None));
        }
        families.push((FamilyTag::new(Family::Oriented, n), Some(2)));
        for s in 1..=3 {
            families.push((FamilyTag::new(Family::Hairy(s), n), None));
        }
    }
    'basis: for (tag, sources) in families {
        for v in 1..=4 {
            for e in 0..=6 {
                slices += 1;
                let slice = ComplexSlice::generate(SliceKey { tag, v, e, sources }, Exec::Sequential);
                let generated: BTreeSet<LabeledDiGraph> = slice.basis.iter().cloned().collect();
                if generated.len() != slice.len() || generated != brute_force_basis(&tag, v, e, sources) {
                    problems.push(format!("basis of {tag:?} v={v} e={e}"));
                    break 'basis;
                }
            }
        }
    }
    if !euler.bad.is_empty() {
        problems.push(format!("Euler characteristic differs on {}", euler.bad.join(", ")));
    }
    let detail = if problems.is_empty() {
        format!(
            "forests on {} hairy graphs with e<=10, {slices} basis slices with v<=4, Euler characteristic on {} windows",
            graphs.len(),
            euler.windows
        )
    } else {
        problems.join("; ")
    };
    Outcome { id: 9, ok: problems.is_empty(), detail }
}

fn dual_map() -> Outcome {
    let store = SliceStore::default();
    let reps: Vec<CheckReport> = (0..=1).map(|n| check_g_duality(&store, n, 6, 3, 3).unwrap()).collect();
    let (ok, detail) = summary(&reps);
    Outcome { id: 10, ok, detail: format!("{detail}, v<=6, s<=3, loop order <=3") }
}

#[test]
fn acceptance() {
    let mut euler = Euler::default();
    let mut out = Vec::new();
    out.push(squares());
    out.push(phi_chain_map_identities());
    let (c3, failed3) = forest_quasi_iso(&mut euler);
    out.push(c3);
    out.push(projection_quasi_iso(&mut euler));
    let (c5, failed5) = total_quasi_iso(&mut euler);
    out.push(c5);
    out.push(ribbon_identities(&mut euler));
    out.push(worked_boundaries());
    out.push(f_chain_map());
    out.push(oracles(&euler));
    out.push(dual_map());
    out.sort_by_key(|o| o.id);

    // written to the process stdout directly so the lines survive capture
    let mut stdout = std::io::stdout().lock();
    for o in &out {
        writeln!(stdout, "criterion {:>2}: {} ({})", o.id, if o.ok { "PASS" } else { "FAIL" }, o.detail).unwrap();
    }
    drop(stdout);

    // The one-hair tadpole is not a hairy graph, yet its image, a source
    // doubly joined to a target, is a nonzero cycle of the oriented complex
    // at the same loop order. That class is the only known failure.
    let known3: BTreeSet<(i64, usize, i64)> = [(0, 1, 0)].into_iter().collect();
    let known5: BTreeSet<(i64, i64)> = [(0, 0)].into_iter().collect();
    assert_eq!(failed3, known3);
    assert_eq!(failed5, known5);
    for o in &out {
        if o.id != 3 && o.id != 5 {
            assert!(o.ok, "criterion {} failed: {}", o.id, o.detail);
        }
    }
}
