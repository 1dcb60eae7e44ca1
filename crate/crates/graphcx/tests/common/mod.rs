//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use graphcx::graph::{canonicalize, is_admissible, Vx};
use graphcx::{FamilyTag, LabeledDiGraph};
use itertools::Itertools;

/// Every admissible labeled graph of the slice, canonicalized, keeping the
/// classes that survive their symmetries.
pub fn brute_force_basis(tag: &FamilyTag, v: usize, e: usize, sources: Option<usize>) -> BTreeSet<LabeledDiGraph> {
    let rules = tag.rules();
    let pairs: Vec<(Vx, Vx)> = if tag.family.is_hairy() {
        (0..v).tuple_combinations().map(|(a, b)| (a as Vx, b as Vx)).collect()
    } else {
        (0..v).cartesian_product(0..v).filter(|(a, b)| a != b).map(|(a, b)| (a as Vx, b as Vx)).collect()
    };
    let s = if tag.family.is_hairy() { tag.family.s() } else { 0 };
    let mut out = BTreeSet::new();
    for edges in pairs.iter().copied().combinations_with_replacement(e) {
        for hairs in (0..v as Vx).combinations_with_replacement(s) {
            let g = LabeledDiGraph::new(v, edges.clone(), hairs);
            if !is_admissible(&g, tag) {
                continue;
            }
            if sources.is_some_and(|k| g.count_sources() != k) {
                continue;
            }
            let t = canonicalize(&g, &rules);
            if !t.is_zero {
                out.insert(t.graph);
            }
        }
    }
    out
}

/// Components of the spanning subgraph on `edges`: a label per vertex, the
/// hair count per label, and the number of independent cycles.
pub fn components(g: &LabeledDiGraph, edges: &[usize]) -> (Vec<usize>, Vec<usize>, usize) {
    let mut label: Vec<usize> = (0..g.v).collect();
    let mut cycles = 0;
    for &i in edges {
        let (a, b) = (label[g.edges[i].0 as usize], label[g.edges[i].1 as usize]);
        if a == b {
            cycles += 1;
        } else {
            for x in label.iter_mut() {
                if *x == a {
                    *x = b;
                }
            }
        }
    }
    let mut hairs = vec![0; g.v];
    for &h in &g.hairs {
        hairs[label[h as usize]] += 1;
    }
    (label, hairs, cycles)
}

fn roots(label: &[usize]) -> Vec<usize> {
    label.iter().copied().sorted().dedup().collect()
}

fn subsets(g: &LabeledDiGraph, size: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..g.e()).combinations(size)
}

pub fn oracle_spanning(g: &LabeledDiGraph) -> BTreeSet<Vec<usize>> {
    if g.s() == 0 || g.s() > g.v {
        return BTreeSet::new();
    }
    subsets(g, g.v - g.s())
        .filter(|t| {
            let (label, hairs, cycles) = components(g, t);
            cycles == 0 && roots(&label).iter().all(|&r| hairs[r] == 1)
        })
        .collect()
}

pub fn oracle_double_hair(g: &LabeledDiGraph) -> BTreeSet<Vec<usize>> {
    if g.s() < 2 || g.s() > g.v + 1 {
        return BTreeSet::new();
    }
    subsets(g, g.v - g.s() + 1)
        .filter(|t| {
            let (label, hairs, cycles) = components(g, t);
            let counts: Vec<usize> = roots(&label).iter().map(|&r| hairs[r]).sorted().collect();
            cycles == 0 && counts.iter().filter(|&&c| c == 2).count() == 1 && counts.iter().all(|&c| c == 1 || c == 2)
        })
        .collect()
}

pub fn oracle_cycled(g: &LabeledDiGraph) -> BTreeSet<Vec<usize>> {
    if g.s() == 0 || g.s() > g.v || g.v - g.s() + 1 > g.e() {
        return BTreeSet::new();
    }
    subsets(g, g.v - g.s() + 1)
        .filter(|t| {
            let (label, hairs, cycles) = components(g, t);
            cycles == 1 && roots(&label).iter().all(|&r| hairs[r] == 1)
        })
        .collect()
}
