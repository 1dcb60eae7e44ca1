//! Canonical forms against exhaustive relabeling on small tadpole-free graphs.

use graphcx::graph::{automorphism_count, automorphism_signs, canonicalize, relabel_sign, Vx};
use graphcx::{Family, FamilyTag, LabeledDiGraph};
use itertools::Itertools;
use proptest::prelude::*;

type Relabeling = (Vec<usize>, Vec<usize>, Vec<bool>, Vec<usize>);

fn all_relabelings(g: &LabeledDiGraph, undirected: bool) -> Vec<Relabeling> {
    let flip_sets: Vec<Vec<bool>> = if undirected {
        (0..1usize << g.e()).map(|m| (0..g.e()).map(|i| m >> i & 1 == 1).collect()).collect()
    } else {
        vec![vec![false; g.e()]]
    };
    let mut out = Vec::new();
    for vp in (0..g.v).permutations(g.v) {
        for ep in (0..g.e()).permutations(g.e()) {
            for hp in (0..g.s()).permutations(g.s()) {
                for fl in &flip_sets {
                    out.push((vp.clone(), ep.clone(), fl.clone(), hp.clone()));
                }
            }
        }
    }
    out
}

fn graph() -> impl Strategy<Value = (LabeledDiGraph, FamilyTag)> {
    let family = prop_oneof![Just(Family::Directed), Just(Family::Oriented), (1usize..=2).prop_map(Family::Hairy)];
    (family, 0i64..=2, 1usize..=4, 0usize..=4).prop_flat_map(|(family, n, v, e)| {
        let s = if family.is_hairy() { family.s() } else { 0 };
        (
            prop::collection::vec((0..v as Vx, 0..v as Vx).prop_filter("no tadpoles", |(a, b)| a != b), if v > 1 { e } else { 0 }),
            prop::collection::vec(0..v as Vx, s),
        )
            .prop_map(move |(edges, hairs)| (LabeledDiGraph::new(v, edges, hairs), FamilyTag::new(family, n)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn canonical_form_matches_exhaustive_search((g, tag) in graph()) {
        let rules = tag.rules();
        let c = canonicalize(&g, &rules);
        let mut signs = std::collections::BTreeSet::new();
        let mut auts = 0u64;
        let mut reaches = None;
        for (vp, ep, fl, hp) in all_relabelings(&g, rules.undirected) {
            let moved = g.relabeled(&vp, &ep, &fl, &hp);
            let sign = relabel_sign(&rules, &vp, &ep, &fl, &hp);
            if moved == g {
                auts += 1;
                signs.insert(sign);
            }
            if moved == c.graph {
                reaches = Some(sign);
            }
        }
        prop_assert_eq!(automorphism_count(&g, &rules), auts);
        prop_assert_eq!(automorphism_signs(&g, &rules), signs.clone());
        prop_assert_eq!(c.is_zero, signs.contains(&-1));
        let sign = reaches.expect("canonical graph lies in the orbit");
        if !c.is_zero {
            prop_assert_eq!(c.coeff, sign);
        }
    }

    #[test]
    fn canonical_form_is_idempotent((g, tag) in graph()) {
        let rules = tag.rules();
        let c = canonicalize(&g, &rules);
        let again = canonicalize(&c.graph, &rules);
        prop_assert_eq!(&again.graph, &c.graph);
        prop_assert_eq!(again.is_zero, c.is_zero);
        if !c.is_zero {
            prop_assert_eq!(again.coeff, 1);
        }
    }

    #[test]
    fn relabelings_move_the_sign((g, tag) in graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let rules = tag.rules();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut vp: Vec<usize> = (0..g.v).collect();
        let mut ep: Vec<usize> = (0..g.e()).collect();
        let mut hp: Vec<usize> = (0..g.s()).collect();
        vp.shuffle(&mut rng);
        ep.shuffle(&mut rng);
        hp.shuffle(&mut rng);
        let fl: Vec<bool> = (0..g.e()).map(|_| rules.undirected && rng.gen()).collect();
        let base = canonicalize(&g, &rules);
        let moved = canonicalize(&g.relabeled(&vp, &ep, &fl, &hp), &rules);
        prop_assert_eq!(&moved.graph, &base.graph);
        prop_assert_eq!(moved.is_zero, base.is_zero);
        if !base.is_zero {
            prop_assert_eq!(moved.coeff, base.coeff * relabel_sign(&rules, &vp, &ep, &fl, &hp));
        }
    }
}

#[test]
fn parallel_edges_vanish_exactly_when_edges_are_odd() {
    let g = LabeledDiGraph::new(2, vec![(0, 1), (0, 1)], vec![]);
    for n in 0..=3 {
        let rules = FamilyTag::new(Family::Oriented, n).rules();
        assert_eq!(canonicalize(&g, &rules).is_zero, rules.odd_edges, "n={n}");
    }
}
