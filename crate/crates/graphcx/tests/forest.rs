//! Forest enumeration against subset oracles, the counting bijections behind
//! the chain map identity, and properties of the forest map itself.

mod common;

use std::collections::BTreeSet;

use common::{components, oracle_cycled, oracle_double_hair, oracle_spanning};
use graphcx::complexes::{apply_linear, SliceKey, SliceStore};
use graphcx::forest::*;
use graphcx::graph::{automorphism_count, canonicalize, relabel_sign};
use graphcx::verify::{check_g_duality, check_lemma_identities, check_phi_chain_map, Bounds};
use graphcx::{Combo, Family, FamilyTag, LabeledDiGraph};
use proptest::prelude::*;

fn hairy_graphs(store: &SliceStore, emax: usize, smax: usize) -> Vec<LabeledDiGraph> {
    let mut out = BTreeSet::new();
    for n in 0..=1 {
        for s in 1..=smax {
            for v in 1..=emax + 1 {
                for e in v - 1..=emax {
                    let key = SliceKey::new(FamilyTag::new(Family::Hairy(s), n), v, e);
                    out.extend(store.get(key).unwrap().basis.iter().cloned());
                }
            }
        }
    }
    out.into_iter().collect()
}

#[test]
fn enumerations_match_subset_oracles() {
    let store = SliceStore::default();
    let graphs = hairy_graphs(&store, 10, 3);
    assert!(graphs.len() > 1000);
    for g in &graphs {
        let spanning: BTreeSet<Vec<usize>> = spanning_forests(g).into_iter().collect();
        assert_eq!(spanning, oracle_spanning(g), "{g}");
        let double: BTreeSet<Vec<usize>> = double_hair_forests(g).into_iter().map(|f| f.edges).collect();
        assert_eq!(double, oracle_double_hair(g), "{g}");
        let cycled: BTreeSet<Vec<usize>> = cycled_forests(g).into_iter().map(|f| f.edges).collect();
        assert_eq!(cycled, oracle_cycled(g), "{g}");
    }
}

/// Non-forest edges of `tau`, split into those closing a cycle and those
/// joining two components.
fn outside_edges(g: &LabeledDiGraph, tau: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (label, _, _) = components(g, tau);
    (0..g.e()).filter(|i| !tau.contains(i)).partition(|&i| label[g.edges[i].0 as usize] == label[g.edges[i].1 as usize])
}

#[test]
fn cycle_and_path_bijections() {
    let store = SliceStore::default();
    for g in hairy_graphs(&store, 8, 3) {
        let mut closing = BTreeSet::new();
        let mut joining = BTreeSet::new();
        for tau in spanning_forests(&g) {
            let (c, j) = outside_edges(&g, &tau);
            for a in c {
                let mut rho = tau.clone();
                rho.push(a);
                rho.sort_unstable();
                assert!(closing.insert((rho, a)));
            }
            for a in j {
                let mut lambda = tau.clone();
                lambda.push(a);
                lambda.sort_unstable();
                assert!(joining.insert((lambda, a)));
            }
        }
        let from_cycled: BTreeSet<(Vec<usize>, usize)> =
            cycled_forests(&g).into_iter().flat_map(|r| r.cycle.iter().map(|&a| (r.edges.clone(), a)).collect::<Vec<_>>()).collect();
        assert_eq!(closing, from_cycled, "{g}");
        let from_double: BTreeSet<(Vec<usize>, usize)> =
            double_hair_forests(&g).into_iter().flat_map(|l| l.path.iter().map(|&a| (l.edges.clone(), a)).collect::<Vec<_>>()).collect();
        assert_eq!(joining, from_double, "{g}");
    }
}

#[test]
fn hair_deletion_bijection() {
    let store = SliceStore::default();
    for g in hairy_graphs(&store, 8, 3) {
        let mut pairs = 0;
        for i in 0..g.s() {
            let mut h = g.clone();
            h.hairs.remove(i);
            pairs += spanning_forests(&h).len();
        }
        assert_eq!(pairs, 2 * double_hair_forests(&g).len(), "{g}");
    }
}

#[test]
fn lemma_identities_hold() {
    let store = SliceStore::default();
    for n in 0..=1 {
        let rep = check_lemma_identities(&store, n, &Bounds { vmax: 4, emax: 6, smax: 3 }).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.checked > 0);
    }
}

#[test]
fn phi_is_a_chain_map_on_small_slices() {
    let store = SliceStore::default();
    for n in 0..=1 {
        let rep = check_phi_chain_map(&store, n, &Bounds { vmax: 4, emax: 6, smax: 3 }).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}

#[test]
fn dual_map_matches_threshold_and_transpose() {
    let store = SliceStore::default();
    for n in 0..=1 {
        let rep = check_g_duality(&store, n, 5, 3, 2).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}

#[test]
fn tree_with_one_source_pairs_with_its_skeleton() {
    // s -> a, s -> b: no bivalent targets, threshold e - v + s = 0
    let g = LabeledDiGraph::new(3, vec![(0, 1), (0, 2)], vec![]);
    let hs = hairy_skeleton(&g);
    assert_eq!((hs.v, hs.e(), hs.s()), (3, 2, 1));
    assert!(ede_targets(&g).is_empty());
    assert!(is_forest_image(&g, &FamilyTag::new(Family::Hairy(1), 0)));
}

#[test]
fn kappa_round_trip() {
    let store = SliceStore::default();
    for n in 1..=2 {
        let tag = FamilyTag::new(Family::Oriented, n);
        for v in 1..=6 {
            for e in v - 1..=v + 2 {
                for g in &store.get(SliceKey::new(tag, v, e)).unwrap().basis {
                    if let Ok(sk) = kappa(g) {
                        assert_eq!(sk.crossed(), ede_targets(g).len());
                        let back = canonicalize(&kappa_expand(&sk), &tag.rules());
                        assert_eq!(back.graph, *g);
                    }
                }
            }
        }
    }
}

/// The graph of the worked example: eleven vertices, eighteen edges, three
/// hairs, labeled so that edges 1..=8 form a spanning forest whose edges
/// carry the label of their head.
fn worked_example() -> (LabeledDiGraph, Vec<(u8, u8)>) {
    let edges: Vec<(u8, u8)> = [
        (10, 1), (1, 2), (5, 3), (6, 4), (7, 5), (9, 6), (11, 7), (7, 8), (2, 3),
        (3, 4), (4, 1), (5, 6), (6, 10), (10, 11), (2, 11), (11, 8), (8, 5), (10, 9),
    ]
    .iter()
    .map(|&(a, b)| (a - 1, b - 1))
    .collect();
    (LabeledDiGraph::new(11, edges.clone(), vec![8, 9, 10]), edges)
}

#[test]
fn worked_example_forest_term() {
    let (g, edges) = worked_example();
    let tau: Vec<usize> = (0..8).collect();
    assert!(is_spanning_forest(&g, &tau));
    // forest edges as drawn, every other edge replaced by a bivalent target
    let mut expanded: Vec<(u8, u8)> = edges[..8].to_vec();
    for (i, &(x, y)) in edges[8..].iter().enumerate() {
        expanded.push((x, 11 + i as u8));
        expanded.push((y, 11 + i as u8));
    }
    for n in 0..=1 {
        let tag = FamilyTag::new(Family::Hairy(3), n);
        let expected = canonicalize(&LabeledDiGraph::new(21, expanded.clone(), vec![]), &target_tag(&tag).rules());
        let term = phi_tau(&g, &tau, &tag).unwrap();
        assert!(!term.is_zero);
        assert_eq!(term.graph, expected.graph);
        assert_eq!(term.coeff.abs(), 1);
        // the automorphism exchanging the two right-hand vertices sends the
        // forest to a second one with the same image
        assert_eq!(automorphism_count(&g, &tag.rules()), 2);
        let full = phi(&g, &tag).unwrap();
        assert_eq!(full.get(&term.graph).copied(), Some(2 * term.coeff));
        assert_eq!(spanning_forests(&g).len(), 2704);
    }
}

fn random_relabeling(g: &LabeledDiGraph, seed: u64, undirected: bool) -> (Vec<usize>, Vec<usize>, Vec<bool>, Vec<usize>) {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut vperm: Vec<usize> = (0..g.v).collect();
    let mut eperm: Vec<usize> = (0..g.e()).collect();
    let mut hperm: Vec<usize> = (0..g.s()).collect();
    vperm.shuffle(&mut rng);
    eperm.shuffle(&mut rng);
    hperm.shuffle(&mut rng);
    let flips = (0..g.e()).map(|_| undirected && rng.gen()).collect();
    (vperm, eperm, flips, hperm)
}

fn scaled(c: &Combo, k: i64) -> Combo {
    c.iter().map(|(g, &x)| (g.clone(), k * x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phi_respects_relabelings(seed in any::<u64>(), pick in any::<prop::sample::Index>(), n in 0i64..=1, s in 1usize..=3) {
        let store = SliceStore::default();
        let tag = FamilyTag::new(Family::Hairy(s), n);
        let mut pool = Vec::new();
        for v in 1..=4 {
            for e in v - 1..=v + 2 {
                pool.extend(store.get(SliceKey::new(tag, v, e)).unwrap().basis.iter().cloned());
            }
        }
        prop_assume!(!pool.is_empty());
        let g = pick.get(&pool).clone();
        let rules = tag.rules();
        let (vp, ep, fl, hp) = random_relabeling(&g, seed, rules.undirected);
        let moved = g.relabeled(&vp, &ep, &fl, &hp);
        let sign = relabel_sign(&rules, &vp, &ep, &fl, &hp);
        prop_assert_eq!(phi(&moved, &tag).unwrap(), scaled(&phi(&g, &tag).unwrap(), sign));
    }

    #[test]
    fn phi_terms_have_the_right_shape(pick in any::<prop::sample::Index>(), n in 0i64..=1, s in 1usize..=3) {
        let store = SliceStore::default();
        let tag = FamilyTag::new(Family::Hairy(s), n);
        let mut pool = Vec::new();
        for v in 1..=4 {
            for e in v - 1..=v + 2 {
                pool.extend(store.get(SliceKey::new(tag, v, e)).unwrap().basis.iter().cloned());
            }
        }
        prop_assume!(!pool.is_empty());
        let g = pick.get(&pool);
        let key = phi_target_key(&SliceKey::new(tag, g.v, g.e())).unwrap();
        for h in phi(g, &tag).unwrap().keys() {
            prop_assert_eq!((h.v, h.e(), h.count_sources()), (key.v, key.e, s));
            prop_assert!(h.is_acyclic());
        }
        // phi is linear
        let unit: Combo = [(g.clone(), 3)].into_iter().collect();
        prop_assert_eq!(apply_linear(&unit, |x| phi(x, &tag)).unwrap(), scaled(&phi(g, &tag).unwrap(), 3));
    }
}
