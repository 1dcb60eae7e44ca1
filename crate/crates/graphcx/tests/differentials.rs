//! d^2 = 0, d0^2 = 0, h^2 = 0 and dh + hd = 0 as matrix identities.

use std::sync::Arc;

use graphcx::complexes::{
    differential_d, differential_d0, differential_h, ComplexSlice, Differential, SliceKey, SliceStore,
};
use graphcx::matrix::SparseRationalMatrix;
use graphcx::{Family, FamilyTag};

/// Composite of `first` followed by the differential `next` applied to every
/// slice in `first`'s target, landing in the union of all targets.
fn compose(
    store: &SliceStore,
    first: &Differential,
    next: impl Fn(&SliceStore, &ComplexSlice) -> graphcx::Result<Differential>,
) -> (SparseRationalMatrix, Vec<Arc<ComplexSlice>>) {
    let seconds: Vec<Differential> = first.dst.iter().map(|s| next(store, s).unwrap()).collect();
    let mut targets: Vec<Arc<ComplexSlice>> = Vec::new();
    for d in &seconds {
        for t in &d.dst {
            if !targets.iter().any(|x| x.key == t.key) {
                targets.push(t.clone());
            }
        }
    }
    let mut offsets = vec![0];
    for t in &targets {
        offsets.push(offsets.last().unwrap() + t.len());
    }
    let rows = *offsets.last().unwrap();
    let mut total = SparseRationalMatrix::zeros(rows, first.matrix.cols);
    let mut row_off = 0;
    for (mid, d) in first.dst.iter().zip(&seconds) {
        let mid_rows: Vec<usize> = (row_off..row_off + mid.len()).collect();
        row_off += mid.len();
        // restrict first to this block of rows
        let block = SparseRationalMatrix::from_triplets(
            mid.len(),
            first.matrix.cols,
            first
                .matrix
                .entries()
                .iter()
                .filter(|e| mid_rows.contains(&e.0))
                .map(|&(r, c, x)| (r - mid_rows[0], c, x)),
        )
        .unwrap();
        // embed second into the union of targets
        let mut trip = Vec::new();
        let mut inner = 0;
        for t in &d.dst {
            let k = targets.iter().position(|x| x.key == t.key).unwrap();
            for &(r, c, x) in d.matrix.entries() {
                if r >= inner && r < inner + t.len() {
                    trip.push((r - inner + offsets[k], c, x));
                }
            }
            inner += t.len();
        }
        let second = SparseRationalMatrix::from_triplets(rows, mid.len(), trip).unwrap();
        total = total.add(&second.mul(&block).unwrap()).unwrap();
    }
    (total, targets)
}

#[test]
fn d_squares_to_zero_for_non_hairy_families() {
    let store = SliceStore::default();
    for n in 0..3 {
        for fam in [Family::Directed, Family::Oriented, Family::Sourced(1), Family::Sourced(2), Family::Sourced(3)] {
            for v in 2..=6usize {
                for e in v..=8usize {
                    let src = store.get(SliceKey::new(FamilyTag::new(fam, n), v, e)).unwrap();
                    let d = differential_d(&store, &src).unwrap();
                    let (dd, _) = compose(&store, &d, differential_d);
                    assert!(dd.is_zero(), "{}", src.key);
                }
            }
        }
    }
}

#[test]
fn d0_squares_to_zero() {
    let store = SliceStore::default();
    for n in 0..3 {
        for s in 1..=3 {
            for v in 2..=6usize {
                for e in v..=8usize {
                    let keys = [
                        SliceKey::new(FamilyTag::new(Family::Sourced(s), n), v, e),
                        SliceKey::with_sources(FamilyTag::new(Family::Oriented, n), v, e, s),
                    ];
                    for key in keys {
                        let src = store.get(key).unwrap();
                        let d = differential_d0(&store, &src).unwrap();
                        let (dd, _) = compose(&store, &d, differential_d0);
                        assert!(dd.is_zero(), "{key}");
                    }
                }
            }
        }
    }
}

#[test]
fn hairy_differentials_square_and_anticommute() {
    let store = SliceStore::default();
    for n in 0..3 {
        for s in 1..=3 {
            for v in 1..=6usize {
                for e in v.saturating_sub(1)..=8usize {
                    let src = store.get(SliceKey::new(FamilyTag::new(Family::Hairy(s), n), v, e)).unwrap();
                    let d = differential_d(&store, &src).unwrap();
                    let (dd, _) = compose(&store, &d, differential_d);
                    assert!(dd.is_zero(), "d^2 on {}", src.key);
                    let h = differential_h(&store, &src).unwrap();
                    let (hh, _) = compose(&store, &h, differential_h);
                    assert!(hh.is_zero(), "h^2 on {}", src.key);
                    let (dh, t1) = compose(&store, &h, differential_d);
                    let (hd, t2) = compose(&store, &d, differential_h);
                    assert_eq!(t1.len(), t2.len());
                    if t1.is_empty() {
                        continue;
                    }
                    assert_eq!(t1[0].key, t2[0].key);
                    assert!(dh.add(&hd).unwrap().is_zero(), "dh + hd on {}", src.key);
                }
            }
        }
    }
}
