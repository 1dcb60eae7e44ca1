use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphcx::complexes::{differential_d, ComplexSlice, SliceKey};
use graphcx::forest::phi_matrix;
use graphcx::{Exec, Family, FamilyTag, SliceStore};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    let keys = [
        SliceKey::new(FamilyTag::new(Family::Oriented, 1), 6, 8),
        SliceKey::new(FamilyTag::new(Family::Hairy(2), 1), 5, 7),
    ];
    for key in keys {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, key), &key, |b, &key| {
                b.iter(|| ComplexSlice::generate(key, exec).len())
            });
        }
    }
    group.finish();
}

fn differential(c: &mut Criterion) {
    let mut group = c.benchmark_group("differential");
    group.sample_size(10);
    let key = SliceKey::new(FamilyTag::new(Family::Oriented, 1), 7, 9);
    for (name, exec) in MODES {
        // slices are generated once; only the matrix assembly is timed
        let store = SliceStore::new(exec);
        let slice = store.get(key).unwrap();
        let _ = differential_d(&store, &slice).unwrap();
        group.bench_function(BenchmarkId::new(name, key), |b| b.iter(|| differential_d(&store, &slice).unwrap().matrix.nnz()));
    }
    group.finish();
}

fn forest_map(c: &mut Criterion) {
    let mut group = c.benchmark_group("forest_map");
    group.sample_size(10);
    let key = SliceKey::new(FamilyTag::new(Family::Hairy(2), 1), 4, 6);
    for (name, exec) in MODES {
        let store = SliceStore::new(exec);
        let slice = store.get(key).unwrap();
        let _ = phi_matrix(&store, &slice).unwrap();
        group.bench_function(BenchmarkId::new(name, key), |b| b.iter(|| phi_matrix(&store, &slice).unwrap().matrix.nnz()));
    }
    group.finish();
}

criterion_group!(benches, generation, differential, forest_map);
criterion_main!(benches);
