use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use torsion_atlas::toralclass::steinberg_flats;
use torsion_atlas::weylact::{brute_force_classify, classify_subspaces_incremental, ModMatrixGroup};
use torsion_atlas::{build_root_datum, classify_toral_with, IsogenyKind, LieType, ToralOptions};

fn weyl(s: &str, p: u8) -> ModMatrixGroup {
    let rd = build_root_datum(s.parse::<LieType>().unwrap(), IsogenyKind::SimplyConnected).unwrap();
    ModMatrixGroup::weyl(&rd, p)
}

fn group_order(c: &mut Criterion) {
    let rd = build_root_datum("E8".parse().unwrap(), IsogenyKind::SimplyConnected).unwrap();
    c.bench_function("weyl E8 chain", |b| b.iter(|| ModMatrixGroup::weyl(black_box(&rd), 2).order()));
}

fn subspaces(c: &mut Criterion) {
    let mut g = c.benchmark_group("subspaces");
    for (s, p) in [("F4", 2u8), ("F4", 3), ("E6", 2), ("E7", 2)] {
        let w = weyl(s, p);
        g.bench_with_input(BenchmarkId::new("incremental", format!("{} p={}", s, p)), &w, |b, w| {
            b.iter(|| classify_subspaces_incremental(w, p).unwrap())
        });
    }
    let w = weyl("F4", 3);
    g.bench_function("brute force F4 p=3", |b| b.iter(|| brute_force_classify(&w, 3, 1 << 20).unwrap()));
    g.finish();
}

fn toral(c: &mut Criterion) {
    let mut g = c.benchmark_group("toral");
    g.sample_size(10);
    for (s, p) in [("E6", 3u8), ("E8", 2)] {
        let rd = build_root_datum(s.parse().unwrap(), IsogenyKind::Adjoint).unwrap();
        g.bench_function(format!("{} p={}", s, p), |b| {
            b.iter(|| classify_toral_with(&rd, p, ToralOptions::default()).unwrap())
        });
    }
    let rd = build_root_datum("E7".parse().unwrap(), IsogenyKind::SimplyConnected).unwrap();
    g.bench_function("steinberg flats E7 p=5", |b| b.iter(|| steinberg_flats(&rd, 5).unwrap()));
    g.finish();
}

criterion_group!(benches, group_order, subspaces, toral);
criterion_main!(benches);
