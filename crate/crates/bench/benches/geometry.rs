use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperconf::conformal::{curvature, hyp_change, random_init, yamabe_solve, FactorField, SolverOptions};
use hyperconf::hyp::{hyp_distance, in_circumdisk, DiskPoint, MobiusMap};
use hyperconf::mesh::{check_embedding, gen_regular_patch, induced_lengths, is_delaunay};
use hyperconf::verifier::{run_suite, SampleConfig, Suite};

fn primitives(c: &mut Criterion) {
    let p = DiskPoint::new(0.31, -0.22).unwrap();
    let q = DiskPoint::new(-0.47, 0.58).unwrap();
    let r = DiskPoint::new(0.12, 0.71).unwrap();
    let s = DiskPoint::new(0.05, 0.1).unwrap();
    let m = MobiusMap::new(DiskPoint::new(0.4, 0.3).unwrap(), 1.1);
    c.bench_function("hyp_distance", |b| b.iter(|| hyp_distance(black_box(p), black_box(q))));
    c.bench_function("mobius_apply", |b| b.iter(|| m.apply(black_box(p))));
    c.bench_function("in_circumdisk", |b| {
        b.iter(|| in_circumdisk(black_box(p), black_box(q), black_box(r), black_box(s)))
    });
}

fn mesh_checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("mesh");
    for rings in [2, 4, 8] {
        let (t, phi) = gen_regular_patch(rings, 0.02).unwrap();
        group.bench_with_input(BenchmarkId::new("is_delaunay", rings), &rings, |b, _| {
            b.iter(|| is_delaunay(&t, &phi).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("check_embedding", rings), &rings, |b, _| {
            b.iter(|| check_embedding(&t, &phi).unwrap())
        });
        let l = induced_lengths(&t, &phi).unwrap();
        let u = FactorField::constant(&t, 0.01);
        group.bench_with_input(BenchmarkId::new("change_and_curvature", rings), &rings, |b, _| {
            b.iter(|| curvature(&t, &hyp_change(&l, &u).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("yamabe_solve");
    group.sample_size(10);
    for rings in [2, 3, 4] {
        let (t, phi) = gen_regular_patch(rings, 0.02).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let pinned: BTreeMap<_, _> = t.boundary_vertices().map(|v| (v, 0.0)).collect();
        let init = random_init(&t, &pinned, 0.1, 1);
        group.bench_with_input(BenchmarkId::from_parameter(rings), &rings, |b, _| {
            b.iter(|| yamabe_solve(&t, &l, &pinned, &init, &SolverOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for suite in Suite::INDIVIDUAL {
        let cfg = SampleConfig::new(1_000, 7);
        group.bench_function(suite.name(), |b| b.iter(|| run_suite(suite, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, primitives, mesh_checks, solver, suites);
criterion_main!(benches);
