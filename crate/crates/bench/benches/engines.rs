use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sympack_core::ech::{ech_concave_prefix, ech_convex_prefix};
use sympack_core::exceptional::enumerate_exceptional;
use sympack_core::highdim::{scan_obstructions, HigherDimProblem};
use sympack_core::packing::packing_capacity;
use sympack_core::scalar::{int, ratio};
use sympack_core::staircase::ms_value;
use sympack_core::{BallConfig, ConcaveDomain, ConvexDomain, Engine};

fn packing(c: &mut Criterion) {
    let mut g = c.benchmark_group("packing_capacity");
    let eight = BallConfig::equal(8);
    for engine in [
        Engine::FullTuples,
        Engine::ExceptionalOnly,
        Engine::Combined,
    ] {
        g.bench_with_input(
            BenchmarkId::new("eight_equal", engine.name()),
            &engine,
            |b, &e| b.iter(|| packing_capacity(black_box(&eight), 30, e).unwrap()),
        );
    }
    let mixed = BallConfig::parse("2,3/2,1,1,3/4,1/2").unwrap();
    g.bench_function("mixed_six", |b| {
        b.iter(|| packing_capacity(black_box(&mixed), 30, Engine::Combined).unwrap())
    });
    g.finish();
}

fn staircase(c: &mut Criterion) {
    let x = ratio(25, 4);
    c.bench_function("ms_value_25_4", |b| {
        b.iter(|| ms_value(black_box(&x), 40).unwrap())
    });
}

fn ech(c: &mut Criterion) {
    let mut g = c.benchmark_group("ech");
    let square = ConvexDomain::polydisk(int(1), int(1)).unwrap();
    let tri = ConcaveDomain::triangle(int(2), int(3)).unwrap();
    g.bench_function("convex_square_k200", |b| {
        b.iter(|| ech_convex_prefix(black_box(&square), 200, None).unwrap())
    });
    g.bench_function("concave_e23_k200", |b| {
        b.iter(|| ech_concave_prefix(black_box(&tri), 200).unwrap())
    });
    g.finish();
}

fn exceptional(c: &mut Criterion) {
    c.bench_function("enumerate_exceptional_d8", |b| {
        b.iter(|| enumerate_exceptional(black_box(8), 24).unwrap())
    });
}

fn highdim(c: &mut Criterion) {
    let p = HigherDimProblem::new(3, BallConfig::parse("1,1,1/2,1/2").unwrap(), int(2)).unwrap();
    c.bench_function("scan_n3_d30", |b| {
        b.iter(|| scan_obstructions(3, black_box(&p), 30))
    });
}

criterion_group!(benches, packing, staircase, ech, exceptional, highdim);
criterion_main!(benches);
