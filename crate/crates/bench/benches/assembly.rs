use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use diracshell::field::{field_check, FieldOptions};
use diracshell::{
    assemble_cauchy, assemble_k, clifford_identity_residual, make_sphere, DiscreteDensity, KernelParams, Spinor,
    ZeroModeScanner,
};
use diracshell_bench::unit_sphere;

fn assembly(c: &mut Criterion) {
    let p = KernelParams::new(1.0).unwrap();
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    for level in [1, 2] {
        let mesh = make_sphere(level, 1.0).unwrap();
        g.bench_function(format!("cauchy sphere:{level}"), |b| b.iter(|| assemble_cauchy(black_box(&mesh), p).unwrap()));
    }
    let (mesh, cop, n) = unit_sphere(1, 1.0);
    g.bench_function("K sphere:1", |b| b.iter(|| assemble_k(&cop, &n).unwrap()));
    g.bench_function("clifford residual sphere:1", |b| b.iter(|| clifford_identity_residual(&cop, &n).unwrap()));
    g.bench_function("scanner sphere:1", |b| b.iter(|| ZeroModeScanner::new(&cop).unwrap()));
    let dens = DiscreteDensity::constant(&mesh, Spinor::from_real([1.0, 0.0, 0.0, 0.0]));
    g.bench_function("field check sphere:1", |b| {
        b.iter(|| field_check(&mesh, &cop, &n, &dens, p, &[1.0, 0.5, 0.25], 4, &FieldOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
