use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use diracshell::plane::{energy_identity_check, lambda_symbol};
use diracshell::sphere::{critical_lambda_roots, phi_lambda};
use diracshell::{phi, phi_symbol, KernelParams, Spinor};
use diracshell_bench::offsets;

fn kernels(c: &mut Criterion) {
    let p = KernelParams::new(1.0).unwrap();
    let xs = offsets(256);
    c.bench_function("phi x256", |b| {
        b.iter(|| {
            for x in &xs {
                black_box(phi(black_box(*x), p).unwrap());
            }
        })
    });
    c.bench_function("phi_symbol", |b| b.iter(|| phi_symbol(black_box([0.3, -1.2, 2.0]), p)));
    c.bench_function("lambda_symbol eigenvalues", |b| {
        b.iter(|| lambda_symbol(black_box([0.4, 0.9]), p).eigenvalues().unwrap())
    });
    let h = Spinor::from_real([1.0, -0.5, 0.25, 0.8]);
    c.bench_function("energy identity", |b| {
        b.iter(|| energy_identity_check(black_box([0.5, 0.5]), p, h).unwrap())
    });
    let (_, hi) = critical_lambda_roots(p);
    c.bench_function("phi_lambda", |b| b.iter(|| phi_lambda(black_box([0.3, 0.2, 0.4]), hi, p).unwrap()));
}

criterion_group!(benches, kernels);
criterion_main!(benches);
