//! Shared fixtures for the benchmarks.

use diracshell::{assemble_cauchy, assemble_normal_mult, make_sphere, BoundaryOperator, KernelParams, SurfaceMesh};

/// Unit sphere at `level` with `C` and `alpha.N` assembled at mass `m`.
pub fn unit_sphere(level: u32, m: f64) -> (SurfaceMesh, BoundaryOperator, BoundaryOperator) {
    let mesh = make_sphere(level, 1.0).expect("sphere");
    let p = KernelParams::new(m).expect("mass");
    let c = assemble_cauchy(&mesh, p).expect("cauchy");
    let n = assemble_normal_mult(&mesh).expect("normal");
    (mesh, c, n)
}

/// Deterministic offsets away from the origin.
pub fn offsets(count: usize) -> Vec<[f64; 3]> {
    (0..count)
        .map(|k| {
            let t = k as f64 + 1.0;
            [0.3 * t.sin(), 0.7 * (1.3 * t).cos(), 0.1 + 0.05 * t.sqrt()]
        })
        .collect()
}
