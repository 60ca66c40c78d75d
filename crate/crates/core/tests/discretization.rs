//! Refinement trends and cross-checks between the discrete operators and the
//! analytic benchmarks.

use diracshell::boundary::{cauchy_self_term, clifford_products};
use diracshell::plane::lambda_symbol;
use diracshell::spectra::{scan_with, ScanOptions, ZeroModeScanner};
use diracshell::sphere::{critical_lambda_roots, sample_shell_density};
use diracshell::*;

fn unit_sphere(level: u32) -> (SurfaceMesh, BoundaryOperator, BoundaryOperator) {
    let mesh = make_sphere(level, 1.0).unwrap();
    let p = KernelParams::new(1.0).unwrap();
    let c = assemble_cauchy(&mesh, p).unwrap();
    let m = assemble_normal_mult(&mesh).unwrap();
    (mesh, c, m)
}

#[test]
fn w_symmetry_is_at_roundoff() {
    for level in 0..=2 {
        let (_, c, _) = unit_sphere(level);
        assert!(c.w_symmetry_residual() < 1e-14, "level {level}: {:e}", c.w_symmetry_residual());
    }
}

#[test]
fn normal_multiplication_and_jump() {
    let (_, c, m) = unit_sphere(1);
    let m2 = m.compose(&m).unwrap();
    let id = m.identity_like();
    assert!((&m2.matrix - &id.matrix).norm_max() < 1e-15);
    let (plus, minus) = jump_operators(&c, &m).unwrap();
    let jump = plus.combine(Complex64::new(1.0, 0.0), &minus, Complex64::new(-1.0, 0.0)).unwrap();
    let expect = m.shifted(Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0));
    assert_eq!((&jump.matrix - &expect.matrix).norm_max(), 0.0);
}

#[test]
fn flat_patch_anticommutator_vanishes() {
    let patch = make_flat_patch(1.5, 6).unwrap();
    let p = KernelParams::new(1.0).unwrap();
    let c = assemble_cauchy(&patch, p).unwrap();
    let m = assemble_normal_mult(&patch).unwrap();
    assert!(assemble_anticommutator(&c, &m).unwrap().max_abs() <= 1e-13);
    assert!(assemble_anticommutator_direct(&patch, p).unwrap().max_abs() <= 1e-13);
    assert!(assemble_k(&c, &m).unwrap().max_abs() <= 1e-13);
}

#[test]
fn factorization_identity_is_exact() {
    let (_, c, m) = unit_sphere(1);
    for lambda in [0.5, 2.0, -3.0] {
        assert!(factorization_residual(&c, &m, lambda).unwrap() <= 1e-10);
    }
}

#[test]
fn clifford_products_consistent() {
    let (_, c, m) = unit_sphere(1);
    let prod = clifford_products(&c, &m).unwrap();
    assert!((prod.residual - clifford_identity_residual(&c, &m).unwrap()).abs() < 1e-15);
    assert!(prod.residual.is_finite() && prod.residual > 0.0);
}

#[test]
fn shell_density_residual_decreases() {
    let p = KernelParams::new(1.0).unwrap();
    let (_, lambda) = critical_lambda_roots(p);
    let mut last = f64::INFINITY;
    for level in [1, 2] {
        let (mesh, c, _) = unit_sphere(level);
        let g = sample_shell_density(&mesh, lambda, p);
        let r = c.apply(&g).unwrap().scale(Complex64::new(lambda, 0.0)).add(&g);
        let rel = r.norm_sigma(&c.weights) / g.norm_sigma(&c.weights);
        assert!(rel < last, "level {level}: {rel}");
        last = rel;
    }
}

#[test]
fn scan_brackets_sphere_roots_at_level_two() {
    let (_, c, _) = unit_sphere(2);
    let scanner = ZeroModeScanner::new(&c).unwrap();
    let rep = scan_with(&scanner, (1.0, 3.0), ScanOptions { steps: 201, ..Default::default() }).unwrap();
    let p = KernelParams::new(1.0).unwrap();
    let (lo, hi) = critical_lambda_roots(p);
    for target in [hi, -lo] {
        let best = rep
            .results
            .iter()
            .map(|r| (r.lambda_star - target).abs() / target)
            .fold(f64::INFINITY, f64::min);
        assert!(best < 0.1, "{target}: {best}");
    }
}

/// `-(1/2 + C)` applied to a sampled plane wave, compared with the symbol
/// action and averaged over the two triangles of the cell at the origin.
/// The two centroids see point-reflected lattices, so the odd part of the
/// one-point-rule error cancels in the average and only the consistent
/// error is left.
fn plane_wave_defect(half_width: f64, n: usize, xi: [f64; 2]) -> f64 {
    let patch = make_flat_patch(half_width, n).unwrap();
    let p = KernelParams::new(1.0).unwrap();
    let v = Spinor::from_real([0.3, -0.5, 0.8, 0.1]);
    let wave = |x: [f64; 3]| {
        let ph = 2.0 * std::f64::consts::PI * (xi[0] * x[0] + xi[1] * x[1]);
        Complex64::new(ph.cos(), ph.sin())
    };
    let mut order: Vec<usize> = (0..patch.len()).collect();
    let r2 = |k: usize| patch.panels[k].centroid.iter().map(|c| c * c).sum::<f64>();
    order.sort_by(|&a, &b| r2(a).total_cmp(&r2(b)));
    let mut defect = Spinor::zero();
    for &i in &order[..2] {
        let x = patch.panels[i].centroid;
        let mut cg = cauchy_self_term(patch.panels[i].area, 1.0).apply(&v).scale(wave(x));
        for (j, pj) in patch.panels.iter().enumerate() {
            if j != i {
                let d = [x[0] - pj.centroid[0], x[1] - pj.centroid[1], x[2] - pj.centroid[2]];
                cg = cg + phi(d, p).unwrap().apply(&v).scale(wave(pj.centroid) * pj.area);
            }
        }
        let discrete = -(v.scale(wave(x)).scale_real(0.5) + cg);
        let exact = lambda_symbol(xi, p).value.apply(&v).scale(wave(x));
        defect = defect + (discrete - exact).scale_real(0.5);
    }
    defect.norm() / v.norm()
}

#[test]
fn flat_patch_approaches_plane_symbol() {
    let xi = [0.15, 0.1];
    let errors: Vec<f64> = [(2.0, 8), (4.0, 24), (6.0, 48)]
        .into_iter()
        .map(|(w, n)| plane_wave_defect(w, n, xi))
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
}
