use approx::assert_abs_diff_eq;
use diracshell::plane::{energy_identity_check, lambda_symbol, s_symbol, symbol_modulus};
use diracshell::spectra::{a_from_coupling, coupling_from_a};
use diracshell::sphere::{critical_lambda_roots, quadratic_residual};
use diracshell::{alpha_dot, alphas, beta, phi, phi_symbol, Complex64, KernelParams, Spinor, SpinorMatrix};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = [f64; 3]> {
    [-r..r, -r..r, -r..r]
}

fn mass() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), 0.05f64..10.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn alpha_dot_squares_to_norm(v in vec3(50.0)) {
        let a = alpha_dot(v);
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let d = (a * a - SpinorMatrix::identity().scale_real(n2)).max_abs();
        prop_assert!(d <= 1e-14 * n2.max(1.0), "{d}");
    }

    #[test]
    fn clifford_relations_with_beta(v in vec3(10.0)) {
        let a = alpha_dot(v);
        prop_assert!(a.anticommutator(&beta()).max_abs() <= 1e-15 * 10.0);
        prop_assert!(a.anti_hermitian_part_max() == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kernel_is_adjoint_symmetric(x in vec3(3.0), y in vec3(3.0), m in mass()) {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        prop_assume!(d.iter().map(|c| c * c).sum::<f64>() > 1e-6);
        let p = KernelParams::new(m).unwrap();
        let a = phi(d, p).unwrap();
        let b = phi([-d[0], -d[1], -d[2]], p).unwrap();
        let scale = a.max_abs().max(1.0);
        prop_assert!((a - b.adjoint()).max_abs() <= 1e-14 * scale);
    }

    #[test]
    fn kernel_symbol_inverts_dirac_symbol(xi in vec3(57.0), m in mass()) {
        prop_assume!(xi.iter().map(|c| c * c).sum::<f64>() <= 1e4);
        let p = KernelParams::new(m).unwrap();
        let s = alpha_dot(xi.map(|c| 2.0 * std::f64::consts::PI * c)) + beta().scale_real(m);
        let d = (s * phi_symbol(xi, p) - SpinorMatrix::identity()).max_abs();
        prop_assert!(d <= 1e-13, "{d}");
    }

    #[test]
    fn lambda_symbol_spectrum(x in -20.0f64..20.0, y in -20.0f64..20.0, m in mass()) {
        let p = KernelParams::new(m).unwrap();
        let ev = lambda_symbol([x, y], p).eigenvalues().unwrap();
        for (e, t) in ev.iter().zip([-1.0, -1.0, 0.0, 0.0]) {
            prop_assert!((e - t).abs() <= 1e-12, "{ev:?}");
        }
        let (s, _, _) = s_symbol([x, y], p);
        let s2 = symbol_modulus([x, y], m).powi(2);
        prop_assert!((s.value * s.value - SpinorMatrix::identity().scale_real(s2)).max_abs() <= 1e-12 * s2.max(1.0));
    }

    #[test]
    fn coupling_formula_inverts(a in -0.2499f64..100.0) {
        let l = coupling_from_a(a).unwrap();
        prop_assert!((a_from_coupling(l) - a).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn sphere_roots_solve_quadratic(m in 0.1f64..10.0) {
        let p = KernelParams::new(m).unwrap();
        let (lo, hi) = critical_lambda_roots(p);
        prop_assert!(lo < 0.0 && hi > 0.0);
        prop_assert!(quadratic_residual(p, lo) <= 1e-12);
        prop_assert!(quadratic_residual(p, hi) <= 1e-12);
        prop_assert!((lo * hi + 4.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn plane_energy_identity(re in [-1.0f64..1.0, -1.0..1.0, -1.0..1.0, -1.0..1.0],
                             im in [-1.0f64..1.0, -1.0..1.0, -1.0..1.0, -1.0..1.0],
                             xi in [-2.0f64..2.0, -2.0..2.0], m in 0.2f64..5.0) {
        let h = Spinor::new(std::array::from_fn(|k| Complex64::new(re[k], im[k])));
        let p = KernelParams::new(m).unwrap();
        if let Ok(e) = energy_identity_check(xi, p, h) {
            prop_assert!(e.relative_gap() <= 1e-8, "{e:?}");
            prop_assert!(e.leakage <= 1e-12 * h.norm());
        }
    }
}

#[test]
fn alpha_anticommutation_exact() {
    let a = alphas();
    for j in 0..3 {
        for k in 0..3 {
            let d = if j == k { SpinorMatrix::identity().scale_real(2.0) } else { SpinorMatrix::zero() };
            assert_eq!((a[j].anticommutator(&a[k]) - d).max_abs(), 0.0);
        }
        assert_eq!(a[j].anticommutator(&beta()).max_abs(), 0.0);
    }
    assert_abs_diff_eq!((beta() * beta() - SpinorMatrix::identity()).max_abs(), 0.0);
}
