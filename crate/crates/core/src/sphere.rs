//! Closed-form zero mode of the unit-sphere shell.
//!
//! The ball is the inner side, `N(x) = x/|x|`, and traces from inside carry
//! the `+` subscript.

use serde::Serialize;

use crate::algebra::{alpha_dot, Spinor};
use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::mesh::SurfaceMesh;
use crate::boundary::DiscreteDensity;
use crate::Complex64;

/// Coefficients `(a, b, c)` of `a lambda^2 + b lambda + c = 0`.
pub fn quadratic_coefficients(p: KernelParams) -> (f64, f64, f64) {
    let m = p.m();
    let b = 2.0 * ((2.0 * m * m + 2.0 * m + 1.0) * (-2.0 * m).exp() - 1.0);
    (m * m, b, -4.0 * m * m)
}

/// The two couplings for which the sphere carries a zero mode, ascending.
pub fn critical_lambda_roots(p: KernelParams) -> (f64, f64) {
    let (a, b, c) = quadratic_coefficients(p);
    let disc = (b * b - 4.0 * a * c).sqrt();
    // avoid cancellation in the smaller root
    let q = -0.5 * (b + b.signum() * disc);
    let (r1, r2) = (q / a, c / q);
    if r1 < r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// `|a l^2 + b l + c| / (a l^2 + |b l| + |c|)`.
pub fn quadratic_residual(p: KernelParams, lambda: f64) -> f64 {
    let (a, b, c) = quadratic_coefficients(p);
    let v = a * lambda * lambda + b * lambda + c;
    v.abs() / (a * lambda * lambda + (b * lambda).abs() + c.abs())
}

/// Branch prefactors of the radial profile.
pub fn f_coefficients(lambda: f64, p: KernelParams) -> (f64, f64) {
    let m = p.m();
    let e2 = (2.0 * m).exp();
    let inside = lambda * (1.0 + m) - 2.0 * m;
    let outside = lambda * (e2 * (m - 1.0) + 1.0 + m) - 2.0 * m * (e2 - 1.0);
    (inside, outside)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereSolution {
    pub m: f64,
    pub lambda_roots: [f64; 2],
    /// Inside prefactor for each root.
    pub f_inside_coeff: [f64; 2],
    /// Outside prefactor for each root.
    pub f_outside_coeff: [f64; 2],
}

impl SphereSolution {
    pub fn new(p: KernelParams) -> Self {
        let (l0, l1) = critical_lambda_roots(p);
        let (i0, o0) = f_coefficients(l0, p);
        let (i1, o1) = f_coefficients(l1, p);
        Self {
            m: p.m(),
            lambda_roots: [l0, l1],
            f_inside_coeff: [i0, i1],
            f_outside_coeff: [o0, o1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Branch {
    Inside,
    Outside,
}

// 2 sinh(x)/x and 2 (x cosh x - sinh x)/x^3, with series near 0
fn sinhc2(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        2.0 * (1.0 + x2 / 6.0 + x2 * x2 / 120.0)
    } else {
        (x.exp() - (-x).exp()) / x
    }
}

fn dsinhc2(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        2.0 * (1.0 / 3.0 + x2 / 30.0 + x2 * x2 / 840.0)
    } else {
        2.0 * (x * x.cosh() - x.sinh()) / (x * x * x)
    }
}

/// `(f, f'/r)` on one branch; `f'/r` stays finite at the origin.
fn profile(r: f64, lambda: f64, p: KernelParams, branch: Branch) -> (f64, f64) {
    let m = p.m();
    let (ci, co) = f_coefficients(lambda, p);
    match branch {
        Branch::Inside => {
            let x = m * r;
            (ci * sinhc2(x), ci * m * m * dsinhc2(x))
        }
        Branch::Outside => {
            let e = (-m * r).exp();
            (co * e / (m * r), -co * e * (1.0 + m * r) / (m * r * r * r))
        }
    }
}

fn branch_of(r: f64) -> Result<Branch> {
    if r == 1.0 || !r.is_finite() {
        return Err(Error::SingularPoint(r));
    }
    Ok(if r < 1.0 { Branch::Inside } else { Branch::Outside })
}

/// Radial profile `f_lambda(r)` for `r > 0`, `r != 1`.
pub fn f_lambda(r: f64, lambda: f64, p: KernelParams) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    Ok(profile(r, lambda, p, branch_of(r)?).0)
}

/// `f'_lambda(r)` from the analytic branch derivative.
pub fn f_lambda_derivative(r: f64, lambda: f64, p: KernelParams) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    Ok(profile(r, lambda, p, branch_of(r)?).1 * r)
}

/// `(f(1-), f(1+))`, each branch evaluated at `r = 1`.
pub fn f_lambda_limits(lambda: f64, p: KernelParams) -> (f64, f64) {
    (
        profile(1.0, lambda, p, Branch::Inside).0,
        profile(1.0, lambda, p, Branch::Outside).0,
    )
}

fn phi_on_branch(x: [f64; 3], lambda: f64, p: KernelParams, branch: Branch) -> Spinor {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let (f, fp_over_r) = profile(r, lambda, p, branch);
    // (-i/(m r)) (i m r f, 0, x3 f', (x1 + i x2) f')
    let k = Complex64::new(0.0, -fp_over_r / p.m());
    Spinor::new([
        Complex64::new(f, 0.0),
        Complex64::new(0.0, 0.0),
        k * x[2],
        k * Complex64::new(x[0], x[1]),
    ])
}

/// The zero-mode spinor field at `x`, `|x| != 1`.
pub fn phi_lambda(x: [f64; 3], lambda: f64, p: KernelParams) -> Result<Spinor> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint(0.0));
    }
    Ok(phi_on_branch(x, lambda, p, branch_of(r)?))
}

/// `((phi)_+, (phi)_-)` at the unit vector `n`: inside and outside traces.
pub fn phi_traces(n: [f64; 3], lambda: f64, p: KernelParams) -> (Spinor, Spinor) {
    (
        phi_on_branch(n, lambda, p, Branch::Inside),
        phi_on_branch(n, lambda, p, Branch::Outside),
    )
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// `g_lambda = i (alpha.N)(phi_+ - phi_-)` at the sphere point in `direction`.
pub fn shell_density(direction: [f64; 3], lambda: f64, p: KernelParams) -> Spinor {
    let n = unit(direction);
    let (plus, minus) = phi_traces(n, lambda, p);
    alpha_dot(n).apply(&(plus - minus)).scale(Complex64::new(0.0, 1.0))
}

/// [`shell_density`] at the centroid directions of `mesh`.
pub fn sample_shell_density(mesh: &SurfaceMesh, lambda: f64, p: KernelParams) -> DiscreteDensity {
    let values = mesh.panels.iter().map(|panel| shell_density(panel.centroid, lambda, p)).collect();
    DiscreteDensity::new(values, mesh.label.clone())
}

/// `(-i alpha.grad + m beta) psi` by central differences with step `h`.
pub fn dirac_apply_fd(psi: impl Fn([f64; 3]) -> Result<Spinor>, x: [f64; 3], h: f64, m: f64) -> Result<Spinor> {
    let mut out = crate::algebra::beta().apply(&psi(x)?).scale_real(m);
    for j in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let d = (psi(xp)? - psi(xm)?).scale_real(0.5 / h);
        let mut e = [0.0; 3];
        e[j] = 1.0;
        out = out + alpha_dot(e).apply(&d).scale(Complex64::new(0.0, -1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: f64) -> KernelParams {
        KernelParams::new(m).unwrap()
    }

    // 40-digit reference values
    const ROOT_POS: f64 = 2.349_289_560_789_952_6;
    const ROOT_NEG: f64 = -1.702_642_393_156_079_6;
    const F_HALF: f64 = 5.624_867_647_034_916_6;
    const F_TWO: f64 = -0.546_722_948_649_061_64;

    #[test]
    fn roots_for_unit_mass() {
        let (lo, hi) = critical_lambda_roots(p(1.0));
        assert!((lo - ROOT_NEG).abs() < 1e-14);
        assert!((hi - ROOT_POS).abs() < 1e-14);
        assert!((lo.abs() - 2.0).abs() > 0.1 && (hi - 2.0).abs() > 0.1);
    }

    #[test]
    fn roots_satisfy_quadratic() {
        for m in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let (lo, hi) = critical_lambda_roots(p(m));
            assert!(quadratic_residual(p(m), lo) < 1e-14);
            assert!(quadratic_residual(p(m), hi) < 1e-14);
            assert!((lo * hi + 4.0).abs() < 1e-12);
        }
        let (lo, hi) = critical_lambda_roots(p(5.0));
        assert!((lo + 1.960_508_523_829_001_2).abs() < 1e-13);
        assert!((hi - 2.040_286_972_171_760_2).abs() < 1e-13);
    }

    #[test]
    fn profile_values() {
        assert!((f_lambda(0.5, ROOT_POS, p(1.0)).unwrap() - F_HALF).abs() < 1e-13);
        assert!((f_lambda(2.0, ROOT_POS, p(1.0)).unwrap() - F_TWO).abs() < 1e-14);
        let (ci, _) = f_coefficients(ROOT_POS, p(1.0));
        assert!((f_lambda(1e-9, ROOT_POS, p(1.0)).unwrap() - 2.0 * ci).abs() < 1e-12);
        assert!(matches!(f_lambda(1.0, 2.0, p(1.0)), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn derivative_matches_differences() {
        for r in [1e-4f64, 0.3, 0.9, 1.1, 3.0] {
            let h = 1e-5 * r.max(0.1);
            let fd = (f_lambda(r + h, 1.3, p(1.7)).unwrap() - f_lambda(r - h, 1.3, p(1.7)).unwrap()) / (2.0 * h);
            let an = f_lambda_derivative(r, 1.3, p(1.7)).unwrap();
            assert!((fd - an).abs() < 1e-7 * (1.0 + an.abs()), "r={r}: {fd} vs {an}");
        }
    }

    #[test]
    fn exponential_decay() {
        let ratio = |r: f64| f_lambda(r, ROOT_POS, p(1.0)).unwrap() * r * r.exp();
        assert!((ratio(5.0) - ratio(10.0)).abs() < 1e-12 * ratio(5.0).abs());
        assert!((ratio(10.0) - ratio(20.0)).abs() < 1e-12 * ratio(5.0).abs());
    }

    #[test]
    fn phi_is_annihilated_off_the_sphere() {
        let q = p(1.0);
        for x in [[0.3, 0.2, 0.4], [1.5, 0.0, 0.2]] {
            let r = dirac_apply_fd(|y| phi_lambda(y, ROOT_POS, q), x, 1e-4, 1.0).unwrap();
            assert!(r.norm() < 1e-6, "{x:?}: {}", r.norm());
            assert_eq!(phi_lambda(x, ROOT_POS, q).unwrap()[1], Complex64::new(0.0, 0.0));
        }
        assert!(phi_lambda([0.0, 0.0, 0.0], 1.0, q).is_err());
        assert!(phi_lambda([0.0, 1.0, 0.0], 1.0, q).is_err());
    }

    #[test]
    fn traces_satisfy_the_shell_condition_at_the_roots() {
        // g = -(lambda/2)(phi_+ + phi_-) holds only at a root
        for lambda in [ROOT_POS, ROOT_NEG] {
            for n in [[0.0, 0.0, 1.0], [0.6, 0.0, -0.8], [0.36, 0.48, 0.8]] {
                let g = shell_density(n, lambda, p(1.0));
                let (a, b) = phi_traces(n, lambda, p(1.0));
                let defect = g + (a + b).scale_real(lambda / 2.0);
                assert!(defect.norm() < 1e-13 * g.norm(), "{lambda} {n:?}: {}", defect.norm());
            }
        }
        let g = shell_density([0.0, 0.0, 1.0], 2.0, p(1.0));
        let (a, b) = phi_traces([0.0, 0.0, 1.0], 2.0, p(1.0));
        assert!((g + (a + b)).norm() > 1e-3);
    }

    #[test]
    fn density_jump_inverts() {
        let n = unit([1.0, -2.0, 0.5]);
        let g = shell_density(n, ROOT_POS, p(1.0));
        let (a, b) = phi_traces(n, ROOT_POS, p(1.0));
        let back = alpha_dot(n).apply(&g).scale(Complex64::new(0.0, -1.0));
        assert!((back - (a - b)).norm() < 1e-14);
    }
}
