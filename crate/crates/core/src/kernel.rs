//! Fundamental solution of `H = -i alpha.grad + m beta` and the pieces used by
//! the boundary quadrature.
//!
//! `phi(x) = e^{-m|x|}/(4 pi |x|) (m beta + (1 + m|x|) i alpha.x / |x|^2)`

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{alpha_dot, beta, SpinorMatrix};
use crate::error::{Error, Result};

/// Mass parameter of the free Dirac operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelParams {
    m: f64,
}

impl KernelParams {
    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m > 0.0 {
            Ok(Self { m })
        } else {
            Err(Error::InvalidMass(m))
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

/// A kernel value together with the offset it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: SpinorMatrix,
    pub point: [f64; 3],
}

/// The decomposition `phi = omega1 + omega2 + omega3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSplit {
    /// `e^{-mr}/(4 pi r) m (beta + i alpha.x/r)`, weakly singular.
    pub omega1: SpinorMatrix,
    /// `(e^{-mr} - 1)/(4 pi) i alpha.x/r^3`.
    pub omega2: SpinorMatrix,
    /// `i/(4 pi) alpha.x/r^3`, the odd Cauchy-type part.
    pub omega3: SpinorMatrix,
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn checked_radius(x: [f64; 3]) -> Result<f64> {
    let r = norm3(x);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::ZeroOffset);
    }
    Ok(r)
}

/// Scalar coefficients `(a, b)` with `phi(x) = a beta + i b alpha.x`.
#[inline]
pub(crate) fn phi_coefficients(r: f64, m: f64) -> (f64, f64) {
    let e = (-m * r).exp() / (4.0 * PI * r);
    (e * m, e * (1.0 + m * r) / (r * r))
}

/// `a beta + i b alpha.x` written entrywise.
#[inline]
pub(crate) fn beta_plus_i_alpha(a: f64, b: f64, x: [f64; 3]) -> SpinorMatrix {
    let mut out = SpinorMatrix::zero();
    let (x1, x2, x3) = (b * x[0], b * x[1], b * x[2]);
    // i sigma.x = [[i x3, x2 + i x1], [-x2 + i x1, -i x3]]
    let s = [
        [Complex64::new(0.0, x3), Complex64::new(x2, x1)],
        [Complex64::new(-x2, x1), Complex64::new(0.0, -x3)],
    ];
    for r in 0..2 {
        for c in 0..2 {
            out.0[r][c + 2] = s[r][c];
            out.0[r + 2][c] = s[r][c];
        }
    }
    out.0[0][0] = Complex64::new(a, 0.0);
    out.0[1][1] = Complex64::new(a, 0.0);
    out.0[2][2] = Complex64::new(-a, 0.0);
    out.0[3][3] = Complex64::new(-a, 0.0);
    out
}

/// Kernel value without the zero-offset check. Caller guarantees `x != 0`.
#[inline]
pub(crate) fn phi_raw(x: [f64; 3], m: f64) -> SpinorMatrix {
    let r = norm3(x);
    let (a, b) = phi_coefficients(r, m);
    beta_plus_i_alpha(a, b, x)
}

/// The fundamental solution at offset `x`.
pub fn phi(x: [f64; 3], p: KernelParams) -> Result<SpinorMatrix> {
    checked_radius(x)?;
    Ok(phi_raw(x, p.m))
}

/// Same as [`phi`], keeping the offset alongside the value.
pub fn phi_value(x: [f64; 3], p: KernelParams) -> Result<KernelValue> {
    Ok(KernelValue {
        value: phi(x, p)?,
        point: x,
    })
}

/// Fourier symbol `(4 pi^2 |xi|^2 + m^2)^{-1} (2 pi alpha.xi + m beta)` with the
/// convention `F(f)(xi) = int f(x) e^{-2 pi i x.xi} dx`.
pub fn phi_symbol(xi: [f64; 3], p: KernelParams) -> SpinorMatrix {
    let m = p.m;
    let denom = 4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) + m * m;
    let num = alpha_dot([2.0 * PI * xi[0], 2.0 * PI * xi[1], 2.0 * PI * xi[2]]) + beta().scale_real(m);
    num.scale_real(1.0 / denom)
}

/// The symbol of `H` itself, `2 pi alpha.xi + m beta`.
pub fn dirac_symbol(xi: [f64; 3], p: KernelParams) -> SpinorMatrix {
    alpha_dot([2.0 * PI * xi[0], 2.0 * PI * xi[1], 2.0 * PI * xi[2]]) + beta().scale_real(p.m)
}

/// Split of `phi` into the weakly singular, bounded-times-`1/r` and odd parts.
pub fn kernel_split(x: [f64; 3], p: KernelParams) -> Result<KernelSplit> {
    let r = checked_radius(x)?;
    let m = p.m;
    let decay = (-m * r).exp();
    let xhat = [x[0] / r, x[1] / r, x[2] / r];
    let w1 = decay * m / (4.0 * PI * r);
    let omega1 = beta_plus_i_alpha(w1, w1, xhat);
    // exp_m1 keeps (e^{-mr} - 1) accurate as r -> 0
    let w2 = (-m * r).exp_m1() / (4.0 * PI * r * r * r);
    let omega2 = beta_plus_i_alpha(0.0, w2, x);
    let w3 = 1.0 / (4.0 * PI * r * r * r);
    let omega3 = beta_plus_i_alpha(0.0, w3, x);
    Ok(KernelSplit {
        omega1,
        omega2,
        omega3,
    })
}

impl KernelSplit {
    pub fn sum(&self) -> SpinorMatrix {
        self.omega1 + self.omega2 + self.omega3
    }
}

/// Kernel of the anticommutator `(alpha.N) C + C (alpha.N)` between a target
/// `x` with normal `nx` and a source `z` with normal `nz`:
/// `phi(x-z) alpha.(N(z)-N(x)) + i e^{-mr}(1+mr)/(2 pi r^3) (N(x).(x-z)) I`.
pub fn anticommutator_kernel(
    x: [f64; 3],
    nx: [f64; 3],
    z: [f64; 3],
    nz: [f64; 3],
    p: KernelParams,
) -> Result<SpinorMatrix> {
    let d = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
    checked_radius(d)?;
    Ok(anticommutator_kernel_raw(d, nx, nz, p.m))
}

#[inline]
pub(crate) fn anticommutator_kernel_raw(d: [f64; 3], nx: [f64; 3], nz: [f64; 3], m: f64) -> SpinorMatrix {
    let r = norm3(d);
    let dn = [nz[0] - nx[0], nz[1] - nx[1], nz[2] - nx[2]];
    let mut k = phi_raw(d, m) * alpha_dot(dn);
    let (_, b) = phi_coefficients(r, m);
    let s = 2.0 * b * (nx[0] * d[0] + nx[1] * d[1] + nx[2] * d[2]);
    for j in 0..4 {
        k.0[j][j] += Complex64::new(0.0, s);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{alpha, swap_tau};
    use approx::assert_abs_diff_eq;

    fn p(m: f64) -> KernelParams {
        KernelParams::new(m).unwrap()
    }

    #[test]
    fn rejects_bad_mass_and_zero_offset() {
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(-1.0).is_err());
        assert!(KernelParams::new(f64::NAN).is_err());
        assert!(matches!(phi([0.0; 3], p(1.0)), Err(Error::ZeroOffset)));
        assert!(kernel_split([0.0; 3], p(1.0)).is_err());
    }

    #[test]
    fn phi_on_unit_axis() {
        let v = phi([1.0, 0.0, 0.0], p(1.0)).unwrap();
        let pref = (-1.0f64).exp() / (4.0 * PI);
        assert_abs_diff_eq!(pref, 0.029_274_9, epsilon = 1e-7);
        let expected = (beta() + alpha(1).unwrap().scale(Complex64::new(0.0, 2.0))).scale_real(pref);
        assert!((v - expected).max_abs() < 1e-16);
    }

    #[test]
    fn adjoint_symmetry() {
        let x = [0.1, 0.2, 0.3];
        let y = [-0.4, 0.0, 0.7];
        let a = phi([x[0] - y[0], x[1] - y[1], x[2] - y[2]], p(2.0)).unwrap();
        let b = phi([y[0] - x[0], y[1] - x[1], y[2] - x[2]], p(2.0)).unwrap();
        assert!((a - b.adjoint()).max_abs() < 1e-15);
    }

    #[test]
    fn swap_relation() {
        let z = [0.3, 0.4, 0.5];
        let t = swap_tau();
        let lhs = -(phi(z, p(1.0)).unwrap() * t);
        let rhs = t * phi([-0.3, -0.4, -0.5], p(1.0)).unwrap();
        assert!((lhs - rhs).max_abs() < 1e-15);
    }

    #[test]
    fn decays_at_distance_ten() {
        let v = phi([10.0, 0.0, 0.0], p(1.0)).unwrap();
        assert!(v.max_abs() < 1e-4);
    }

    #[test]
    fn symbol_inverts_dirac_symbol() {
        assert!((phi_symbol([0.0; 3], p(1.0)) - beta()).max_abs() < 1e-16);
        let xi = [0.3, -1.2, 0.5];
        let prod = dirac_symbol(xi, p(1.0)) * phi_symbol(xi, p(1.0));
        assert!((prod - SpinorMatrix::identity()).max_abs() < 1e-14);
        assert_eq!(phi_symbol(xi, p(1.0)).anti_hermitian_part_max(), 0.0);
    }

    #[test]
    fn split_sums_to_phi() {
        let x = [0.2, 0.1, -0.3];
        let s = kernel_split(x, p(1.0)).unwrap();
        assert!((s.sum() - phi(x, p(1.0)).unwrap()).max_abs() < 1e-15 * phi(x, p(1.0)).unwrap().max_abs().max(1.0));
        let neg = kernel_split([-0.2, -0.1, 0.3], p(1.0)).unwrap();
        assert_eq!((s.omega3 + neg.omega3).max_abs(), 0.0);
    }

    #[test]
    fn omega2_times_r_is_bounded_near_origin() {
        let r = 1e-6;
        let s = kernel_split([r, 0.0, 0.0], p(1.0)).unwrap();
        let bound = 1.0 / (4.0 * PI);
        assert!(s.omega2.max_abs() * r <= bound * (1.0 + 1e-5));
        assert!(s.omega2.max_abs() * r >= bound * (1.0 - 1e-5));
    }

    #[test]
    fn anticommutator_kernel_matches_direct_product() {
        let x = [0.1, 0.5, -0.2];
        let z = [-0.3, 0.2, 0.4];
        let nx = [0.6, 0.0, 0.8];
        let nz = [0.0, -1.0, 0.0];
        let d = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
        let f = phi(d, p(1.3)).unwrap();
        let direct = alpha_dot(nx) * f + f * alpha_dot(nz);
        let k = anticommutator_kernel(x, nx, z, nz, p(1.3)).unwrap();
        assert!((k - direct).max_abs() < 1e-14);
    }
}
