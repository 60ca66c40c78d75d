//! Exact Fourier symbols for the flat shell `R^2 x {0}` with normal
//! `(0, 0, -1)`, and the single-frequency energy identity.

use std::f64::consts::PI;

use faer::Side;
use serde::Serialize;

use crate::algebra::{alpha_dot, beta, Spinor, SpinorMatrix};
use crate::dense;
use crate::error::{Error, Result};
use crate::kernel::KernelParams;
use crate::quad::integrate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymbolMatrix {
    pub xi: [f64; 2],
    pub value: SpinorMatrix,
    pub m: f64,
}

impl SymbolMatrix {
    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        let h = dense::hermitian_part(dense::spinor_to_mat(&self.value).as_ref());
        let ev = h
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok([ev[0], ev[1], ev[2], ev[3]])
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.value - self.value.adjoint()).max_abs()
    }
}

/// `2 pi (xi1 alpha1 + xi2 alpha2) + m beta`.
fn tangential_symbol(xi: [f64; 2], m: f64) -> SpinorMatrix {
    alpha_dot([2.0 * PI * xi[0], 2.0 * PI * xi[1], 0.0]) + beta().scale_real(m)
}

/// `(4 pi^2 |xi|^2 + m^2)^{1/2}`.
pub fn symbol_modulus(xi: [f64; 2], m: f64) -> f64 {
    (4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]) + m * m).sqrt()
}

/// Symbol of the Cauchy operator on the plane.
pub fn cauchy_symbol(xi: [f64; 2], p: KernelParams) -> SymbolMatrix {
    let m = p.m();
    SymbolMatrix {
        xi,
        value: tangential_symbol(xi, m).scale_real(0.5 / symbol_modulus(xi, m)),
        m,
    }
}

/// Symbol of `Lambda = -(1/2 + C)`.
pub fn lambda_symbol(xi: [f64; 2], p: KernelParams) -> SymbolMatrix {
    let c = cauchy_symbol(xi, p);
    SymbolMatrix {
        value: -(SpinorMatrix::identity().scale_real(0.5) + c.value),
        ..c
    }
}

/// `(S^, P_+, P_-)` for `S = alpha3 (alpha1 d1 + alpha2 d2 + i m beta)`, where
/// `S^ = i alpha3 (2 pi (xi1 alpha1 + xi2 alpha2) + m beta)` squares to
/// `s^2 I` and `P_+- = (I +- S^/s)/2`.
pub fn s_symbol(xi: [f64; 2], p: KernelParams) -> (SymbolMatrix, SymbolMatrix, SymbolMatrix) {
    let m = p.m();
    let s = symbol_modulus(xi, m);
    let a3 = alpha_dot([0.0, 0.0, 1.0]);
    let sh = (a3 * tangential_symbol(xi, m)).scale(crate::Complex64::new(0.0, 1.0));
    let half = SpinorMatrix::identity().scale_real(0.5);
    let q = sh.scale_real(0.5 / s);
    let wrap = |value| SymbolMatrix { xi, value, m };
    (wrap(sh), wrap(half + q), wrap(half - q))
}

/// Both sides of `<|S|^{-1} h, h> = 2 ||phi||^2` at a single frequency.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyIdentity {
    /// `h` after projection onto the kernel of the `Lambda` symbol.
    pub h: Spinor,
    pub lhs: f64,
    pub rhs: f64,
    /// `|P_- phi_+| + |P_+ phi_-|`, the part of the traces that would not decay.
    pub leakage: f64,
    pub quadrature_error: f64,
}

impl EnergyIdentity {
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// Projects `h` onto `ker F(Lambda)(xi)`, builds the traces
/// `phi_+- = (+-(i/2) alpha3 - 1/2) h`, and integrates
/// `|exp(-+x3 S^) P_+- phi_+-|^2` over `x3` by adaptive quadrature on
/// `[0, 40/s]` per half-line.
pub fn energy_identity_check(xi: [f64; 2], p: KernelParams, h: Spinor) -> Result<EnergyIdentity> {
    let m = p.m();
    let s = symbol_modulus(xi, m);
    // ker F(Lambda) = range of (I - T/s)/2 with T the tangential symbol
    let proj = (SpinorMatrix::identity() - tangential_symbol(xi, m).scale_real(1.0 / s)).scale_real(0.5);
    let hk = proj.apply(&h);
    if hk.norm() <= 1e-12 * h.norm().max(f64::MIN_POSITIVE) || hk.norm() == 0.0 {
        return Err(Error::NoKernelComponent);
    }
    let (_, pp, pm) = s_symbol(xi, p);
    let a3 = alpha_dot([0.0, 0.0, 1.0]);
    let i_half_a3 = a3.scale(crate::Complex64::new(0.0, 0.5));
    let half = SpinorMatrix::identity().scale_real(0.5);
    let phi_plus = (i_half_a3 - half).apply(&hk);
    let phi_minus = (-i_half_a3 - half).apply(&hk);
    let up = pp.value.apply(&phi_plus);
    let down = pm.value.apply(&phi_minus);
    let leakage = pm.value.apply(&phi_plus).norm() + pp.value.apply(&phi_minus).norm();

    // |S| = s I, so the left side is |h|^2 / s
    let lhs = hk.norm_sqr() / s;
    let length = 40.0 / s;
    let (na, nb) = (up.norm_sqr(), down.norm_sqr());
    let upper = integrate(|x| na * (-2.0 * s * x).exp(), 0.0, length, 1e-16, 1e-13, 200);
    let lower = integrate(|x| nb * (2.0 * s * x).exp(), -length, 0.0, 1e-16, 1e-13, 200);
    Ok(EnergyIdentity {
        h: hk,
        lhs,
        rhs: 2.0 * (upper.value + lower.value),
        leakage,
        quadrature_error: 2.0 * (upper.error + lower.error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    fn p(m: f64) -> KernelParams {
        KernelParams::new(m).unwrap()
    }

    #[test]
    fn lambda_symbol_at_zero_frequency() {
        let l = lambda_symbol([0.0, 0.0], p(1.0));
        let expect = (SpinorMatrix::identity() + beta()).scale_real(-0.5);
        assert!((l.value - expect).max_abs() < 1e-15);
        let ev = l.eigenvalues().unwrap();
        for (a, b) in ev.iter().zip([-1.0, -1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn lambda_symbol_is_projection_minus_identity() {
        let l = lambda_symbol([0.7, -1.1], p(2.0));
        assert!((l.value * l.value + l.value).max_abs() < 1e-13);
        let ev = l.eigenvalues().unwrap();
        for (a, b) in ev.iter().zip([-1.0, -1.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn s_symbol_structure() {
        let (s0, _, _) = s_symbol([0.0, 0.0], p(1.5));
        assert!((s0.value * s0.value - SpinorMatrix::identity().scale_real(2.25)).max_abs() == 0.0);
        let (s, pp, pm) = s_symbol([1.0, 0.0], p(1.0));
        assert!(s.hermiticity_defect() < 1e-15);
        assert!((pp.value + pm.value - SpinorMatrix::identity()).max_abs() < 1e-15);
        assert!((pp.value * pm.value).max_abs() < 1e-14);
        assert!((pp.value.trace() - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        let sp = SymbolMatrix { value: s.value * pp.value, ..s };
        let sm = SymbolMatrix { value: s.value * pm.value, ..s };
        assert!(sp.eigenvalues().unwrap().iter().all(|&e| e > -1e-12));
        assert!(sm.eigenvalues().unwrap().iter().all(|&e| e < 1e-12));
    }

    #[test]
    fn energy_identity_balances() {
        let e = energy_identity_check([0.5, 0.5], p(1.0), Spinor::from_real([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(e.leakage < 1e-14);
        assert!(e.relative_gap() < 1e-8, "{e:?}");
        let e2 = energy_identity_check([0.5, 0.5], p(1.0), Spinor::from_real([2.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((e2.lhs - 4.0 * e.lhs).abs() < 1e-13 * e2.lhs);
        assert!((e2.rhs - 4.0 * e.rhs).abs() < 1e-10 * e2.rhs);
    }

    #[test]
    fn energy_identity_at_zero_frequency() {
        // kernel of -(1 + beta)/2 is the lower two components
        let h = Spinor::from_real([0.0, 0.0, 0.6, -0.8]);
        let e = energy_identity_check([0.0, 0.0], p(1.0), h).unwrap();
        assert!((e.lhs - 1.0).abs() < 1e-15);
        assert!((e.rhs - 1.0).abs() < 1e-8);
        let upper = Spinor::from_real([1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            energy_identity_check([0.0, 0.0], p(1.0), upper),
            Err(Error::NoKernelComponent)
        ));
    }
}
