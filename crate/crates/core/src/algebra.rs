//! Pauli and Dirac matrices in the standard (Dirac) representation, plus the
//! 4x4 complex matrix and spinor value types the rest of the crate is built on.
//!
//! `alpha(j) = [[0, sigma_j], [sigma_j, 0]]`, `beta = diag(I2, -I2)`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A dense 4x4 complex matrix acting on Dirac spinors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinorMatrix(pub [[Complex64; 4]; 4]);

/// A four-component complex spinor.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Spinor(pub [Complex64; 4]);

impl SpinorMatrix {
    pub const fn zero() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_fn(|r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = f(r, c);
            }
        }
        m
    }

    /// Block matrix `[[a, b], [c, d]]` from 2x2 blocks.
    pub fn from_blocks(
        a: [[Complex64; 2]; 2],
        b: [[Complex64; 2]; 2],
        c: [[Complex64; 2]; 2],
        d: [[Complex64; 2]; 2],
    ) -> Self {
        Self::from_fn(|r, col| match (r < 2, col < 2) {
            (true, true) => a[r][col],
            (true, false) => b[r][col - 2],
            (false, true) => c[r - 2][col],
            (false, false) => d[r - 2][col - 2],
        })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|r, c| self.0[r][c] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|r, c| self.0[r][c] * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let mut out = Spinor::default();
        for r in 0..4 {
            out.0[r] = (0..4).map(|c| self.0[r][c] * v.0[c]).sum();
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self * other + other * self`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Max-entry size of the anti-Hermitian part `(A - A^†)/2`.
    pub fn anti_hermitian_part_max(&self) -> f64 {
        (*self - self.adjoint()).scale_real(0.5).max_abs()
    }
}

impl Default for SpinorMatrix {
    fn default() -> Self {
        Self::zero()
    }
}

impl Index<(usize, usize)> for SpinorMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for SpinorMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.0[r][c]
    }
}

impl Mul for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: SpinorMatrix) -> SpinorMatrix {
        SpinorMatrix::from_fn(|r, c| (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum())
    }
}

impl Mul<Spinor> for SpinorMatrix {
    type Output = Spinor;
    fn mul(self, rhs: Spinor) -> Spinor {
        self.apply(&rhs)
    }
}

impl Add for SpinorMatrix {
    type Output = SpinorMatrix;
    fn add(self, rhs: SpinorMatrix) -> SpinorMatrix {
        SpinorMatrix::from_fn(|r, c| self.0[r][c] + rhs.0[r][c])
    }
}

impl AddAssign for SpinorMatrix {
    fn add_assign(&mut self, rhs: SpinorMatrix) {
        *self = *self + rhs;
    }
}

impl Sub for SpinorMatrix {
    type Output = SpinorMatrix;
    fn sub(self, rhs: SpinorMatrix) -> SpinorMatrix {
        SpinorMatrix::from_fn(|r, c| self.0[r][c] - rhs.0[r][c])
    }
}

impl Neg for SpinorMatrix {
    type Output = SpinorMatrix;
    fn neg(self) -> SpinorMatrix {
        self.scale_real(-1.0)
    }
}

impl Spinor {
    pub const fn new(c: [Complex64; 4]) -> Self {
        Self(c)
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Self(c.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Hermitian inner product `<self, other> = sum conj(self_k) other_k`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        (0..4).map(|k| self.0[k].conj() * other.0[k]).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Spinor {
        Spinor(self.0.map(|z| z * s))
    }

    pub fn scale_real(&self, s: f64) -> Spinor {
        Spinor(self.0.map(|z| z * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for Spinor {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for Spinor {
    fn index_mut(&mut self, k: usize) -> &mut Complex64 {
        &mut self.0[k]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, rhs: Spinor) {
        *self = *self + rhs;
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        self.scale_real(-1.0)
    }
}

/// Pauli matrix `sigma_j`, `j` in 1..=3.
pub fn pauli(j: usize) -> Result<[[Complex64; 2]; 2]> {
    match j {
        1 => Ok([[ZERO, ONE], [ONE, ZERO]]),
        2 => Ok([[ZERO, -I], [I, ZERO]]),
        3 => Ok([[ONE, ZERO], [ZERO, -ONE]]),
        _ => Err(Error::IndexOutOfRange(j)),
    }
}

const ZERO2: [[Complex64; 2]; 2] = [[ZERO; 2]; 2];
const ID2: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

/// Dirac matrix `alpha_j = [[0, sigma_j], [sigma_j, 0]]`.
pub fn alpha(j: usize) -> Result<SpinorMatrix> {
    let s = pauli(j)?;
    Ok(SpinorMatrix::from_blocks(ZERO2, s, s, ZERO2))
}

/// All three `alpha_j`, indexed from zero.
pub fn alphas() -> [SpinorMatrix; 3] {
    // indices are in range by construction
    [1, 2, 3].map(|j| alpha(j).expect("valid alpha index"))
}

/// `beta = diag(1, 1, -1, -1)`.
pub fn beta() -> SpinorMatrix {
    SpinorMatrix::from_blocks(ID2, ZERO2, ZERO2, [[-ONE, ZERO], [ZERO, -ONE]])
}

/// `v1 alpha_1 + v2 alpha_2 + v3 alpha_3` for a real vector.
pub fn alpha_dot(v: [f64; 3]) -> SpinorMatrix {
    // Written out entrywise; this sits in the assembly hot loop.
    let (x, y, z) = (v[0], v[1], v[2]);
    let mut m = SpinorMatrix::zero();
    let s = [
        [Complex64::new(z, 0.0), Complex64::new(x, -y)],
        [Complex64::new(x, y), Complex64::new(-z, 0.0)],
    ];
    for r in 0..2 {
        for c in 0..2 {
            m.0[r][c + 2] = s[r][c];
            m.0[r + 2][c] = s[r][c];
        }
    }
    m
}

/// `v1 alpha_1 + v2 alpha_2 + v3 alpha_3` for a complex vector.
pub fn alpha_dot_complex(v: [Complex64; 3]) -> SpinorMatrix {
    let a = alphas();
    a[0].scale(v[0]) + a[1].scale(v[1]) + a[2].scale(v[2])
}

/// The block swap `tau = [[0, I2], [I2, 0]]` relating the kernel at `z` and `-z`.
pub fn swap_tau() -> SpinorMatrix {
    SpinorMatrix::from_blocks(ZERO2, ID2, ID2, ZERO2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn alpha3_matches_block_form() {
        let a3 = alpha(3).unwrap();
        let expected = SpinorMatrix::from_fn(|r, col| match (r, col) {
            (0, 2) | (2, 0) => c(1.0, 0.0),
            (1, 3) | (3, 1) => c(-1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        assert_eq!(a3, expected);
    }

    #[test]
    fn out_of_range_index_rejected() {
        assert!(matches!(alpha(0), Err(Error::IndexOutOfRange(0))));
        assert!(matches!(alpha(4), Err(Error::IndexOutOfRange(4))));
    }

    #[test]
    fn clifford_relations_exact() {
        let a = alphas();
        let id = SpinorMatrix::identity();
        for j in 0..3 {
            assert_eq!(a[j].adjoint(), a[j]);
            for k in 0..3 {
                let expected = if j == k { id.scale_real(2.0) } else { SpinorMatrix::zero() };
                assert_eq!(a[j].anticommutator(&a[k]), expected);
            }
            assert_eq!(a[j].anticommutator(&beta()), SpinorMatrix::zero());
        }
        assert_eq!(beta() * beta(), id);
        assert_eq!(beta().adjoint(), beta());
    }

    #[test]
    fn alpha_dot_basis_and_square() {
        assert_eq!(alpha_dot([0.0, 0.0, 1.0]), alpha(3).unwrap());
        assert_eq!(alpha_dot([1.0, 2.0, 2.0]) * alpha_dot([1.0, 2.0, 2.0]), SpinorMatrix::identity().scale_real(9.0));
        // 2(u.v) I for u=(1,0,0), v=(1,1,0)
        let u = alpha_dot([1.0, 0.0, 0.0]);
        let v = alpha_dot([1.0, 1.0, 0.0]);
        assert_eq!(u.anticommutator(&v), SpinorMatrix::identity().scale_real(2.0));
    }

    #[test]
    fn alpha_dot_matches_generic_combination() {
        let v = [0.3, -1.7, 2.25];
        let a = alphas();
        let generic = a[0].scale_real(v[0]) + a[1].scale_real(v[1]) + a[2].scale_real(v[2]);
        assert_eq!(alpha_dot(v), generic);
        let vc = v.map(|x| c(x, 0.0));
        assert_eq!(alpha_dot_complex(vc), generic);
    }

    #[test]
    fn swap_tau_squares_to_identity_and_anticommutes_with_beta() {
        let t = swap_tau();
        assert_eq!(t * t, SpinorMatrix::identity());
        assert_eq!(t.anticommutator(&beta()), SpinorMatrix::zero());
    }

    #[test]
    fn spinor_inner_product_is_conjugate_linear_in_first_slot() {
        let a = Spinor::new([c(1.0, 1.0), c(0.0, 2.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let b = Spinor::new([c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 3.0)]);
        let lhs = a.scale(c(0.0, 1.0)).inner(&b);
        assert_eq!(lhs, a.inner(&b) * c(0.0, -1.0));
        assert!((a.inner(&a).re - a.norm_sqr()).abs() < 1e-15);
    }
}
