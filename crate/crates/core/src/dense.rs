//! Small dense-matrix helpers shared by the operator and spectrum code.

use faer::{c64, Col, Mat, MatRef};

use crate::algebra::SpinorMatrix;

pub fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn frobenius(a: MatRef<'_, c64>) -> f64 {
    a.norm_l2()
}

pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    a.norm_max()
}

/// `W^{1/2} A W^{-1/2}` with `W = diag(weights) (x) I4`.
pub fn w_similar(a: MatRef<'_, c64>, weights: &[f64]) -> Mat<c64> {
    let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (s[i / 4] / s[j / 4]))
}

/// `(A + A^dagger) / 2`.
pub fn hermitian_part(a: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// `||A - A^dagger||_F`.
pub fn anti_hermitian_norm(a: MatRef<'_, c64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            acc += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Induced 1-norm (max column sum).
pub fn one_norm(a: MatRef<'_, c64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn block(a: MatRef<'_, c64>, i: usize, j: usize) -> SpinorMatrix {
    SpinorMatrix::from_fn(|r, c| a[(4 * i + r, 4 * j + c)])
}

pub fn spinor_to_mat(s: &SpinorMatrix) -> Mat<c64> {
    Mat::from_fn(4, 4, |r, c| s.0[r][c])
}

/// Largest singular value by power iteration on `A^dagger A`, starting from
/// a fixed deterministic vector.
pub fn power_norm(a: MatRef<'_, c64>, iterations: usize) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = Col::<c64>::from_fn(n, |k| c64::new(1.0 + (k % 7) as f64 * 0.1, (k % 3) as f64 * 0.05));
    let mut est = 0.0;
    for _ in 0..iterations {
        let nv = v.norm_l2();
        if nv == 0.0 {
            return 0.0;
        }
        v = Col::from_fn(n, |k| v[k] / nv);
        let av = a * &v;
        est = av.norm_l2();
        v = a.adjoint() * &av;
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_norm_of_diagonal() {
        let a = Mat::from_fn(5, 5, |i, j| if i == j { c64::new(i as f64 - 3.5, 0.0) } else { c64::new(0.0, 0.0) });
        assert!((power_norm(a.as_ref(), 200) - 3.5).abs() < 1e-6);
    }

    #[test]
    fn hermitian_part_is_hermitian() {
        let a = Mat::from_fn(6, 6, |i, j| c64::new((i * j) as f64, i as f64 - j as f64 * 0.5));
        assert_eq!(anti_hermitian_norm(hermitian_part(a.as_ref()).as_ref()), 0.0);
        assert!(anti_hermitian_norm(a.as_ref()) > 0.0);
    }
}
