//! Critical couplings from the spectrum of `K`, zero modes of `I + lambda C`,
//! and the self-adjointness operators `Lambda` for the shell potentials.
//!
//! Spectral quantities are taken in the discrete `L^2(sigma)^4` geometry: an
//! operator `A` is represented by `W^{1/2} A W^{-1/2}`, so singular values and
//! unit vectors refer to the area-weighted norm.

use std::fmt;
use std::str::FromStr;

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{c64, Mat, Side};
use serde::Serialize;

use crate::boundary::{BoundaryOperator, DiscreteDensity, Structure};
use crate::dense;
use crate::error::{Error, Result};
use crate::quad::golden_section;

/// `lambda = 2 (1 + 4a)^{-1/2}` for `a > -1/4`.
pub fn coupling_from_a(a: f64) -> Option<f64> {
    (a > -0.25).then(|| 2.0 / (1.0 + 4.0 * a).sqrt())
}

/// Inverse of [`coupling_from_a`]: `a = 1/lambda^2 - 1/4`.
pub fn a_from_coupling(lambda: f64) -> f64 {
    1.0 / (lambda * lambda) - 0.25
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Compute eigenvectors and the residual `||K v - a v||` per pair.
    pub residuals: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { residuals: true }
    }
}

/// Eigenvalues of the symmetrized `K` and the couplings derived from them.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    /// Ascending.
    pub a_values: Vec<f64>,
    /// Ascending; one per `a > -1/4`.
    pub lambda_values: Vec<f64>,
    /// Number of `a <= -1/4` with no coupling.
    pub excluded: usize,
    pub mesh_label: String,
    pub m: Option<f64>,
    /// `||K~ v - a v||` for each entry of `a_values` when requested.
    pub residuals: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectrumEntry {
    pub a: f64,
    pub lambda: Option<f64>,
    pub residual: Option<f64>,
}

impl SpectrumReport {
    pub fn entries(&self) -> Vec<SpectrumEntry> {
        self.a_values
            .iter()
            .enumerate()
            .map(|(k, &a)| SpectrumEntry {
                a,
                lambda: coupling_from_a(a),
                residual: self.residuals.get(k).copied(),
            })
            .collect()
    }

    /// The eigenvalue closest to `target`.
    pub fn nearest_a(&self, target: f64) -> Option<f64> {
        nearest(&self.a_values, target)
    }

    pub fn nearest_lambda(&self, target: f64) -> Option<f64> {
        nearest(&self.lambda_values, target)
    }

    /// Count of `|a| > threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.a_values.iter().filter(|a| a.abs() > threshold).count()
    }
}

fn nearest(values: &[f64], target: f64) -> Option<f64> {
    values
        .iter()
        .copied()
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
}

fn eig_err(e: impl fmt::Debug) -> Error {
    Error::Eigensolver(format!("{e:?}"))
}

pub fn critical_couplings(k: &BoundaryOperator) -> Result<SpectrumReport> {
    critical_couplings_with(k, SpectrumOptions::default())
}

/// Eigenvalues `a_j` of the Hermitian part of `W^{1/2} K W^{-1/2}` and the
/// couplings `lambda_j = 2 (1 + 4 a_j)^{-1/2}`.
pub fn critical_couplings_with(k: &BoundaryOperator, opts: SpectrumOptions) -> Result<SpectrumReport> {
    let kt = k.w_similar();
    let h = dense::hermitian_part(kt.as_ref());
    let (a_values, residuals) = if opts.residuals {
        let evd = h.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
        let a: Vec<f64> = (0..h.nrows()).map(|j| evd.S()[j].re).collect();
        let u = evd.U();
        let ku = &kt * u;
        let res = (0..a.len())
            .map(|j| {
                let mut acc = 0.0;
                for i in 0..h.nrows() {
                    acc += (ku[(i, j)] - u[(i, j)] * a[j]).norm_sqr();
                }
                acc.sqrt()
            })
            .collect();
        (a, res)
    } else {
        drop(kt);
        (h.self_adjoint_eigenvalues(Side::Lower).map_err(eig_err)?, Vec::new())
    };
    let mut lambda_values: Vec<f64> = a_values.iter().filter_map(|&a| coupling_from_a(a)).collect();
    lambda_values.sort_by(f64::total_cmp);
    let excluded = a_values.len() - lambda_values.len();
    Ok(SpectrumReport {
        a_values,
        lambda_values,
        excluded,
        mesh_label: k.mesh_label.clone(),
        m: k.m,
        residuals,
    })
}

enum Route {
    /// Eigenpairs of the Hermitian `W^{1/2} C W^{-1/2}`; then
    /// `s_k(I + lambda C) = |1 + lambda mu_k|` with the eigenvectors as
    /// singular vectors.
    Hermitian { mu: Vec<f64>, vectors: Mat<c64> },
    /// Full SVD of `I + lambda W^{1/2} C W^{-1/2}` at each evaluation.
    General { ct: Mat<c64> },
}

/// Evaluates the smallest singular value of `I + lambda C` in the weighted
/// norm. Built once per operator, then queried for any `lambda`.
pub struct ZeroModeScanner {
    route: Route,
    weights: Vec<f64>,
    mesh_label: String,
    symmetry_residual: f64,
}

/// W-symmetry residual below which the Hermitian route is used.
pub const HERMITIAN_ROUTE_TOL: f64 = 1e-10;

impl ZeroModeScanner {
    pub fn new(c: &BoundaryOperator) -> Result<Self> {
        let ct = c.w_similar();
        let norm = dense::frobenius(ct.as_ref());
        let symmetry_residual = if norm == 0.0 {
            0.0
        } else {
            dense::anti_hermitian_norm(ct.as_ref()) / norm
        };
        let route = if symmetry_residual <= HERMITIAN_ROUTE_TOL {
            let h = dense::hermitian_part(ct.as_ref());
            drop(ct);
            let evd = h.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
            let mu = (0..h.nrows()).map(|j| evd.S()[j].re).collect();
            Route::Hermitian {
                mu,
                vectors: evd.U().to_owned(),
            }
        } else {
            log::warn!("operator is not W-symmetric (residual {symmetry_residual:e}); scanning with a dense SVD per point");
            Route::General { ct }
        };
        Ok(Self {
            route,
            weights: c.weights.clone(),
            mesh_label: c.mesh_label.clone(),
            symmetry_residual,
        })
    }

    pub fn is_hermitian_route(&self) -> bool {
        matches!(self.route, Route::Hermitian { .. })
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    fn shifted(ct: &Mat<c64>, lambda: f64) -> Mat<c64> {
        Mat::from_fn(ct.nrows(), ct.ncols(), |i, j| {
            let v = ct[(i, j)] * lambda;
            if i == j {
                v + 1.0
            } else {
                v
            }
        })
    }

    /// Smallest singular value of `I + lambda C`.
    pub fn s_min(&self, lambda: f64) -> Result<f64> {
        match &self.route {
            Route::Hermitian { mu, .. } => Ok(mu.iter().map(|m| (1.0 + lambda * m).abs()).fold(f64::INFINITY, f64::min)),
            Route::General { ct } => {
                let s = Self::shifted(ct, lambda).singular_values().map_err(eig_err)?;
                Ok(s.last().copied().unwrap_or(0.0))
            }
        }
    }

    /// The `count` smallest singular values with their right singular vectors
    /// as densities of unit `sigma`-norm, ascending.
    pub fn smallest_pairs(&self, lambda: f64, count: usize) -> Result<Vec<(f64, DiscreteDensity)>> {
        let inv_sqrt: Vec<f64> = self.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
        let to_density = |col: faer::ColRef<'_, c64>| {
            let g = faer::Col::<c64>::from_fn(col.nrows(), |k| col[k] * inv_sqrt[k / 4]);
            DiscreteDensity::from_col(&g, self.mesh_label.clone())
        };
        match &self.route {
            Route::Hermitian { mu, vectors } => {
                let mut idx: Vec<usize> = (0..mu.len()).collect();
                idx.sort_by(|&a, &b| (1.0 + lambda * mu[a]).abs().total_cmp(&(1.0 + lambda * mu[b]).abs()).then(a.cmp(&b)));
                Ok(idx
                    .into_iter()
                    .take(count)
                    .map(|k| ((1.0 + lambda * mu[k]).abs(), to_density(vectors.col(k))))
                    .collect())
            }
            Route::General { ct } => {
                let svd = Self::shifted(ct, lambda).svd().map_err(eig_err)?;
                let n = ct.nrows();
                Ok((0..count.min(n))
                    .map(|t| {
                        let k = n - 1 - t;
                        (svd.S()[k].re, to_density(svd.V().col(k)))
                    })
                    .collect())
            }
        }
    }

    /// Eigenvalues of the symmetrized `C` when on the Hermitian route.
    pub fn eigenvalues(&self) -> Option<&[f64]> {
        match &self.route {
            Route::Hermitian { mu, .. } => Some(mu),
            Route::General { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub steps: usize,
    /// Golden-section stopping width in `lambda`.
    pub tolerance: f64,
    /// `s_min` below this marks a zero mode; typically 10x the Clifford residual.
    pub zero_threshold: Option<f64>,
    /// Results with `||lambda| - 2|` below this are flagged.
    pub critical_band: f64,
    /// Singular vectors kept per result. Time reversal makes every singular
    /// value of `I + lambda C` at least doubly degenerate, hence 2.
    pub subspace: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            steps: 401,
            tolerance: 1e-4,
            zero_threshold: None,
            critical_band: 0.02,
            subspace: 2,
        }
    }
}

/// A refined local minimum of `s_min(I + lambda C)`.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroModeResult {
    pub lambda_star: f64,
    #[serde(rename = "s_min")]
    pub smallest_singular_value: f64,
    /// Right singular vector of unit `sigma`-norm.
    #[serde(skip)]
    pub density: DiscreteDensity,
    /// The `subspace` smallest right singular vectors, `density` first.
    #[serde(skip)]
    pub subspace: Vec<DiscreteDensity>,
    /// `lambda_star` lies within the critical band around +-2.
    pub near_critical: bool,
    /// `s_min` is below the zero-mode threshold.
    pub zero_mode: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub results: Vec<ZeroModeResult>,
    /// `(lambda, s_min)` on the grid.
    pub curve: Vec<(f64, f64)>,
    pub threshold: Option<f64>,
    pub hermitian_route: bool,
}

pub fn zero_mode_scan(c: &BoundaryOperator, range: (f64, f64), steps: usize) -> Result<Vec<ZeroModeResult>> {
    let scanner = ZeroModeScanner::new(c)?;
    Ok(scan_with(&scanner, range, ScanOptions { steps, ..Default::default() })?.results)
}

/// Grid scan of `s_min(lambda)` over `range`, golden-section refinement of each
/// interior grid minimum over its two neighbouring cells, results sorted by
/// `s_min` then `lambda`.
pub fn scan_with(scanner: &ZeroModeScanner, range: (f64, f64), opts: ScanOptions) -> Result<ScanReport> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::EmptyRange(lo, hi));
    }
    if opts.steps < 2 {
        return Err(Error::InvalidArgument(format!("scan needs at least 2 steps, got {}", opts.steps)));
    }
    let step = (hi - lo) / (opts.steps - 1) as f64;
    let grid: Vec<f64> = (0..opts.steps).map(|k| lo + k as f64 * step).collect();
    let values = grid.iter().map(|&l| scanner.s_min(l)).collect::<Result<Vec<_>>>()?;

    let mut minima = Vec::new();
    for k in 1..grid.len().saturating_sub(1) {
        if values[k] <= values[k - 1] && values[k] < values[k + 1] {
            minima.push(k);
        }
    }

    let mut results: Vec<ZeroModeResult> = Vec::new();
    for k in minima {
        let mut failure = None;
        let (lambda_star, s) = golden_section(
            |l| match scanner.s_min(l) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            grid[k - 1],
            grid[k + 1],
            opts.tolerance,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if results.iter().any(|r| (r.lambda_star - lambda_star).abs() < opts.tolerance) {
            continue;
        }
        let pairs = scanner.smallest_pairs(lambda_star, opts.subspace.max(1))?;
        let subspace: Vec<DiscreteDensity> = pairs.into_iter().map(|p| p.1).collect();
        results.push(ZeroModeResult {
            lambda_star,
            smallest_singular_value: s,
            density: subspace[0].clone(),
            subspace,
            near_critical: (lambda_star.abs() - 2.0).abs() < opts.critical_band,
            zero_mode: opts.zero_threshold.is_some_and(|t| s < t),
        });
    }
    results.sort_by(|a, b| {
        a.smallest_singular_value
            .total_cmp(&b.smallest_singular_value)
            .then(a.lambda_star.total_cmp(&b.lambda_star))
    });
    Ok(ScanReport {
        results,
        curve: grid.into_iter().zip(values).collect(),
        threshold: opts.zero_threshold,
        hermitian_route: scanner.is_hermitian_route(),
    })
}

/// `|P g|_sigma / |g|_sigma` with `P` the `sigma`-orthogonal projection onto
/// the span of `basis`.
pub fn subspace_alignment(basis: &[DiscreteDensity], g: &DiscreteDensity, weights: &[f64]) -> f64 {
    let mut ortho: Vec<DiscreteDensity> = Vec::with_capacity(basis.len());
    for b in basis {
        let mut v = b.clone();
        for q in &ortho {
            v = v.sub(&q.scale(q.inner_sigma(&v, weights)));
        }
        let n = v.norm_sigma(weights);
        if n > 1e-12 {
            ortho.push(v.scale(c64::new(1.0 / n, 0.0)));
        }
    }
    let gn = g.norm_sigma(weights);
    if gn == 0.0 {
        return 0.0;
    }
    let p2: f64 = ortho.iter().map(|q| q.inner_sigma(g, weights).norm_sqr()).sum();
    p2.sqrt() / gn
}

/// Which `omega` a potential uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `omega = lambda I`.
    ScalarLambda,
    /// `omega = lambda alpha.N`.
    NormalAlpha,
    /// `omega = r I + s C (alpha.N)`.
    CauchyCombo,
    /// `omega = lambda I + delta (i (1/2 - c) alpha.N + C)`.
    NeumannSmall,
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialKind::ScalarLambda => "scalar_lambda",
            PotentialKind::NormalAlpha => "normal_alpha",
            PotentialKind::CauchyCombo => "cauchy_combo",
            PotentialKind::NeumannSmall => "neumann_small",
        })
    }
}

impl FromStr for PotentialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "scalar_lambda" => Ok(PotentialKind::ScalarLambda),
            "normal_alpha" => Ok(PotentialKind::NormalAlpha),
            "cauchy_combo" => Ok(PotentialKind::CauchyCombo),
            "neumann_small" => Ok(PotentialKind::NeumannSmall),
            _ => Err(Error::InvalidArgument(format!("unknown potential kind `{s}`"))),
        }
    }
}

/// Shell potential `V(phi) = omega (c phi_+ + (1 - c) phi_-) sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub lambda: f64,
    pub r: f64,
    pub s: f64,
    pub delta: f64,
    pub c: c64,
}

impl PotentialSpec {
    pub fn scalar(lambda: f64, c: c64) -> Self {
        Self {
            kind: PotentialKind::ScalarLambda,
            lambda,
            r: 0.0,
            s: 0.0,
            delta: 0.0,
            c,
        }
    }

    pub fn normal_alpha(lambda: f64, c: c64) -> Self {
        Self {
            kind: PotentialKind::NormalAlpha,
            ..Self::scalar(lambda, c)
        }
    }

    pub fn cauchy_combo(r: f64, s: f64, c: c64) -> Self {
        Self {
            kind: PotentialKind::CauchyCombo,
            r,
            s,
            ..Self::scalar(0.0, c)
        }
    }

    pub fn neumann_small(lambda: f64, delta: f64, c: c64) -> Self {
        Self {
            kind: PotentialKind::NeumannSmall,
            delta,
            ..Self::scalar(lambda, c)
        }
    }

    fn describe(&self) -> String {
        format!(
            "kind={}, c={}{:+}i, lambda={}, r={}, s={}, delta={}",
            self.kind, self.c.re, self.c.im, self.lambda, self.r, self.s, self.delta
        )
    }
}

enum Omega {
    Scalar(f64),
    Matrix(BoundaryOperator),
}

fn omega_of(spec: &PotentialSpec, c: &BoundaryOperator, m: &BoundaryOperator) -> Result<Omega> {
    let one = c64::new(1.0, 0.0);
    let zero = c64::new(0.0, 0.0);
    Ok(match spec.kind {
        PotentialKind::ScalarLambda => Omega::Scalar(spec.lambda),
        PotentialKind::NormalAlpha => Omega::Matrix(m.shifted(zero, c64::new(spec.lambda, 0.0))),
        PotentialKind::CauchyCombo => Omega::Matrix(c.compose(m)?.shifted(c64::new(spec.r, 0.0), c64::new(spec.s, 0.0))),
        PotentialKind::NeumannSmall => {
            let y = c.combine(one, m, c64::new(0.0, 1.0) * (0.5 - spec.c))?;
            Omega::Matrix(y.shifted(c64::new(spec.lambda, 0.0), c64::new(spec.delta, 0.0)))
        }
    })
}

/// Condition-number guard for `tau` in the first construction.
pub const CONDITION_GUARD: f64 = 1e8;

fn as_dense(op: &BoundaryOperator, matrix: Mat<c64>) -> BoundaryOperator {
    BoundaryOperator {
        matrix,
        weights: op.weights.clone(),
        mesh_label: op.mesh_label.clone(),
        m: op.m,
        structure: Structure::Dense,
    }
}

/// `Lambda = -(alpha.N) tau^{-1} (omega + i(1/2 - c) omega^2 - C(alpha.N) omega^2)`
/// with `tau = I + i(1 - 2c) omega + c(1 - c) omega^2`, for `omega` commuting
/// with `C(alpha.N)`.
pub fn build_lambda_t4(c: &BoundaryOperator, m: &BoundaryOperator, spec: &PotentialSpec) -> Result<BoundaryOperator> {
    c.ensure_compatible(m)?;
    let i = c64::new(0.0, 1.0);
    let one = c64::new(1.0, 0.0);
    let cc = spec.c;
    match spec.kind {
        PotentialKind::ScalarLambda => {
            let l = spec.lambda;
            let tau = one + i * (one - cc * 2.0) * l + cc * (one - cc) * (l * l);
            if tau.norm() < 1.0 / CONDITION_GUARD {
                return Err(Error::SingularTau {
                    condition: f64::INFINITY,
                    guard: CONDITION_GUARD,
                    context: spec.describe(),
                });
            }
            // -(1/tau) [(l + i(1/2 - c) l^2) M - l^2 M C M]
            let mcm = m.compose(&c.compose(m)?)?;
            let first = -(c64::new(l, 0.0) + i * (0.5 - cc) * (l * l)) / tau;
            let second = c64::new(l * l, 0.0) / tau;
            m.combine(first, &mcm, second)
        }
        PotentialKind::CauchyCombo => {
            let x = c.compose(m)?;
            let omega = x.shifted(c64::new(spec.r, 0.0), c64::new(spec.s, 0.0));
            let omega2 = omega.compose(&omega)?;
            let tau = omega.combine(i * (one - cc * 2.0), &omega2, cc * (one - cc))?.shifted(one, one);
            let lu = tau.matrix.partial_piv_lu();
            let tau_inv = lu.inverse();
            let condition = dense::one_norm(tau.matrix.as_ref()) * dense::one_norm(tau_inv.as_ref());
            if !(condition <= CONDITION_GUARD) {
                return Err(Error::SingularTau {
                    condition,
                    guard: CONDITION_GUARD,
                    context: spec.describe(),
                });
            }
            let x_omega2 = x.compose(&omega2)?;
            let rhs = omega.combine(one, &omega2, i * (0.5 - cc))?.combine(one, &x_omega2, -one)?;
            let inner = as_dense(c, &tau_inv * &rhs.matrix);
            Ok(m.compose(&inner)?.shifted(c64::new(0.0, 0.0), -one))
        }
        other => Err(Error::UnsupportedPotential(other.to_string())),
    }
}

/// `4 lambda / (lambda^2 + 4) (lambda (alpha.N) C - I)(alpha.N)`, the closed
/// form of [`build_lambda_t4`] for `omega = lambda I`, `c = 1/2`.
pub fn lambda_t4_scalar_closed_form(c: &BoundaryOperator, m: &BoundaryOperator, lambda: f64) -> Result<BoundaryOperator> {
    let f = 4.0 * lambda / (lambda * lambda + 4.0);
    let inner = m.compose(c)?.shifted(c64::new(-1.0, 0.0), c64::new(lambda, 0.0));
    Ok(inner.compose(m)?.shifted(c64::new(0.0, 0.0), c64::new(f, 0.0)))
}

/// The coefficients `(p, q)` of `tau = p I + q C(alpha.N)` for
/// `omega = r I + s C(alpha.N)` as printed alongside that example:
/// `p = (2c-1) i r + c(c-1)(r^2 + s^2/4) - 1`, `q = (2c-1) i s + 2 r s c(c-1)`.
pub fn printed_tau_coefficients(r: f64, s: f64, c: c64) -> (c64, c64) {
    let i = c64::new(0.0, 1.0);
    let one = c64::new(1.0, 0.0);
    let p = (c * 2.0 - one) * i * r + c * (c - one) * (r * r + s * s / 4.0) - one;
    let q = (c * 2.0 - one) * i * s + c * (c - one) * (2.0 * r * s);
    (p, q)
}

/// `(p, q)` obtained by expanding `tau = I + i(1-2c) omega + c(1-c) omega^2`
/// with `(C(alpha.N))^2 = -I/4`.
pub fn tau_coefficients(r: f64, s: f64, c: c64) -> (c64, c64) {
    let i = c64::new(0.0, 1.0);
    let one = c64::new(1.0, 0.0);
    let p = one + i * (one - c * 2.0) * r + c * (one - c) * (r * r - s * s / 4.0);
    let q = i * (one - c * 2.0) * s + c * (one - c) * (2.0 * r * s);
    (p, q)
}

/// Output of [`build_lambda_t3`].
#[derive(Clone, Debug)]
pub struct LambdaT3 {
    pub operator: BoundaryOperator,
    pub omega_norm: f64,
    pub cauchy_norm: f64,
    /// `1/2 + |c| + ||C||`.
    pub neumann_factor: f64,
    /// `||omega|| (1/2 + |c| + ||C||)`, below 1 by construction.
    pub neumann_product: f64,
    /// `||L~ - L~^dagger||_F / ||L~||_F` with `L~ = W^{1/2} Lambda W^{-1/2}`.
    pub hermiticity_residual: f64,
}

/// Power iterations for the norm estimates.
pub const NORM_ITERATIONS: usize = 30;

/// `Lambda = -tau^{-1} omega` with `tau = I + omega (i(1/2 - c) alpha.N + C)`,
/// after checking the Neumann-series bound `||omega|| (1/2 + |c| + ||C||) < 1`.
pub fn build_lambda_t3(c: &BoundaryOperator, m: &BoundaryOperator, spec: &PotentialSpec) -> Result<LambdaT3> {
    c.ensure_compatible(m)?;
    let one = c64::new(1.0, 0.0);
    let y = c.combine(one, m, c64::new(0.0, 1.0) * (0.5 - spec.c))?;
    let omega = match omega_of(spec, c, m)? {
        Omega::Scalar(l) => c.identity_like().shifted(c64::new(0.0, 0.0), c64::new(l, 0.0)),
        Omega::Matrix(w) => w,
    };
    let omega_norm = match spec.kind {
        PotentialKind::ScalarLambda | PotentialKind::NormalAlpha => spec.lambda.abs(),
        _ => omega.operator_norm(NORM_ITERATIONS),
    };
    let cauchy_norm = c.operator_norm(NORM_ITERATIONS);
    let neumann_factor = 0.5 + spec.c.norm() + cauchy_norm;
    let neumann_product = omega_norm * neumann_factor;
    if !(neumann_product < 1.0) {
        return Err(Error::NeumannBound {
            omega_norm,
            factor: neumann_factor,
            product: neumann_product,
        });
    }
    let tau = omega.compose(&y)?.shifted(one, one);
    let sol = tau.matrix.partial_piv_lu().solve(&omega.matrix);
    let operator = as_dense(c, Mat::from_fn(sol.nrows(), sol.ncols(), |i, j| -sol[(i, j)]));
    let norm = operator.frobenius_norm();
    let hermiticity_residual = if norm == 0.0 {
        0.0
    } else {
        dense::anti_hermitian_norm(operator.w_similar().as_ref()) / dense::frobenius(operator.w_similar().as_ref())
    };
    Ok(LambdaT3 {
        operator,
        omega_norm,
        cauchy_norm,
        neumann_factor,
        neumann_product,
        hermiticity_residual,
    })
}

/// Defect `||(lambda/2)(phi_+ + phi_-) + g||_sigma` of the shell coupling
/// equation for `phi = u + Phi(g)`, with traces `phi_+- = u + C_+- g`.
pub fn potential_residual(
    c: &BoundaryOperator,
    m: &BoundaryOperator,
    lambda: f64,
    g: &DiscreteDensity,
    u_trace: &DiscreteDensity,
) -> Result<f64> {
    let (plus, minus) = traces(c, m, g, u_trace)?;
    let avg = plus.add(&minus).scale(c64::new(lambda / 2.0, 0.0));
    Ok(avg.add(g).norm_sigma(&c.weights))
}

/// `||-i(alpha.N)(phi_+ - phi_-) + g||_sigma`, zero by the jump relation.
pub fn jump_consistency_residual(
    c: &BoundaryOperator,
    m: &BoundaryOperator,
    g: &DiscreteDensity,
    u_trace: &DiscreteDensity,
) -> Result<f64> {
    let (plus, minus) = traces(c, m, g, u_trace)?;
    let v = m.apply(&plus.sub(&minus))?.scale(c64::new(0.0, -1.0));
    Ok(v.add(g).norm_sigma(&c.weights))
}

fn traces(
    c: &BoundaryOperator,
    m: &BoundaryOperator,
    g: &DiscreteDensity,
    u: &DiscreteDensity,
) -> Result<(DiscreteDensity, DiscreteDensity)> {
    c.ensure_compatible(m)?;
    if u.len() != g.len() {
        return Err(Error::MeshMismatch(g.mesh_label.clone(), u.mesh_label.clone()));
    }
    let cg = c.apply(g)?;
    let mg = m.apply(g)?.scale(c64::new(0.0, 0.5));
    // C_+ g = C g - (i/2) M g, C_- g = C g + (i/2) M g
    Ok((u.add(&cg.sub(&mg)), u.add(&cg.add(&mg))))
}
