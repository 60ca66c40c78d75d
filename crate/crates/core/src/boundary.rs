//! One-point Nystrom discretization of the Cauchy operator `C` on a
//! triangulated surface, the normal multiplication `M = alpha.N`, and the
//! operators built from them.
//!
//! Off-diagonal block `(i, j)` of `C` is `phi(x_i - x_j) area_j`. The diagonal
//! block keeps only the weakly singular `m beta / (4 pi r)` part of the kernel
//! integrated over a disk of the panel's area, `(m/2) sqrt(area/pi) beta`; the
//! odd parts cancel by symmetry.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use faer::{c64, Col, Mat};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{alpha_dot, beta, Spinor, SpinorMatrix};
use crate::dense;
use crate::error::{Error, Result};
use crate::kernel::{anticommutator_kernel_raw, phi_raw, KernelParams};
use crate::mesh::SurfaceMesh;

/// Dense assembly guard: `(4N)^2` complex entries at `N = 6000` is 9.2 GB.
pub const MAX_PANELS: usize = 6000;

/// Magic bytes opening a binary operator dump.
pub const DUMP_MAGIC: &[u8; 8] = b"DIRACOP1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Dense,
    BlockDiagonal,
}

/// A `(4N) x (4N)` operator on panel spinors, with the panel areas defining
/// the discrete `L^2(sigma)^4` inner product.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    pub matrix: Mat<c64>,
    pub weights: Vec<f64>,
    pub mesh_label: String,
    /// Mass the kernel was assembled with; `None` for mass-independent operators.
    pub m: Option<f64>,
    pub structure: Structure,
}

/// One spinor per panel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteDensity {
    pub values: Vec<Spinor>,
    pub mesh_label: String,
}

impl DiscreteDensity {
    pub fn new(values: Vec<Spinor>, mesh_label: impl Into<String>) -> Self {
        Self {
            values,
            mesh_label: mesh_label.into(),
        }
    }

    pub fn constant(mesh: &SurfaceMesh, s: Spinor) -> Self {
        Self::new(vec![s; mesh.len()], mesh.label.clone())
    }

    pub fn zeros(n: usize, mesh_label: impl Into<String>) -> Self {
        Self::new(vec![Spinor::zero(); n], mesh_label)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_col(&self) -> Col<c64> {
        Col::from_fn(4 * self.len(), |k| self.values[k / 4].0[k % 4])
    }

    pub fn from_col(col: &Col<c64>, mesh_label: impl Into<String>) -> Self {
        let n = col.nrows() / 4;
        let values = (0..n)
            .map(|i| Spinor(std::array::from_fn(|c| col[4 * i + c])))
            .collect();
        Self::new(values, mesh_label)
    }

    /// Rows of `re0 im0 re1 im1 re2 im2 re3 im3`.
    pub fn from_reals(rows: &[[f64; 8]], mesh_label: impl Into<String>) -> Self {
        let values = rows
            .iter()
            .map(|r| Spinor(std::array::from_fn(|c| c64::new(r[2 * c], r[2 * c + 1]))))
            .collect();
        Self::new(values, mesh_label)
    }

    pub fn to_reals(&self) -> Vec<[f64; 8]> {
        self.values
            .iter()
            .map(|s| std::array::from_fn(|k| if k % 2 == 0 { s.0[k / 2].re } else { s.0[k / 2].im }))
            .collect()
    }

    /// `<self, other>_sigma = sum_i area_i <self_i, other_i>`.
    pub fn inner_sigma(&self, other: &Self, weights: &[f64]) -> c64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(weights)
            .map(|((a, b), w)| a.inner(b) * *w)
            .sum()
    }

    pub fn norm_sigma(&self, weights: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(weights)
            .map(|(a, w)| a.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: c64) -> Self {
        Self::new(self.values.iter().map(|v| v.scale(s)).collect(), self.mesh_label.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect(),
            self.mesh_label.clone(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.values.iter().zip(&other.values).map(|(a, b)| *a - *b).collect(),
            self.mesh_label.clone(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(Spinor::is_finite)
    }
}

impl BoundaryOperator {
    pub fn n_panels(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn block(&self, i: usize, j: usize) -> SpinorMatrix {
        dense::block(self.matrix.as_ref(), i, j)
    }

    fn derived(&self, matrix: Mat<c64>, structure: Structure, m: Option<f64>) -> Self {
        Self {
            matrix,
            weights: self.weights.clone(),
            mesh_label: self.mesh_label.clone(),
            m,
            structure,
        }
    }

    fn mass_of(&self, other: &Self) -> Option<f64> {
        self.m.or(other.m)
    }

    /// Errors unless both operators live on the same mesh.
    pub fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if self.mesh_label != other.mesh_label || self.weights != other.weights {
            return Err(Error::MeshMismatch(self.mesh_label.clone(), other.mesh_label.clone()));
        }
        Ok(())
    }

    fn ensure_density(&self, g: &DiscreteDensity) -> Result<()> {
        if g.len() != self.n_panels() {
            return Err(Error::MeshMismatch(self.mesh_label.clone(), g.mesh_label.clone()));
        }
        Ok(())
    }

    pub fn identity_like(&self) -> Self {
        self.derived(dense::identity(self.dim()), Structure::BlockDiagonal, None)
    }

    /// `self * other`, exploiting block-diagonal structure on either side.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let m = self.mass_of(other);
        let n = self.n_panels();
        let matrix = match (self.structure, other.structure) {
            (_, Structure::BlockDiagonal) => {
                let mut out = Mat::<c64>::zeros(self.dim(), self.dim());
                out.par_col_chunks_mut(4).enumerate().for_each(|(j, mut cols)| {
                    let d = other.matrix.as_ref().submatrix(4 * j, 4 * j, 4, 4);
                    let a = self.matrix.as_ref().subcols(4 * j, 4);
                    cols.copy_from(a * d);
                });
                out
            }
            (Structure::BlockDiagonal, Structure::Dense) => {
                let mut out = Mat::<c64>::zeros(self.dim(), self.dim());
                for i in 0..n {
                    let d = self.matrix.as_ref().submatrix(4 * i, 4 * i, 4, 4);
                    let a = other.matrix.as_ref().subrows(4 * i, 4);
                    out.as_mut().subrows_mut(4 * i, 4).copy_from(d * a);
                }
                out
            }
            _ => &self.matrix * &other.matrix,
        };
        let structure = if self.structure == Structure::BlockDiagonal && other.structure == Structure::BlockDiagonal {
            Structure::BlockDiagonal
        } else {
            Structure::Dense
        };
        Ok(self.derived(matrix, structure, m))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: c64, other: &Self, b: c64) -> Result<Self> {
        self.ensure_compatible(other)?;
        let matrix = Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] * a + other.matrix[(i, j)] * b);
        let structure = if self.structure == Structure::BlockDiagonal && other.structure == Structure::BlockDiagonal {
            Structure::BlockDiagonal
        } else {
            Structure::Dense
        };
        Ok(self.derived(matrix, structure, self.mass_of(other)))
    }

    /// `a I + b self`.
    pub fn shifted(&self, a: c64, b: c64) -> Self {
        let matrix = Mat::from_fn(self.dim(), self.dim(), |i, j| {
            let v = self.matrix[(i, j)] * b;
            if i == j {
                v + a
            } else {
                v
            }
        });
        self.derived(matrix, self.structure, self.m)
    }

    pub fn apply(&self, g: &DiscreteDensity) -> Result<DiscreteDensity> {
        self.ensure_density(g)?;
        let out = &self.matrix * g.to_col();
        Ok(DiscreteDensity::from_col(&out, self.mesh_label.clone()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        dense::frobenius(self.matrix.as_ref())
    }

    pub fn max_abs(&self) -> f64 {
        dense::max_abs(self.matrix.as_ref())
    }

    /// Largest entry modulus outside the diagonal 4x4 blocks.
    pub fn max_abs_off_diagonal_blocks(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if i / 4 != j / 4 {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// `W^{1/2} A W^{-1/2}`: the matrix of the operator in an orthonormal
    /// basis of the weighted inner product.
    pub fn w_similar(&self) -> Mat<c64> {
        dense::w_similar(self.matrix.as_ref(), &self.weights)
    }

    /// `||S - S^dagger||_F / ||A||_F` with `S = W^{1/2} A W^{-1/2}`; zero for
    /// an operator self-adjoint in `L^2(sigma)^4`.
    pub fn w_symmetry_residual(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        dense::anti_hermitian_norm(self.w_similar().as_ref()) / norm
    }

    /// Operator norm in `L^2(sigma)^4`, by power iteration.
    pub fn operator_norm(&self, iterations: usize) -> f64 {
        dense::power_norm(self.w_similar().as_ref(), iterations)
    }

    /// Writes the matrix. `.txt` paths get the text form, anything else the
    /// binary form; see [`read_dump`].
    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = path.extension().is_some_and(|e| e == "txt");
        let mut w = BufWriter::new(File::create(path)?);
        let (rows, cols) = (self.matrix.nrows(), self.matrix.ncols());
        if text {
            writeln!(w, "# dirac-shell operator {rows} {cols}")?;
            for i in 0..rows {
                let mut line = String::with_capacity(cols * 48);
                for j in 0..cols {
                    if j > 0 {
                        line.push(' ');
                    }
                    let z = self.matrix[(i, j)];
                    line.push_str(&format!("{:?} {:?}", z.re, z.im));
                }
                writeln!(w, "{line}")?;
            }
        } else {
            w.write_all(DUMP_MAGIC)?;
            w.write_all(&(rows as u64).to_le_bytes())?;
            w.write_all(&(cols as u64).to_le_bytes())?;
            for i in 0..rows {
                for j in 0..cols {
                    let z = self.matrix[(i, j)];
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a matrix written by [`BoundaryOperator::dump`] (either form).
pub fn read_dump(path: impl AsRef<Path>) -> Result<Mat<c64>> {
    let path = path.as_ref();
    let mut head = [0u8; 8];
    let mut f = File::open(path)?;
    let got = f.read(&mut head)?;
    if got == 8 && &head == DUMP_MAGIC {
        let mut buf = [0u8; 8];
        f.read_exact(&mut buf)?;
        let rows = u64::from_le_bytes(buf) as usize;
        f.read_exact(&mut buf)?;
        let cols = u64::from_le_bytes(buf) as usize;
        let mut data = Vec::with_capacity(rows * cols * 16);
        f.read_to_end(&mut data)?;
        if data.len() != rows * cols * 16 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("dump payload has {} bytes, expected {}", data.len(), rows * cols * 16),
            });
        }
        let at = |k: usize| f64::from_le_bytes(data[8 * k..8 * k + 8].try_into().expect("8 bytes"));
        return Ok(Mat::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            c64::new(at(k), at(k + 1))
        }));
    }
    let reader = BufReader::new(File::open(path)?);
    let mut rows_data: Vec<Vec<c64>> = Vec::new();
    let mut shape = None;
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# dirac-shell operator") {
            let dims: Vec<usize> = rest.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            if dims.len() == 2 {
                shape = Some((dims[0], dims[1]));
            }
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| Error::Parse {
                    line: k + 1,
                    msg: format!("bad number `{t}`"),
                })
            })
            .collect::<Result<_>>()?;
        rows_data.push(vals.chunks(2).map(|p| c64::new(p[0], *p.get(1).unwrap_or(&0.0))).collect());
    }
    let (rows, cols) = shape.ok_or(Error::Parse {
        line: 1,
        msg: "missing `# dirac-shell operator` header".into(),
    })?;
    if rows_data.len() != rows || rows_data.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse {
            line: 0,
            msg: "text dump shape does not match its header".into(),
        });
    }
    Ok(Mat::from_fn(rows, cols, |i, j| rows_data[i][j]))
}

fn check_mesh(mesh: &SurfaceMesh) -> Result<()> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if mesh.len() > MAX_PANELS {
        return Err(Error::PanelGuard {
            count: mesh.len(),
            max: MAX_PANELS,
        });
    }
    Ok(())
}

fn check_coincident(mesh: &SurfaceMesh) -> Result<()> {
    let p = &mesh.panels;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d = [
                p[i].centroid[0] - p[j].centroid[0],
                p[i].centroid[1] - p[j].centroid[1],
                p[i].centroid[2] - p[j].centroid[2],
            ];
            let tol = 1e-12 * p[i].diameter.max(p[j].diameter);
            if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() < tol {
                return Err(Error::CoincidentCentroids(i, j));
            }
        }
    }
    Ok(())
}

/// Diagonal block of the discretized Cauchy operator for a panel of the
/// given area.
pub fn cauchy_self_term(area: f64, m: f64) -> SpinorMatrix {
    beta().scale_real(0.5 * m * (area / PI).sqrt())
}

fn fill_blocks(n: usize, f: impl Fn(usize, usize) -> SpinorMatrix + Sync) -> Mat<c64> {
    let mut out = Mat::<c64>::zeros(4 * n, 4 * n);
    out.par_col_chunks_mut(4).enumerate().for_each(|(j, mut cols)| {
        for i in 0..n {
            let b = f(i, j);
            for c in 0..4 {
                for r in 0..4 {
                    cols[(4 * i + r, c)] = b.0[r][c];
                }
            }
        }
    });
    out
}

fn label_weights(mesh: &SurfaceMesh) -> (String, Vec<f64>) {
    (mesh.label.clone(), mesh.areas())
}

/// Discretized Cauchy operator `C`.
pub fn assemble_cauchy(mesh: &SurfaceMesh, p: KernelParams) -> Result<BoundaryOperator> {
    check_mesh(mesh)?;
    check_coincident(mesh)?;
    let m = p.m();
    let panels = &mesh.panels;
    let matrix = fill_blocks(mesh.len(), |i, j| {
        if i == j {
            return cauchy_self_term(panels[i].area, m);
        }
        let (x, z) = (panels[i].centroid, panels[j].centroid);
        phi_raw([x[0] - z[0], x[1] - z[1], x[2] - z[2]], m).scale_real(panels[j].area)
    });
    let (mesh_label, weights) = label_weights(mesh);
    log::debug!("assembled C on `{mesh_label}` ({} panels, m = {m})", mesh.len());
    Ok(BoundaryOperator {
        matrix,
        weights,
        mesh_label,
        m: Some(m),
        structure: Structure::Dense,
    })
}

/// Block-diagonal `alpha.N(x_i)`.
pub fn assemble_normal_mult(mesh: &SurfaceMesh) -> Result<BoundaryOperator> {
    check_mesh(mesh)?;
    let n = mesh.len();
    let mut matrix = Mat::<c64>::zeros(4 * n, 4 * n);
    for (i, p) in mesh.panels.iter().enumerate() {
        let b = alpha_dot(p.normal);
        for r in 0..4 {
            for c in 0..4 {
                matrix[(4 * i + r, 4 * i + c)] = b.0[r][c];
            }
        }
    }
    let (mesh_label, weights) = label_weights(mesh);
    Ok(BoundaryOperator {
        matrix,
        weights,
        mesh_label,
        m: None,
        structure: Structure::BlockDiagonal,
    })
}

/// `(C+, C-) = (-(i/2) M + C, (i/2) M + C)`, the inside and outside limits of
/// the single-layer field (inside is the region the normal points away from).
pub fn jump_operators(c: &BoundaryOperator, m: &BoundaryOperator) -> Result<(BoundaryOperator, BoundaryOperator)> {
    let one = c64::new(1.0, 0.0);
    let plus = c.combine(one, m, c64::new(0.0, -0.5))?;
    let minus = c.combine(one, m, c64::new(0.0, 0.5))?;
    Ok((plus, minus))
}

/// `CM`, `(CM)^2` and the relative Frobenius residual of `-4 (CM)^2 = I`.
pub struct CliffordProducts {
    pub cm: BoundaryOperator,
    pub cm_squared: BoundaryOperator,
    pub residual: f64,
}

fn identity_residual(sq: &Mat<c64>) -> f64 {
    let n = sq.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let mut v = sq[(i, j)] * 4.0;
            if i == j {
                v += 1.0;
            }
            acc += v.norm_sqr();
        }
    }
    acc.sqrt() / (n as f64).sqrt()
}

pub fn clifford_products(c: &BoundaryOperator, m: &BoundaryOperator) -> Result<CliffordProducts> {
    let cm = c.compose(m)?;
    let cm_squared = cm.compose(&cm)?;
    let residual = identity_residual(&cm_squared.matrix);
    Ok(CliffordProducts {
        cm,
        cm_squared,
        residual,
    })
}

/// `||4 (CM)^2 + I||_F / ||I||_F`.
pub fn clifford_identity_residual(c: &BoundaryOperator, m: &BoundaryOperator) -> Result<f64> {
    Ok(clifford_products(c, m)?.residual)
}

/// `||4 (MC)^2 + I||_F / ||I||_F`.
pub fn clifford_identity_residual_mc(c: &BoundaryOperator, m: &BoundaryOperator) -> Result<f64> {
    let mc = m.compose(c)?;
    Ok(identity_residual(&mc.compose(&mc)?.matrix))
}

/// `MC + CM`.
pub fn assemble_anticommutator(c: &BoundaryOperator, m: &BoundaryOperator) -> Result<BoundaryOperator> {
    let one = c64::new(1.0, 0.0);
    m.compose(c)?.combine(one, &c.compose(m)?, one)
}

/// `MC + CM` assembled from its own kernel; diagonal blocks are zero in both
/// forms since `alpha.N` anticommutes with the self-term.
pub fn assemble_anticommutator_direct(mesh: &SurfaceMesh, p: KernelParams) -> Result<BoundaryOperator> {
    check_mesh(mesh)?;
    check_coincident(mesh)?;
    let m = p.m();
    let panels = &mesh.panels;
    let matrix = fill_blocks(mesh.len(), |i, j| {
        if i == j {
            return SpinorMatrix::zero();
        }
        let (x, z) = (panels[i].centroid, panels[j].centroid);
        let d = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
        anticommutator_kernel_raw(d, panels[i].normal, panels[j].normal, m).scale_real(panels[j].area)
    });
    let (mesh_label, weights) = label_weights(mesh);
    Ok(BoundaryOperator {
        matrix,
        weights,
        mesh_label,
        m: Some(m),
        structure: Structure::Dense,
    })
}

/// `K = C M (MC + CM)`, equal to `C^2 + (CM)^2` when `M^2 = I`.
pub fn assemble_k(c: &BoundaryOperator, m: &BoundaryOperator) -> Result<BoundaryOperator> {
    let anti = assemble_anticommutator(c, m)?;
    c.compose(m)?.compose(&anti)
}

/// Relative Frobenius size of
/// `(1/lambda + C)(1/lambda - C) - [(1/lambda^2 - 1/4) I - K + ((CM)^2 + I/4)]`,
/// which vanishes up to rounding at any resolution.
pub fn factorization_residual(c: &BoundaryOperator, m: &BoundaryOperator, lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite and nonzero, got {lambda}")));
    }
    let inv = c64::new(1.0 / lambda, 0.0);
    let one = c64::new(1.0, 0.0);
    let lhs = c.shifted(inv, one).compose(&c.shifted(inv, -one))?;
    let k = assemble_k(c, m)?;
    let cp = clifford_products(c, m)?;
    let a = 1.0 / (lambda * lambda) - 0.25;
    let rhs = k
        .shifted(c64::new(a, 0.0), -one)
        .combine(one, &cp.cm_squared.shifted(c64::new(0.25, 0.0), one), one)?;
    let diff = lhs.combine(one, &rhs, -one)?;
    Ok(diff.frobenius_norm() / lhs.frobenius_norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::alpha;
    use crate::kernel::phi;
    use crate::mesh::{make_flat_patch, make_sphere, make_tetrahedron};

    fn params() -> KernelParams {
        KernelParams::new(1.0).unwrap()
    }

    #[test]
    fn two_panel_block_is_one_point_rule() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [3.0, 0.0, 0.0], [4.0, 0.0, 0.5], [3.0, 1.0, 0.0]];
        let mesh = SurfaceMesh::from_triangles(v, vec![[0, 1, 2], [3, 4, 5]], "two").unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let (x1, x2) = (mesh.panels[0].centroid, mesh.panels[1].centroid);
        let expected = phi([x1[0] - x2[0], x1[1] - x2[1], x1[2] - x2[2]], params())
            .unwrap()
            .scale_real(mesh.panels[1].area);
        assert_eq!(c.block(0, 1), expected);
        assert_eq!(c.block(0, 0), cauchy_self_term(mesh.panels[0].area, 1.0));
    }

    #[test]
    fn cauchy_is_w_symmetric() {
        let mesh = make_sphere(1, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        assert!(c.w_symmetry_residual() < 1e-14);
        for (i, j) in [(0, 5), (7, 3), (40, 79)] {
            let lhs = c.block(i, j);
            let rhs = c.block(j, i).adjoint().scale_real(mesh.panels[j].area / mesh.panels[i].area);
            assert!((lhs - rhs).max_abs() < 1e-15);
        }
    }

    #[test]
    fn normal_mult_properties() {
        let patch = make_flat_patch(1.0, 3).unwrap();
        let m = assemble_normal_mult(&patch).unwrap();
        let minus_a3 = -alpha(3).unwrap();
        for i in 0..patch.len() {
            assert_eq!(m.block(i, i), minus_a3);
        }
        let sphere = make_sphere(1, 1.0).unwrap();
        let m = assemble_normal_mult(&sphere).unwrap();
        let sq = m.compose(&m).unwrap();
        assert!((&sq.matrix - dense::identity(m.dim())).norm_max() < 1e-15);
        assert!(m.w_symmetry_residual() == 0.0);
    }

    #[test]
    fn jump_operator_identities_exact() {
        let mesh = make_sphere(1, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let m = assemble_normal_mult(&mesh).unwrap();
        let (cp, cm) = jump_operators(&c, &m).unwrap();
        let d = cp.combine(c64::new(1.0, 0.0), &cm, c64::new(-1.0, 0.0)).unwrap();
        let target = m.shifted(c64::new(0.0, 0.0), c64::new(0.0, -1.0));
        assert_eq!((&d.matrix - &target.matrix).norm_max(), 0.0);
        let s = cp.combine(c64::new(1.0, 0.0), &cm, c64::new(1.0, 0.0)).unwrap();
        assert_eq!((&s.matrix - &c.matrix - &c.matrix).norm_max(), 0.0);
        // constant density: C+ g - C- g = -i (alpha.N) g
        let g = DiscreteDensity::constant(&mesh, Spinor::from_real([1.0, 0.5, -0.25, 2.0]));
        let jump = cp.apply(&g).unwrap().sub(&cm.apply(&g).unwrap());
        let expect = m.apply(&g).unwrap().scale(c64::new(0.0, -1.0));
        assert!(jump.sub(&expect).norm_sigma(&c.weights) < 1e-14);
    }

    #[test]
    fn mesh_mismatch_rejected() {
        let a = assemble_cauchy(&make_sphere(0, 1.0).unwrap(), params()).unwrap();
        let b = assemble_normal_mult(&make_sphere(1, 1.0).unwrap()).unwrap();
        assert!(matches!(jump_operators(&a, &b), Err(Error::MeshMismatch(..))));
        assert!(matches!(clifford_identity_residual(&a, &b), Err(Error::MeshMismatch(..))));
    }

    #[test]
    fn coincident_centroids_rejected() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let mesh = SurfaceMesh::from_triangles(v, vec![[0, 1, 2], [0, 2, 1]], "dup").unwrap();
        assert!(matches!(assemble_cauchy(&mesh, params()), Err(Error::CoincidentCentroids(0, 1))));
    }

    #[test]
    fn flat_patch_anticommutator_vanishes() {
        let patch = make_flat_patch(1.0, 4).unwrap();
        let c = assemble_cauchy(&patch, params()).unwrap();
        let m = assemble_normal_mult(&patch).unwrap();
        assert!(assemble_anticommutator(&c, &m).unwrap().max_abs() <= 1e-13);
        assert!(assemble_anticommutator_direct(&patch, params()).unwrap().max_abs() <= 1e-13);
        assert!(assemble_k(&c, &m).unwrap().frobenius_norm() <= 1e-12);
    }

    #[test]
    fn direct_anticommutator_matches_product_form() {
        let mesh = make_sphere(1, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let m = assemble_normal_mult(&mesh).unwrap();
        let a = assemble_anticommutator(&c, &m).unwrap();
        let d = assemble_anticommutator_direct(&mesh, params()).unwrap();
        assert!((&a.matrix - &d.matrix).norm_max() <= 1e-12);
        for i in 0..mesh.len() {
            assert!(a.block(i, i).max_abs() < 1e-16);
        }
    }

    #[test]
    fn sphere_anticommutator_nonzero() {
        let mesh = make_sphere(2, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let m = assemble_normal_mult(&mesh).unwrap();
        let a = assemble_anticommutator(&c, &m).unwrap();
        assert!(a.operator_norm(30) > 1e-3);
    }

    #[test]
    fn clifford_residual_mc_matches_cm() {
        let mesh = make_sphere(1, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let m = assemble_normal_mult(&mesh).unwrap();
        let r1 = clifford_identity_residual(&c, &m).unwrap();
        let r2 = clifford_identity_residual_mc(&c, &m).unwrap();
        assert!((r1 - r2).abs() < 1e-10);
        let t = make_tetrahedron();
        let ct = assemble_cauchy(&t, params()).unwrap();
        let mt = assemble_normal_mult(&t).unwrap();
        assert!(clifford_identity_residual(&ct, &mt).unwrap().is_finite());
    }

    #[test]
    fn factorization_is_exact_algebra() {
        let mesh = make_sphere(1, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let m = assemble_normal_mult(&mesh).unwrap();
        for lambda in [0.7, 2.3, -1.1] {
            assert!(factorization_residual(&c, &m, lambda).unwrap() < 1e-12);
        }
        assert!(factorization_residual(&c, &m, 0.0).is_err());
    }

    #[test]
    fn dump_round_trip_both_forms() {
        let mesh = make_sphere(0, 1.0).unwrap();
        let c = assemble_cauchy(&mesh, params()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for name in ["c.bin", "c.txt"] {
            let p = dir.path().join(name);
            c.dump(&p).unwrap();
            let back = read_dump(&p).unwrap();
            assert_eq!(back, c.matrix);
        }
        let raw = std::fs::read(dir.path().join("c.bin")).unwrap();
        assert_eq!(&raw[..8], DUMP_MAGIC);
        assert_eq!(u64::from_le_bytes(raw[8..16].try_into().unwrap()), 80);
        assert_eq!(raw.len(), 24 + 80 * 80 * 16);
    }

    #[test]
    fn density_reals_round_trip() {
        let g = DiscreteDensity::new(
            vec![Spinor::new([c64::new(1.0, 2.0), c64::new(3.0, 4.0), c64::new(5.0, 6.0), c64::new(7.0, 8.0)])],
            "x",
        );
        let r = g.to_reals();
        assert_eq!(r[0], [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(DiscreteDensity::from_reals(&r, "x"), g);
    }
}
