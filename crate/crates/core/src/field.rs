//! Off-surface single-layer field `Phi(g)(y) = int phi(y - z) g(z) dsigma(z)`
//! and the checks tying it to the trace operators.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{alpha_dot, Spinor};
use crate::boundary::{BoundaryOperator, DiscreteDensity};
use crate::error::{Error, Result};
use crate::kernel::{phi_raw, KernelParams};
use crate::mesh::{cross, dot, norm, sub, Panel, SurfaceMesh, Vec3};
use crate::sphere::phi_lambda;
use crate::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct FieldOptions {
    /// Panels closer than `near_factor * h` to the point are integrated with
    /// adaptive subdivision; the rest with the centroid rule.
    pub near_factor: f64,
    /// A sub-triangle is split while its centroid is closer than
    /// `split_factor` times its diameter.
    pub split_factor: f64,
    pub max_depth: u32,
    /// Points closer than `too_close * h` to a panel are rejected.
    pub too_close: f64,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            near_factor: 3.0,
            split_factor: 3.0,
            max_depth: 10,
            too_close: 1e-3,
        }
    }
}

// interior three-point rule, exact for quadratics
const RULE: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

fn lerp(v: &[Vec3; 3], l: [f64; 3]) -> Vec3 {
    std::array::from_fn(|k| l[0] * v[0][k] + l[1] * v[1][k] + l[2] * v[2][k])
}

fn mid(a: Vec3, b: Vec3) -> Vec3 {
    std::array::from_fn(|k| 0.5 * (a[k] + b[k]))
}

fn diameter(v: &[Vec3; 3]) -> f64 {
    norm(sub(v[0], v[1])).max(norm(sub(v[1], v[2]))).max(norm(sub(v[2], v[0])))
}

fn triangle_integral(y: Vec3, v: [Vec3; 3], g: &Spinor, m: f64, opts: &FieldOptions, depth: u32) -> Spinor {
    let c = lerp(&v, [1.0 / 3.0; 3]);
    if depth >= opts.max_depth || norm(sub(y, c)) > opts.split_factor * diameter(&v) {
        let area = 0.5 * norm(cross(sub(v[1], v[0]), sub(v[2], v[0])));
        let mut acc = Spinor::zero();
        for l in RULE {
            acc += phi_raw(sub(y, lerp(&v, l)), m).apply(g);
        }
        return acc.scale_real(area / 3.0);
    }
    let (ab, bc, ca) = (mid(v[0], v[1]), mid(v[1], v[2]), mid(v[2], v[0]));
    [[v[0], ab, ca], [ab, v[1], bc], [ca, bc, v[2]], [ab, bc, ca]]
        .into_iter()
        .fold(Spinor::zero(), |acc, t| acc + triangle_integral(y, t, g, m, opts, depth + 1))
}

/// Euclidean distance from `y` to the closed triangle.
pub fn point_triangle_distance(y: Vec3, v: &[Vec3; 3]) -> f64 {
    let (a, b, c) = (v[0], v[1], v[2]);
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(y, a));
    let (d1, d2) = (dot(ab, ap), dot(ac, ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return norm(ap);
    }
    let bp = sub(y, b);
    let (d3, d4) = (dot(ab, bp), dot(ac, bp));
    if d3 >= 0.0 && d4 <= d3 {
        return norm(bp);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return norm(sub(y, std::array::from_fn(|k| a[k] + t * ab[k])));
    }
    let cp = sub(y, c);
    let (d5, d6) = (dot(ab, cp), dot(ac, cp));
    if d6 >= 0.0 && d5 <= d6 {
        return norm(cp);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return norm(sub(y, std::array::from_fn(|k| a[k] + t * ac[k])));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return norm(sub(y, std::array::from_fn(|k| b[k] + t * (c[k] - b[k]))));
    }
    let denom = 1.0 / (va + vb + vc);
    let (s, t) = (vb * denom, vc * denom);
    norm(sub(y, std::array::from_fn(|k| a[k] + s * ab[k] + t * ac[k])))
}

/// `Phi(g)(y)` for a piecewise-constant density.
pub fn single_layer(
    mesh: &SurfaceMesh,
    g: &DiscreteDensity,
    y: Vec3,
    p: KernelParams,
    opts: &FieldOptions,
) -> Result<Spinor> {
    if g.len() != mesh.len() {
        return Err(Error::MeshMismatch(mesh.label.clone(), g.mesh_label.clone()));
    }
    let h = mesh.mean_diameter();
    let limit = opts.too_close * h;
    let m = p.m();
    let mut acc = Spinor::zero();
    for (j, panel) in mesh.panels.iter().enumerate() {
        let d = norm(sub(y, panel.centroid));
        if d > opts.near_factor * h {
            acc += phi_raw(sub(y, panel.centroid), m).apply(&g.values[j]).scale_real(panel.area);
            continue;
        }
        let dist = point_triangle_distance(y, &panel.vertices);
        if dist < limit {
            return Err(Error::TooClose {
                panel: j,
                distance: dist,
                limit,
            });
        }
        acc += triangle_integral(y, panel.vertices, &g.values[j], m, opts, 0);
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct OffsetRow {
    /// Offset from the centroid along the normal.
    pub t: f64,
    /// Max over sampled panels and both sides of `|Phi(g)(y) - (C_+- g)_i| / |(C_+- g)_i|`.
    pub max_deviation: f64,
    pub mean_deviation: f64,
    /// Max over sampled panels of
    /// `|Phi(g)(x - tN) - Phi(g)(x + tN) + i(alpha.N) g| / |g|`.
    pub jump_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldCheckReport {
    pub mesh_label: String,
    pub h: f64,
    pub sampled_panels: Vec<usize>,
    pub rows: Vec<OffsetRow>,
}

impl FieldCheckReport {
    pub fn deviations_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_deviation < w[0].max_deviation)
    }
}

/// `count` panel indices spread evenly over the mesh.
pub fn sample_panels(n: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, n.max(1));
    (0..count).map(|k| ((2 * k + 1) * n / (2 * count)).min(n - 1)).collect()
}

/// Compares `Phi(g)(x_i -+ t N_i)` with `(C_+- g)_i` at the sampled panels.
/// `+` is the side `N` points away from: with outward normals, the inside.
pub fn field_check(
    mesh: &SurfaceMesh,
    c: &BoundaryOperator,
    m_op: &BoundaryOperator,
    g: &DiscreteDensity,
    p: KernelParams,
    offsets: &[f64],
    samples: usize,
    opts: &FieldOptions,
) -> Result<FieldCheckReport> {
    c.ensure_compatible(m_op)?;
    if c.n_panels() != mesh.len() || g.len() != mesh.len() {
        return Err(Error::MeshMismatch(mesh.label.clone(), c.mesh_label.clone()));
    }
    let h = mesh.mean_diameter();
    let sampled = sample_panels(mesh.len(), samples);
    let cg = c.apply(g)?;
    let mg = m_op.apply(g)?;
    let i_half = Complex64::new(0.0, 0.5);
    let mut rows = Vec::with_capacity(offsets.len());
    for &factor in offsets {
        let t = factor * h;
        let per_panel = sampled
            .par_iter()
            .map(|&i| {
                let panel: &Panel = &mesh.panels[i];
                let shift = |s: f64| -> Vec3 { std::array::from_fn(|k| panel.centroid[k] + s * t * panel.normal[k]) };
                let inside = single_layer(mesh, g, shift(-1.0), p, opts)?;
                let outside = single_layer(mesh, g, shift(1.0), p, opts)?;
                let c_plus = cg.values[i] - mg.values[i].scale(i_half);
                let c_minus = cg.values[i] + mg.values[i].scale(i_half);
                let dev_in = (inside - c_plus).norm() / c_plus.norm();
                let dev_out = (outside - c_minus).norm() / c_minus.norm();
                let jump = inside - outside + alpha_dot(panel.normal).apply(&g.values[i]).scale(Complex64::new(0.0, 1.0));
                Ok((dev_in, dev_out, jump.norm() / g.values[i].norm()))
            })
            .collect::<Result<Vec<_>>>()?;
        let devs: Vec<f64> = per_panel.iter().flat_map(|d| [d.0, d.1]).collect();
        rows.push(OffsetRow {
            t,
            max_deviation: devs.iter().copied().fold(0.0, f64::max),
            mean_deviation: devs.iter().sum::<f64>() / devs.len() as f64,
            jump_deviation: per_panel.iter().map(|d| d.2).fold(0.0, f64::max),
        });
    }
    Ok(FieldCheckReport {
        mesh_label: mesh.label.clone(),
        h,
        sampled_panels: sampled,
        rows,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReproducingReport {
    pub x: Vec3,
    pub lambda: f64,
    /// `|int phi(x - z)(i alpha.N) f(z) dsigma - f(x)| / |f(x)|`.
    pub relative_residual: f64,
}

/// Reproducing formula inside the unit sphere for `f = phi_lambda`, with the
/// boundary values taken at the panel centroids.
pub fn reproducing_check(mesh: &SurfaceMesh, x: Vec3, lambda: f64, p: KernelParams) -> Result<ReproducingReport> {
    let expected = phi_lambda(x, lambda, p)?;
    let mut acc = Spinor::zero();
    for panel in &mesh.panels {
        let f = phi_lambda(panel.centroid, lambda, p)?;
        let w = alpha_dot(panel.normal).apply(&f).scale(Complex64::new(0.0, 1.0));
        acc += phi_raw(sub(x, panel.centroid), p.m()).apply(&w).scale_real(panel.area);
    }
    Ok(ReproducingReport {
        x,
        lambda,
        relative_residual: (acc - expected).norm() / expected.norm(),
    })
}
