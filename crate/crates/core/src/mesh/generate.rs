use std::collections::HashMap;

use super::{norm, SurfaceMesh, Vec3};
use crate::error::{Error, Result};

/// Subdivision guard for [`make_sphere`]; level 7 is 327680 panels.
pub const MAX_SPHERE_LEVEL: u32 = 7;

fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let v = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (v, f)
}

fn project(p: Vec3, radius: f64) -> Vec3 {
    let n = norm(p);
    [p[0] * radius / n, p[1] * radius / n, p[2] * radius / n]
}

/// Icosahedron subdivided `level` times (each triangle into four), vertices
/// projected onto the sphere of the given radius about the origin.
pub fn make_sphere(level: u32, radius: f64) -> Result<SurfaceMesh> {
    if level > MAX_SPHERE_LEVEL {
        return Err(Error::LevelGuard {
            level,
            max: MAX_SPHERE_LEVEL,
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("sphere radius must be positive, got {radius}")));
    }
    let (v0, mut faces) = icosahedron();
    let mut verts: Vec<Vec3> = v0.into_iter().map(|p| project(p, radius)).collect();
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = if a < b { (a, b) } else { (b, a) };
                m[k] = *mid.entry(key).or_insert_with(|| {
                    let (pa, pb) = (verts[a], verts[b]);
                    verts.push(project(
                        [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0, (pa[2] + pb[2]) / 2.0],
                        radius,
                    ));
                    verts.len() - 1
                });
            }
            next.push([f[0], m[0], m[2]]);
            next.push([f[1], m[1], m[0]]);
            next.push([f[2], m[2], m[1]]);
            next.push([m[0], m[1], m[2]]);
        }
        faces = next;
    }
    let label = if radius == 1.0 {
        format!("sphere:{level}")
    } else {
        format!("sphere:{level},{radius}")
    };
    SurfaceMesh::from_triangles(verts, faces, label)
}

/// `2 n^2` triangles tiling `[-w, w]^2 x {0}`, every normal `(0, 0, -1)`.
pub fn make_flat_patch(half_width: f64, n_per_side: usize) -> Result<SurfaceMesh> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidArgument(format!("patch half-width must be positive, got {half_width}")));
    }
    if n_per_side == 0 {
        return Err(Error::InvalidArgument("patch needs at least one cell per side".into()));
    }
    let n = n_per_side;
    let step = 2.0 * half_width / n as f64;
    let mut verts = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            verts.push([-half_width + i as f64 * step, -half_width + j as f64 * step, 0.0]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            // clockwise seen from +z so the normal is -z
            faces.push([id(i, j), id(i, j + 1), id(i + 1, j)]);
            faces.push([id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)]);
        }
    }
    SurfaceMesh::from_triangles_as_is(verts, faces, format!("patch:{half_width},{n}"))
}

/// Regular tetrahedron with edge `sqrt(2)` (alternate cube corners).
pub fn make_tetrahedron() -> SurfaceMesh {
    let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let v = v.into_iter().map(|p: Vec3| p.map(|c| c * 0.5)).collect();
    let f = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    SurfaceMesh::from_triangles(v, f, "tetrahedron").expect("valid tetrahedron")
}

/// Regular octahedron with vertices on the unit axes.
pub fn make_octahedron() -> SurfaceMesh {
    let v = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let f = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    SurfaceMesh::from_triangles(v, f, "octahedron").expect("valid octahedron")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn icosahedron_area_close_to_sphere() {
        let s = make_sphere(0, 1.0).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.closed);
        // icosahedron inscribed in the unit sphere: edge 4/sqrt(10 + 2 sqrt 5)
        let edge = 4.0 / (10.0 + 2.0 * 5f64.sqrt()).sqrt();
        let exact = 20.0 * 3f64.sqrt() / 4.0 * edge * edge;
        assert!((s.total_area() - exact).abs() < 1e-13);
        assert!((s.total_area() - 4.0 * PI).abs() / (4.0 * PI) < 0.25);
        assert_eq!(s.euler_characteristic(), 2);
        assert!(s.signed_volume() > 0.0);
    }

    #[test]
    fn level_three_area_and_counts() {
        let s = make_sphere(3, 1.0).unwrap();
        assert_eq!(s.len(), 1280);
        assert!((s.total_area() - 4.0 * PI).abs() / (4.0 * PI) < 5e-3);
        assert_eq!(s.euler_characteristic(), 2);
        assert!(s.is_consistently_oriented());
        for p in &s.panels {
            assert!(super::super::dot(p.normal, p.centroid) > 0.0);
        }
    }

    #[test]
    fn area_error_decreases_with_level() {
        let errs: Vec<f64> = (0..=4)
            .map(|l| (make_sphere(l, 1.0).unwrap().total_area() - 4.0 * PI).abs())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn radius_scales_area() {
        let a = make_sphere(2, 1.0).unwrap();
        let b = make_sphere(2, 1.7).unwrap();
        for (p, q) in a.panels.iter().zip(&b.panels) {
            assert!((q.area - 1.7 * 1.7 * p.area).abs() < 1e-13);
        }
    }

    #[test]
    fn level_guard() {
        assert!(matches!(make_sphere(8, 1.0), Err(Error::LevelGuard { level: 8, max: 7 })));
        assert!(make_sphere(1, 0.0).is_err());
    }

    #[test]
    fn flat_patch_geometry() {
        let p = make_flat_patch(1.0, 2).unwrap();
        assert_eq!(p.len(), 8);
        assert!(!p.closed);
        assert!((p.total_area() - 4.0).abs() < 1e-14);
        for q in &p.panels {
            assert_eq!(q.normal, [0.0, 0.0, -1.0]);
            assert_eq!(q.centroid[2], 0.0);
        }
    }

    #[test]
    fn platonic_solids() {
        let t = make_tetrahedron();
        assert_eq!(t.len(), 4);
        assert!((t.total_area() - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        assert!(t.signed_volume() > 0.0);
        let o = make_octahedron();
        assert_eq!(o.euler_characteristic(), 2);
        assert_eq!(o.edge_count(), 12);
        assert!(o.signed_volume() > 0.0);
    }
}
