//! Triangulated surfaces carrying the one-point quadrature data (centroid,
//! area, unit normal) of the discrete surface measure.

mod generate;
mod off;
mod spec;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

pub use generate::{make_flat_patch, make_octahedron, make_sphere, make_tetrahedron, MAX_SPHERE_LEVEL};
pub use off::{load_off, parse_off, write_off};
pub use spec::{parse_mesh_list, MeshSpec};

pub type Vec3 = [f64; 3];

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// One flat triangle of the surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Panel {
    pub vertices: [Vec3; 3],
    pub centroid: Vec3,
    pub area: f64,
    pub normal: Vec3,
    /// Longest edge length.
    pub diameter: f64,
}

impl Panel {
    /// Builds the panel from its corners; the normal follows the
    /// counter-clockwise orientation `(v1 - v0) x (v2 - v0)`.
    pub fn from_vertices(v: [Vec3; 3], face: usize) -> Result<Self> {
        let e1 = sub(v[1], v[0]);
        let e2 = sub(v[2], v[0]);
        let e3 = sub(v[2], v[1]);
        let c = cross(e1, e2);
        let twice = norm(c);
        let diameter = norm(e1).max(norm(e2)).max(norm(e3));
        let area = 0.5 * twice;
        if !(area > 1e-14 * diameter * diameter) || !area.is_finite() {
            return Err(Error::DegenerateTriangle { face, area });
        }
        Ok(Self {
            vertices: v,
            centroid: [
                (v[0][0] + v[1][0] + v[2][0]) / 3.0,
                (v[0][1] + v[1][1] + v[2][1]) / 3.0,
                (v[0][2] + v[1][2] + v[2][2]) / 3.0,
            ],
            area,
            normal: [c[0] / twice, c[1] / twice, c[2] / twice],
            diameter,
        })
    }
}

/// A triangulated surface. Panels are immutable once built.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    pub panels: Vec<Panel>,
    /// Every edge is shared by exactly two triangles.
    pub closed: bool,
    pub label: String,
}

fn undirected(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SurfaceMesh {
    /// Builds a mesh from indexed triangles. Closed meshes are reoriented so
    /// that neighbouring faces agree and the signed volume is positive.
    pub fn from_triangles(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>, label: impl Into<String>) -> Result<Self> {
        Self::build(vertices, faces, label.into(), true)
    }

    /// Like [`SurfaceMesh::from_triangles`] but keeps the given face order untouched.
    pub fn from_triangles_as_is(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>, label: impl Into<String>) -> Result<Self> {
        Self::build(vertices, faces, label.into(), false)
    }

    fn build(vertices: Vec<Vec3>, mut faces: Vec<[usize; 3]>, label: String, orient: bool) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        for (k, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidArgument(format!("face {k} references a missing vertex")));
            }
        }
        let closed = is_watertight(&faces);
        if orient && closed {
            if !orient_consistently(&mut faces) {
                log::warn!("mesh `{label}` is not orientable; keeping input orientation");
            }
        }
        let mut mesh = Self {
            panels: panels_of(&vertices, &faces)?,
            vertices,
            faces,
            closed,
            label,
        };
        if orient && closed && mesh.signed_volume() < 0.0 {
            for f in mesh.faces.iter_mut() {
                f.swap(1, 2);
            }
            mesh.panels = panels_of(&mesh.vertices, &mesh.faces)?;
        }
        if !closed {
            log::debug!("mesh `{}` is open (not watertight)", mesh.label);
        }
        Ok(mesh)
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.panels.iter().map(|p| p.area).collect()
    }

    /// `sum (centroid . normal) area / 3`; positive for outward closed meshes.
    pub fn signed_volume(&self) -> f64 {
        self.panels.iter().map(|p| dot(p.centroid, p.normal) * p.area / 3.0).sum()
    }

    /// Mean longest-edge length.
    pub fn mean_diameter(&self) -> f64 {
        self.panels.iter().map(|p| p.diameter).sum::<f64>() / self.len() as f64
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                edges.insert(undirected(f[k], f[(k + 1) % 3]));
            }
        }
        edges.len()
    }

    /// `V - E + F` over the vertices referenced by faces.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &i in f {
                used[i] = true;
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        v - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Checks the panel invariants: unit normals orthogonal to the edges and
    /// positive areas. Returns the worst deviation found.
    pub fn geometry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for p in &self.panels {
            worst = worst.max((norm(p.normal) - 1.0).abs());
            let e1 = sub(p.vertices[1], p.vertices[0]);
            let e2 = sub(p.vertices[2], p.vertices[0]);
            worst = worst.max(dot(p.normal, e1).abs() / norm(e1));
            worst = worst.max(dot(p.normal, e2).abs() / norm(e2));
        }
        worst
    }

    /// True when every directed edge appears at most once, i.e. neighbouring
    /// faces induce opposite orientations on their shared edge.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.faces
            .iter()
            .all(|f| (0..3).all(|k| seen.insert((f[k], f[(k + 1) % 3]))))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn panels_of(vertices: &[Vec3], faces: &[[usize; 3]]) -> Result<Vec<Panel>> {
    faces
        .iter()
        .enumerate()
        .map(|(k, f)| Panel::from_vertices([vertices[f[0]], vertices[f[1]], vertices[f[2]]], k))
        .collect()
}

fn is_watertight(faces: &[[usize; 3]]) -> bool {
    let mut count: HashMap<(usize, usize), u32> = HashMap::new();
    for f in faces {
        for k in 0..3 {
            *count.entry(undirected(f[k], f[(k + 1) % 3])).or_default() += 1;
        }
    }
    count.values().all(|&c| c == 2)
}

/// Breadth-first propagation of the first face's orientation across shared
/// edges. Returns false if some face cannot be made consistent.
fn orient_consistently(faces: &mut [[usize; 3]]) -> bool {
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, f) in faces.iter().enumerate() {
        for e in 0..3 {
            by_edge.entry(undirected(f[e], f[(e + 1) % 3])).or_default().push(k);
        }
    }
    let has_directed = |f: &[usize; 3], a: usize, b: usize| (0..3).any(|e| f[e] == a && f[(e + 1) % 3] == b);
    let mut visited = vec![false; faces.len()];
    let mut ok = true;
    for start in 0..faces.len() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            let f = faces[k];
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                for &nb in &by_edge[&undirected(a, b)] {
                    if nb == k {
                        continue;
                    }
                    // a consistent neighbour traverses the shared edge as b -> a
                    let agrees = has_directed(&faces[nb], b, a);
                    if visited[nb] {
                        ok &= agrees;
                        continue;
                    }
                    if !agrees {
                        faces[nb].swap(1, 2);
                    }
                    visited[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    ok
}
