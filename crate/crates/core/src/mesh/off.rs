use std::fmt::Write as _;
use std::path::Path;

use super::{SurfaceMesh, Vec3};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads an ASCII OFF file of triangles.
pub fn load_off(path: impl AsRef<Path>) -> Result<SurfaceMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_off(&text, &path.display().to_string())
}

/// Parses OFF text: header `OFF`, a counts line `V F E`, `V` vertex lines and
/// `F` face lines `3 i j k`. `#` starts a comment.
pub fn parse_off(text: &str, label: &str) -> Result<SurfaceMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut rest_of_header = header
        .strip_prefix("OFF")
        .ok_or_else(|| parse_err(hline, format!("expected `OFF` header, found `{header}`")))?
        .trim()
        .to_string();

    let (cline, counts) = if rest_of_header.is_empty() {
        let (n, l) = lines.next().ok_or_else(|| parse_err(hline + 1, "missing counts line"))?;
        (n, l.to_string())
    } else {
        (hline, std::mem::take(&mut rest_of_header))
    };
    let nums: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(cline, format!("bad count `{t}`"))))
        .collect::<Result<_>>()?;
    if nums.len() < 2 {
        return Err(parse_err(cline, "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (nums[0], nums[1]);

    let mut vertices: Vec<Vec3> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in vertex block"))?;
        let c: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(n, format!("bad coordinate `{t}`"))))
            .collect::<Result<_>>()?;
        if c.len() < 3 || c.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(n, "vertex needs three finite coordinates"));
        }
        vertices.push([c[0], c[1], c[2]]);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in face block"))?;
        let mut toks = l.split_whitespace();
        let k: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(n, "bad face vertex count"))?;
        if k != 3 {
            return Err(Error::NonTriangularFace(n));
        }
        let mut idx = [0usize; 3];
        for slot in idx.iter_mut() {
            let t = toks.next().ok_or_else(|| parse_err(n, "face has fewer than 3 indices"))?;
            *slot = t.parse().map_err(|_| parse_err(n, format!("bad vertex index `{t}`")))?;
            if *slot >= nv {
                return Err(parse_err(n, format!("vertex index {slot} out of range (have {nv})")));
            }
        }
        faces.push(idx);
    }

    let mesh = SurfaceMesh::from_triangles(vertices, faces, label)?;
    if !mesh.closed {
        log::warn!("mesh `{label}` is not watertight; treated as open");
    }
    Ok(mesh)
}

/// Writes the mesh as ASCII OFF with round-trip float formatting.
pub fn write_off(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_off_string(mesh))?;
    Ok(())
}

pub(crate) fn to_off_string(mesh: &SurfaceMesh) -> String {
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} {}", mesh.vertices.len(), mesh.faces.len(), mesh.edge_count());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?} {:?}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}
