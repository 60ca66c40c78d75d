use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::{load_off, make_flat_patch, make_sphere, SurfaceMesh};
use crate::error::{Error, Result};

/// A mesh source: `sphere:L[,R]`, `patch:W,N`, or a path to an OFF file.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshSpec {
    Sphere { level: u32, radius: f64 },
    Patch { half_width: f64, n_per_side: usize },
    File(PathBuf),
}

impl MeshSpec {
    pub fn load(&self) -> Result<SurfaceMesh> {
        match self {
            MeshSpec::Sphere { level, radius } => make_sphere(*level, *radius),
            MeshSpec::Patch { half_width, n_per_side } => make_flat_patch(*half_width, *n_per_side),
            MeshSpec::File(p) => load_off(p),
        }
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSpec::Sphere { level, radius } if *radius == 1.0 => write!(f, "sphere:{level}"),
            MeshSpec::Sphere { level, radius } => write!(f, "sphere:{level},{radius}"),
            MeshSpec::Patch { half_width, n_per_side } => write!(f, "patch:{half_width},{n_per_side}"),
            MeshSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for MeshSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::MeshSpec(s.to_string());
        if let Some(rest) = s.strip_prefix("sphere:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            let level = parts[0].parse().map_err(|_| bad())?;
            let radius = match parts.len() {
                1 => 1.0,
                2 => parts[1].parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            };
            Ok(MeshSpec::Sphere { level, radius })
        } else if let Some(rest) = s.strip_prefix("patch:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            Ok(MeshSpec::Patch {
                half_width: parts[0].parse().map_err(|_| bad())?,
                n_per_side: parts[1].parse().map_err(|_| bad())?,
            })
        } else if s.is_empty() || s.contains(':') && !std::path::Path::new(s).exists() {
            Err(bad())
        } else {
            Ok(MeshSpec::File(PathBuf::from(s)))
        }
    }
}

/// Splits a comma-separated list of specs. Purely numeric items continue the
/// previous spec, so `sphere:1,sphere:2,1.5` is `sphere:1` and `sphere:2,1.5`.
pub fn parse_mesh_list(s: &str) -> Result<Vec<MeshSpec>> {
    let mut items: Vec<String> = Vec::new();
    for tok in s.split(',') {
        let numeric = tok.trim().parse::<f64>().is_ok();
        match items.last_mut() {
            Some(last) if numeric => {
                last.push(',');
                last.push_str(tok.trim());
            }
            _ => items.push(tok.trim().to_string()),
        }
    }
    items.iter().map(|i| i.parse()).collect()
}
