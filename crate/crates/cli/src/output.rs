//! JSON reports and CSV files.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use diracshell::{DiscreteDensity, SurfaceMesh};
use serde::Serialize;
use serde_json::Value;

use crate::exit::InputError;

pub const SCHEMA: &str = "dirac-shell/1";

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: &'a Value,
}

/// Pretty JSON with `schema` and `command` first; body keys are sorted.
/// Floats use the shortest representation that round-trips.
pub fn render(command: &str, body: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA,
        command,
        body,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn emit(command: &str, body: &Value, out: Option<&Path>) -> Result<()> {
    let text = render(command, body)?;
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Headed CSV, one record per row.
pub fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// One panel per row, 8 columns `re0,im0,...,re3,im3`, no header.
pub fn write_density(path: &Path, g: &DiscreteDensity) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    for row in g.to_reals() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the density format written by [`write_density`]; `#` lines are
/// comments and a non-numeric first row is taken as a header.
pub fn read_density(path: &Path, mesh: &SurfaceMesh) -> Result<DiscreteDensity> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening density {}", path.display()))?;
    let mut rows: Vec<[f64; 8]> = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 8 {
            return Err(InputError(format!("{}: row {} has {} columns, expected 8", path.display(), k + 1, rec.len())).into());
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(std::array::from_fn(|i| v[i])),
            Err(_) if k == 0 => continue,
            Err(e) => return Err(InputError(format!("{}: row {}: {e}", path.display(), k + 1)).into()),
        }
    }
    if rows.len() != mesh.len() {
        return Err(InputError(format!(
            "{}: {} rows for a mesh of {} panels",
            path.display(),
            rows.len(),
            mesh.len()
        ))
        .into());
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(InputError(format!("{}: non-finite value", path.display())).into());
    }
    Ok(DiscreteDensity::from_reals(&rows, mesh.label.clone()))
}
