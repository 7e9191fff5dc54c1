//! Plot-ready CSV files with JSON sidecars for radial functions, spectral
//! profiles and orbit traces.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialSpace};
use crate::radial::{RadialGridFunction, SpectralGridFunction};
use crate::report::to_json_string;
use crate::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    /// `radial`, `spectral` or `series`.
    pub layout: String,
    pub columns: Vec<String>,
    pub profile_hash: Option<String>,
    pub radial_grid: Option<RadialGrid>,
    pub support: Option<f64>,
    pub flags: Vec<String>,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn write_pair(csv: &Path, body: String, sidecar: &Sidecar) -> Result<()> {
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(csv, body)?;
    fs::write(sidecar_path(csv), to_json_string(sidecar)?)?;
    Ok(())
}

pub fn radial_csv(f: &RadialGridFunction) -> String {
    let mut s = String::from("r,re,im\n");
    for (r, v) in f.nodes().iter().zip(f.values()) {
        let _ = writeln!(s, "{r},{},{}", v.re, v.im);
    }
    s
}

pub fn write_radial(csv: &Path, f: &RadialGridFunction, flags: Vec<String>) -> Result<()> {
    let sidecar = Sidecar {
        layout: "radial".into(),
        columns: vec!["r".into(), "re".into(), "im".into()],
        profile_hash: Some(f.space().profile().hash()),
        radial_grid: Some(f.space().grid().clone()),
        support: f.support().is_finite().then_some(f.support()),
        flags,
    };
    write_pair(csv, radial_csv(f), &sidecar)
}

pub fn spectral_csv(big_f: &SpectralGridFunction) -> String {
    let mut s = String::from("lambda,re,im\n");
    for (l, v) in big_f.lambdas().iter().zip(big_f.values()) {
        let _ = writeln!(s, "{l},{},{}", v.re, v.im);
    }
    s
}

pub fn write_spectral(csv: &Path, big_f: &SpectralGridFunction, profile_hash: &str, flags: Vec<String>) -> Result<()> {
    let sidecar = Sidecar {
        layout: "spectral".into(),
        columns: vec!["lambda".into(), "re".into(), "im".into()],
        profile_hash: Some(profile_hash.to_string()),
        radial_grid: None,
        support: None,
        flags,
    };
    write_pair(csv, spectral_csv(big_f), &sidecar)
}

/// `(n, value)` rows, e.g. orbit norms.
pub fn write_series(csv: &Path, name: &str, values: &[f64], flags: Vec<String>) -> Result<()> {
    let mut s = format!("n,{name}\n");
    for (n, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{n},{v}");
    }
    let sidecar = Sidecar {
        layout: "series".into(),
        columns: vec!["n".into(), name.into()],
        profile_hash: None,
        radial_grid: None,
        support: None,
        flags,
    };
    write_pair(csv, s, &sidecar)
}

fn parse_rows(text: &str, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
            .collect::<Result<_>>()?;
        if row.len() < columns {
            return Err(Error::Parse(format!("line {}: expected {columns} columns", i + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads an `r,re,im` file whose radii are exactly the nodes of `space`; a
/// sidecar, when present, must name the same profile.
pub fn read_radial(csv: &Path, space: &Arc<RadialSpace>) -> Result<RadialGridFunction> {
    let side = sidecar_path(csv);
    let mut support = None;
    if side.exists() {
        let meta: Sidecar = serde_json::from_slice(&fs::read(&side)?)?;
        if meta.profile_hash.as_deref().is_some_and(|h| h != space.profile().hash()) {
            return Err(Error::GridMismatch(format!("{} was written for another profile", csv.display())));
        }
        support = meta.support;
    }
    let rows = parse_rows(&fs::read_to_string(csv)?, 3)?;
    if rows.len() != space.nodes().len() || rows.iter().zip(space.nodes()).any(|(row, r)| row[0] != *r) {
        return Err(Error::GridMismatch(format!(
            "{} does not sample the working radial grid ({} rows, {} nodes)",
            csv.display(),
            rows.len(),
            space.nodes().len()
        )));
    }
    let f = RadialGridFunction::new(Arc::clone(space), rows.iter().map(|row| Complex64::new(row[1], row[2])).collect())?;
    Ok(match support {
        Some(s) => f.with_support(s),
        None => f,
    })
}
