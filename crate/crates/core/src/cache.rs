//! On-disk cache of eigenfunction and c-function tables: a JSON header plus
//! a CSV payload `lambda_re,lambda_im,r,phi_re,phi_im`, both named after
//! the SHA-256 key of (profile, grids, tolerances, format version).

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::density::hex;
use crate::eigen::{CFunctionTable, EigenTable};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialSpace, SpectralGrid};
use crate::radial::{SpectralBasis, Tolerances};
use crate::Complex64;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct KeyMaterial<'a> {
    profile: String,
    radial_grid: &'a RadialGrid,
    spectral_grid: &'a SpectralGrid,
    tolerances: &'a Tolerances,
    format_version: u32,
}

/// SHA-256 over the canonical JSON of everything the tables depend on.
pub fn cache_key(space: &RadialSpace, spectral: &SpectralGrid, tol: &Tolerances) -> String {
    let material = KeyMaterial {
        profile: space.profile().spec_string(),
        radial_grid: space.grid(),
        spectral_grid: spectral,
        tolerances: tol,
        format_version: FORMAT_VERSION,
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex(&Sha256::digest(&bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format_version: u32,
    pub key: String,
    pub profile_hash: String,
    pub profile_spec: String,
    pub radial_grid: RadialGrid,
    pub spectral_grid: SpectralGrid,
    pub tolerances: Tolerances,
    pub ode_residual: f64,
    pub rk_tol: f64,
    pub lambda_count: usize,
    pub r_count: usize,
    pub cfunction: CFunctionTable,
}

pub fn header_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

pub fn payload_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.csv"))
}

/// Writes the basis tables under `dir`; returns the key.
pub fn store(dir: &Path, basis: &SpectralBasis) -> Result<String> {
    fs::create_dir_all(dir)?;
    let space = basis.space();
    let key = cache_key(space, basis.spectral(), basis.tolerances());
    let eigen = basis.eigen();
    let header = CacheHeader {
        format_version: FORMAT_VERSION,
        key: key.clone(),
        profile_hash: space.profile().hash(),
        profile_spec: space.profile().spec_string(),
        radial_grid: space.grid().clone(),
        spectral_grid: basis.spectral().clone(),
        tolerances: *basis.tolerances(),
        ode_residual: eigen.ode_residual,
        rk_tol: eigen.rk_tol,
        lambda_count: eigen.lambdas.len(),
        r_count: eigen.r_grid.len(),
        cfunction: (**basis.cfunction()).clone(),
    };
    let mut out = BufWriter::new(fs::File::create(payload_path(dir, &key))?);
    writeln!(out, "lambda_re,lambda_im,r,phi_re,phi_im")?;
    for (lambda, col) in eigen.lambdas.iter().zip(&eigen.values) {
        for (r, v) in eigen.r_grid.iter().zip(col) {
            writeln!(out, "{},{},{},{},{}", lambda.re, lambda.im, r, v.re, v.im)?;
        }
    }
    out.flush()?;
    fs::write(header_path(dir, &key), serde_json::to_vec_pretty(&header)?)?;
    Ok(key)
}

/// Loads the tables for exactly this (space, grid, tolerances) triple.
/// `Ok(None)` when nothing is cached; `Error::Cache` when files exist but do
/// not match.
pub fn load(dir: &Path, space: &Arc<RadialSpace>, spectral: &SpectralGrid, tol: &Tolerances) -> Result<Option<Arc<SpectralBasis>>> {
    let key = cache_key(space, spectral, tol);
    let hpath = header_path(dir, &key);
    if !hpath.exists() {
        return Ok(None);
    }
    let mismatch = |what: &str| Error::Cache(format!("cache entry {key} {what}; rebuild it with --build-cache"));
    let header: CacheHeader = serde_json::from_slice(&fs::read(&hpath)?).map_err(|e| mismatch(&format!("has an unreadable header ({e})")))?;
    let mut radial = header.radial_grid.clone();
    radial.rebuild();
    let mut sgrid = header.spectral_grid.clone();
    sgrid.rebuild();
    if header.format_version != FORMAT_VERSION
        || header.key != key
        || header.profile_hash != space.profile().hash()
        || &radial != space.grid()
        || &sgrid != spectral
        || header.tolerances != *tol
    {
        return Err(mismatch("was written for different inputs"));
    }
    let file = fs::File::open(payload_path(dir, &key)).map_err(|_| mismatch("has no payload"))?;
    let (nl, nr) = (header.lambda_count, header.r_count);
    let mut lambdas = Vec::with_capacity(nl);
    let mut values = Vec::with_capacity(nl);
    let mut r_grid = Vec::with_capacity(nr);
    let mut lines = BufReader::new(file).lines();
    lines.next().transpose()?;
    for j in 0..nl {
        let mut col = Vec::with_capacity(nr);
        for i in 0..nr {
            let line = lines.next().transpose()?.ok_or_else(|| mismatch("has a short payload"))?;
            let mut fields = line.split(',').map(str::parse::<f64>);
            let mut next = || fields.next().and_then(|x| x.ok()).ok_or_else(|| mismatch("has a malformed payload row"));
            let (lre, lim, r, re, im) = (next()?, next()?, next()?, next()?, next()?);
            if i == 0 {
                lambdas.push(Complex64::new(lre, lim));
            }
            if j == 0 {
                r_grid.push(r);
            }
            col.push(Complex64::new(re, im));
        }
        values.push(col);
    }
    let eigen = EigenTable {
        profile_id: header.profile_hash.clone(),
        lambdas,
        r_grid,
        values,
        derivs: vec![],
        ode_residual: header.ode_residual,
        rk_tol: header.rk_tol,
    };
    SpectralBasis::from_tables(Arc::clone(space), sgrid, eigen, header.cfunction, *tol).map(Some).map_err(|e| mismatch(&e.to_string()))
}

/// Loads from `dir`, or builds (and stores when `store_new`).
pub fn load_or_build(
    dir: Option<&Path>,
    space: &Arc<RadialSpace>,
    spectral: &SpectralGrid,
    tol: &Tolerances,
    store_new: bool,
) -> Result<(Arc<SpectralBasis>, CacheStatus)> {
    if let Some(dir) = dir {
        if let Some(b) = load(dir, space, spectral, tol)? {
            return Ok((b, CacheStatus::Hit));
        }
    }
    let basis = SpectralBasis::build(Arc::clone(space), spectral.clone(), *tol)?;
    match dir {
        Some(dir) if store_new => {
            store(dir, &basis)?;
            Ok((basis, CacheStatus::Built))
        }
        _ => Ok((basis, CacheStatus::Computed)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    Hit,
    Built,
    /// Built in memory, not written.
    Computed,
}
