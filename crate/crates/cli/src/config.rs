//! Run configuration: defaults, then an optional `key = value` file, then
//! command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use radlab::grid::{RadialGrid, RadialSpace, SpectralGrid, DEFAULT_ORDER};
use radlab::radial::Tolerances;
use radlab::{DensityProfile, Error, ProfileSpec, Result};
use serde::Serialize;

const KEYS: &[&str] = &[
    "kind",
    "n",
    "m",
    "k",
    "table_path",
    "alpha",
    "rho_hint",
    "r_max",
    "r_nodes",
    "lambda_min",
    "lambda_max",
    "lambda_nodes",
    "rk_tol",
    "quad_tol",
    "tail_tol",
    "cache_dir",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grids {
    /// `None` means `25/ρ`.
    pub r_max: Option<f64>,
    pub r_nodes: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_nodes: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { r_max: None, r_nodes: 2048, lambda_min: 0.0, lambda_max: 24.0, lambda_nodes: 768 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    pub grids: Grids,
    pub tolerances: Tolerances,
    pub cache_dir: PathBuf,
    pub seed: u64,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('-', "_");
        let key = if key == "table" { "table_path".to_string() } else { key };
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Usage(format!("unknown config key `{key}` (line {})", i + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|_| Error::Usage(format!("bad value `{v}` for `{key}`"))))
        .transpose()
}

impl RunConfig {
    /// Builds a config from merged settings (file values overridden by flags).
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let kind = map.get("kind").map(|s| s.replace('-', "_")).unwrap_or_else(|| "hyperbolic".into());
        let profile = match kind.as_str() {
            "hyperbolic" => ProfileSpec::Hyperbolic { n: get(map, "n")?.unwrap_or(3) },
            "damek_ricci" => ProfileSpec::DamekRicci { m: get(map, "m")?.unwrap_or(2), k: get(map, "k")?.unwrap_or(1) },
            "custom" => ProfileSpec::Custom {
                table_path: map.get("table_path").cloned().ok_or_else(|| Error::Usage("custom profile needs table_path".into()))?,
                alpha: get(map, "alpha")?,
                rho_hint: get(map, "rho_hint")?,
                n: get(map, "n")?,
            },
            other => return Err(Error::Usage(format!("unknown profile kind `{other}`"))),
        };
        let d = Grids::default();
        let grids = Grids {
            r_max: get(map, "r_max")?,
            r_nodes: get(map, "r_nodes")?.unwrap_or(d.r_nodes),
            lambda_min: get(map, "lambda_min")?.unwrap_or(d.lambda_min),
            lambda_max: get(map, "lambda_max")?.unwrap_or(d.lambda_max),
            lambda_nodes: get(map, "lambda_nodes")?.unwrap_or(d.lambda_nodes),
        };
        let t = Tolerances::default();
        let tolerances = Tolerances {
            rk_tol: get(map, "rk_tol")?.unwrap_or(t.rk_tol),
            quad_tol: get(map, "quad_tol")?.unwrap_or(t.quad_tol),
            tail_tol: get(map, "tail_tol")?.unwrap_or(t.tail_tol),
        };
        let cfg = RunConfig {
            profile,
            grids,
            tolerances,
            cache_dir: PathBuf::from(map.get("cache_dir").map(String::as_str).unwrap_or(".radlab-cache")),
            seed: get(map, "seed")?.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file_and_flags(file: Option<&Path>, flags: &BTreeMap<String, String>) -> Result<Self> {
        let mut map = match file {
            Some(path) => parse_key_values(&std::fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        map.extend(flags.iter().map(|(k, v)| (k.clone(), v.clone())));
        Self::from_map(&map)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.grids;
        if g.r_max.is_some_and(|r| !(r > 0.0)) || g.r_nodes < 32 {
            return Err(Error::Usage("radial grid needs r_max > 0 and r_nodes >= 32".into()));
        }
        if !(g.lambda_min >= 0.0 && g.lambda_max > g.lambda_min) || g.lambda_nodes < DEFAULT_ORDER {
            return Err(Error::Usage(format!("spectral grid needs 0 <= lambda_min < lambda_max and lambda_nodes >= {DEFAULT_ORDER}")));
        }
        let t = &self.tolerances;
        if [t.rk_tol, t.quad_tol, t.tail_tol].iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<DensityProfile> {
        DensityProfile::from_spec(&self.profile)
    }

    /// Node counts are rounded up to whole 16-point panels.
    pub fn space(&self, profile: DensityProfile) -> Result<Arc<RadialSpace>> {
        profile.require_positive_rho()?;
        let r_max = self.grids.r_max.unwrap_or(25.0 / profile.rho());
        let panels = self.grids.r_nodes.div_ceil(DEFAULT_ORDER).max(2);
        RadialSpace::new(Arc::new(profile), RadialGrid::graded(r_max, panels, DEFAULT_ORDER)?)
    }

    pub fn spectral_grid(&self) -> Result<SpectralGrid> {
        let g = &self.grids;
        SpectralGrid::new(g.lambda_min, g.lambda_max, g.lambda_nodes.div_ceil(DEFAULT_ORDER), DEFAULT_ORDER)
    }
}
