//! Volume-density profiles `A(r)` of rank-one harmonic manifolds and the
//! checks of the growth/regularity conditions C1–C4 that make them a
//! Chébli–Trimèche density.
//!
//! Three families are provided: real hyperbolic space `H^n`
//! (`A = sinh^{n-1} r`), Damek–Ricci profiles with parameters `(m, k)`
//! (`A = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2)`), and custom profiles read
//! from a table of `log A`. Damek–Ricci profiles are accepted for every
//! `(m, k)`, including pairs that are not realised by an actual
//! Damek–Ricci space; only the density is used.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::quadrature::integrate_gl;

/// Volume of the unit sphere `S^d ⊂ R^{d+1}`, i.e. `2 π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_volume(d: usize) -> f64 {
    let k = d + 1;
    2.0 * std::f64::consts::PI.powf(k as f64 / 2.0) / gamma_half(k)
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    assert!(k >= 1);
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        // Γ(1/2) = √π, Γ(x+1) = x Γ(x)
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Declarative description of a profile, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Hyperbolic { n: i64 },
    DamekRicci { m: i64, k: i64 },
    Custom {
        table_path: String,
        alpha: Option<f64>,
        rho_hint: Option<f64>,
        n: Option<i64>,
    },
}

#[derive(Debug, Clone)]
pub struct CustomDensity {
    table_r: Vec<f64>,
    table_log_a: Vec<f64>,
    log_b: Pchip,
    r_end: f64,
    log_a_end: f64,
    table_digest: String,
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    Hyperbolic { n: usize },
    DamekRicci { m: usize, k: usize },
    Custom(Box<CustomDensity>),
}

/// A volume density `A(r)` together with its derived constants.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    name: String,
    kind: ProfileKind,
    dim_n: usize,
    rho: f64,
    alpha: f64,
    omega: f64,
}

impl DensityProfile {
    /// `A(r) = sinh^{n-1}(r)` on `H^n`.
    pub fn hyperbolic(n: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let n = n as usize;
        Ok(DensityProfile {
            name: format!("hyperbolic(n={n})"),
            kind: ProfileKind::Hyperbolic { n },
            dim_n: n,
            rho: (n as f64 - 1.0) / 2.0,
            alpha: (n as f64 - 2.0) / 2.0,
            omega: sphere_volume(n - 1),
        })
    }

    /// `A(r) = 2^{m+k} sinh^{m+k}(r/2) cosh^k(r/2)`, dimension `m + k + 1`.
    pub fn damek_ricci(m: i64, k: i64) -> Result<Self> {
        if m < 1 || k < 1 {
            return Err(Error::InvalidParameter(format!("damek-ricci needs m, k >= 1 (got m={m}, k={k})")));
        }
        let (m, k) = (m as usize, k as usize);
        let n = m + k + 1;
        Ok(DensityProfile {
            name: format!("damek_ricci(m={m},k={k})"),
            kind: ProfileKind::DamekRicci { m, k },
            dim_n: n,
            rho: (m as f64 + 2.0 * k as f64) / 4.0,
            alpha: (m as f64 + k as f64 - 1.0) / 2.0,
            omega: sphere_volume(n - 1),
        })
    }

    /// Custom profile from a table of `(r, log A(r))`.
    ///
    /// The factor `r^{2α+1}` is carried analytically and only `log B` is
    /// interpolated (monotone cubic, with `B(0) = 1` pinned). Beyond the
    /// last row `log A` continues linearly with slope `2ρ`. When `alpha` is
    /// not given it is estimated from the slope of `log A` against `log r`
    /// at the first two rows; `rho_hint` defaults to half the final slope.
    pub fn custom(
        name: &str,
        table: &[(f64, f64)],
        alpha: Option<f64>,
        rho_hint: Option<f64>,
        dim_n: Option<i64>,
    ) -> Result<Self> {
        let rows: Vec<(f64, f64)> = table.iter().copied().filter(|(r, _)| *r > 0.0).collect();
        if rows.len() < 3 {
            return Err(Error::InvalidParameter("custom profile table needs at least 3 rows with r > 0".into()));
        }
        if rows.iter().any(|(r, la)| !r.is_finite() || !la.is_finite()) {
            let bad = rows.iter().find(|(r, la)| !r.is_finite() || !la.is_finite()).unwrap();
            return Err(Error::ProfileEvaluation { r: bad.0 });
        }
        if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter("custom profile radii must be strictly increasing".into()));
        }
        let alpha = match alpha {
            Some(a) => a,
            None => {
                let (r0, a0) = rows[0];
                let (r1, a1) = rows[1];
                ((a1 - a0) / (r1.ln() - r0.ln()) - 1.0) / 2.0
            }
        };
        if !(alpha > -0.5) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed -1/2")));
        }
        let power = 2.0 * alpha + 1.0;
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        for &(r, la) in &rows {
            xs.push(r);
            ys.push(la - power * r.ln());
        }
        let log_b = Pchip::new(xs, ys);
        let (r_end, log_a_end) = *rows.last().unwrap();
        let end_slope = power / r_end + log_b.last_slope();
        let rho = rho_hint.unwrap_or(end_slope / 2.0);
        let dim_n = match dim_n {
            Some(n) if n >= 2 => n as usize,
            Some(n) => return Err(Error::InvalidDimension(n)),
            None => ((power + 1.0).round() as usize).max(2),
        };
        let mut hasher = Sha256::new();
        for (r, la) in &rows {
            hasher.update(r.to_le_bytes());
            hasher.update(la.to_le_bytes());
        }
        let table_digest = hex(&hasher.finalize());
        Ok(DensityProfile {
            name: name.to_string(),
            kind: ProfileKind::Custom(Box::new(CustomDensity {
                table_r: rows.iter().map(|p| p.0).collect(),
                table_log_a: rows.iter().map(|p| p.1).collect(),
                log_b,
                r_end,
                log_a_end,
                table_digest,
            })),
            dim_n,
            rho,
            alpha,
            omega: sphere_volume(dim_n - 1),
        })
    }

    /// Reads a two-column CSV `r,logA` (an optional header line is skipped).
    pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
        let text = std::fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = (cols.next(), cols.next());
            match (a.and_then(|s| s.parse::<f64>().ok()), b.and_then(|s| s.parse::<f64>().ok())) {
                (Some(r), Some(la)) => rows.push((r, la)),
                _ if lineno == 0 => continue,
                _ => return Err(Error::Parse(format!("{}:{}: expected `r,logA`", path.display(), lineno + 1))),
            }
        }
        Ok(rows)
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        match spec {
            ProfileSpec::Hyperbolic { n } => Self::hyperbolic(*n),
            ProfileSpec::DamekRicci { m, k } => Self::damek_ricci(*m, *k),
            ProfileSpec::Custom { table_path, alpha, rho_hint, n } => {
                let table = Self::read_table(Path::new(table_path))?;
                Self::custom(&format!("custom({table_path})"), &table, *alpha, *rho_hint, *n)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ω_{n-1}`, the volume of the unit `(n-1)`-sphere.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hyperbolic_dimension(&self) -> Option<usize> {
        match self.kind {
            ProfileKind::Hyperbolic { n } => Some(n),
            _ => None,
        }
    }

    pub fn require_positive_rho(&self) -> Result<()> {
        if self.rho > 0.0 {
            Ok(())
        } else {
            Err(Error::NonPositiveRho(self.rho))
        }
    }

    pub fn log_density(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Hyperbolic { n } => (*n as f64 - 1.0) * r.sinh().ln(),
            ProfileKind::DamekRicci { m, k } => {
                let (m, k) = (*m as f64, *k as f64);
                (m + k) * (2.0 * (0.5 * r).sinh()).ln() + k * (0.5 * r).cosh().ln()
            }
            ProfileKind::Custom(c) => {
                if r <= c.r_end {
                    (2.0 * self.alpha + 1.0) * r.ln() + c.log_b.eval(r)
                } else {
                    c.log_a_end + 2.0 * self.rho * (r - c.r_end)
                }
            }
        }
    }

    /// `A(r)`.
    pub fn density(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Hyperbolic { n } => r.sinh().powi(*n as i32 - 1),
            ProfileKind::DamekRicci { m, k } => {
                (2.0 * (0.5 * r).sinh()).powi((m + k) as i32) * (0.5 * r).cosh().powi(*k as i32)
            }
            ProfileKind::Custom(_) => self.log_density(r).exp(),
        }
    }

    /// `A'(r) / A(r)`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Hyperbolic { n } => (*n as f64 - 1.0) / r.tanh(),
            ProfileKind::DamekRicci { m, k } => {
                let (m, k) = (*m as f64, *k as f64);
                let x = 0.5 * r;
                0.5 * (m + k) / x.tanh() + 0.5 * k * x.tanh()
            }
            ProfileKind::Custom(c) => {
                if r <= c.r_end {
                    (2.0 * self.alpha + 1.0) / r + c.log_b.derivative(r)
                } else {
                    2.0 * self.rho
                }
            }
        }
    }

    /// `(A'/A)'` by a central difference of width `1e-4 · max(1, r)`.
    pub fn log_derivative_prime(&self, r: f64) -> f64 {
        let mut h = 1e-4 * r.max(1.0);
        if h >= r {
            h = 0.5 * r;
        }
        (self.log_derivative(r + h) - self.log_derivative(r - h)) / (2.0 * h)
    }

    /// `G(r) = ¼ (A'/A)² + ½ (A'/A)' − ρ²`.
    pub fn g_function(&self, r: f64) -> f64 {
        let l = self.log_derivative(r);
        0.25 * l * l + 0.5 * self.log_derivative_prime(r) - self.rho * self.rho
    }

    /// `K = lim A(r) e^{-2ρr}`; fixes the Plancherel constant for the
    /// geometric normalisation `B(0) = 1`.
    pub fn asymptotic_constant(&self) -> f64 {
        match &self.kind {
            ProfileKind::Hyperbolic { n } => 2f64.powi(1 - *n as i32),
            ProfileKind::DamekRicci { k, .. } => 2f64.powi(-(*k as i32)),
            ProfileKind::Custom(c) => (c.log_a_end - 2.0 * self.rho * c.r_end).exp(),
        }
    }

    /// Coefficient `β₂` in `B(r) = 1 + β₂ r² + O(r⁴)`.
    pub fn series_b2(&self) -> f64 {
        match &self.kind {
            ProfileKind::Hyperbolic { n } => (*n as f64 - 1.0) / 6.0,
            ProfileKind::DamekRicci { m, k } => {
                let (m, k) = (*m as f64, *k as f64);
                0.5 * ((m + k) / 12.0 + k / 4.0)
            }
            ProfileKind::Custom(_) => {
                let r = 1e-3;
                (self.log_derivative(r) - (2.0 * self.alpha + 1.0) / r) / (2.0 * r)
            }
        }
    }

    /// Canonical text used for hashing.
    pub fn spec_string(&self) -> String {
        match &self.kind {
            ProfileKind::Hyperbolic { n } => format!("hyperbolic;n={n}"),
            ProfileKind::DamekRicci { m, k } => format!("damek_ricci;m={m};k={k}"),
            ProfileKind::Custom(c) => format!(
                "custom;alpha={:.17e};rho={:.17e};n={};table={}",
                self.alpha, self.rho, self.dim_n, c.table_digest
            ),
        }
    }

    /// SHA-256 (hex) of [`Self::spec_string`].
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.spec_string().as_bytes()))
    }

    /// Raw table of a custom profile, if any.
    pub fn table(&self) -> Option<(&[f64], &[f64])> {
        match &self.kind {
            ProfileKind::Custom(c) => Some((&c.table_r, &c.table_log_a)),
            _ => None,
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResiduals {
    /// Smallest relative increment `A(r_{i+1})/A(r_i) − 1` on the sample grid.
    pub c1_min_increment: f64,
    /// Largest increase of `A'/A` between consecutive samples.
    pub c2_max_increase: f64,
    /// `|A'/A(R) − 2ρ|`.
    pub c2_limit_gap: f64,
    /// `|A'/A(R) − A'/A(3R/4)|`.
    pub c2_drift: f64,
    /// `|A(ε)/ε^{2α+1} − 1|` at `ε = min(r0, 1e-4)`.
    pub c3_ratio_gap: f64,
    /// `∫ r|G| dr` over the doubling windows `[r1·2^j, r1·2^{j+1}] ∩ [r1, R]`.
    pub c4_tail_increments: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub profile: String,
    #[serde(rename = "c1")]
    pub c1_ok: bool,
    #[serde(rename = "c2")]
    pub c2_ok: bool,
    #[serde(rename = "c3")]
    pub c3_ok: bool,
    #[serde(rename = "c4")]
    pub c4_ok: bool,
    pub rho_estimate: f64,
    pub g_integral: f64,
    pub g_sup: f64,
    /// `[min, max]` of `A(r) e^{-2ρr}` on `[1, R]`.
    pub growth_band: [f64; 2],
    pub residuals: ConditionResiduals,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.c1_ok && self.c2_ok && self.c3_ok && self.c4_ok
    }
}

const CONDITION_SAMPLES: usize = 2000;

/// Checks C1–C4 for `p` on `[r0, R]`, with the C4 tail integral started at `r1`.
pub fn verify_conditions(p: &DensityProfile, r0: f64, r1: f64, big_r: f64, tol: f64) -> Result<ConditionReport> {
    if !(0.0 < r0 && r0 < r1 && r1 < big_r) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "verify_conditions needs 0 < r0 < r1 < R and tol > 0 (got r0={r0}, r1={r1}, R={big_r}, tol={tol})"
        )));
    }
    let finite = |r: f64, v: f64| if v.is_finite() { Ok(v) } else { Err(Error::ProfileEvaluation { r }) };

    let step = (big_r - r0) / (CONDITION_SAMPLES - 1) as f64;
    let grid: Vec<f64> = (0..CONDITION_SAMPLES).map(|i| r0 + step * i as f64).collect();
    let mut log_a = Vec::with_capacity(grid.len());
    let mut ld = Vec::with_capacity(grid.len());
    let mut g = Vec::with_capacity(grid.len());
    for &r in &grid {
        log_a.push(finite(r, p.log_density(r))?);
        ld.push(finite(r, p.log_derivative(r))?);
        g.push(finite(r, p.g_function(r))?);
    }

    // C1: positive (log finite) and strictly increasing
    let c1_min_increment = log_a.windows(2).map(|w| (w[1] - w[0]).exp_m1()).fold(f64::INFINITY, f64::min);
    let c1_ok = c1_min_increment > 0.0;

    // C2: A'/A non-increasing with a positive limit 2ρ
    let c2_max_increase = ld
        .windows(2)
        .map(|w| w[1] - w[0] - 1e-12 * w[0].abs())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    // a table is continued with slope 2ρ, so the limit is judged inside the data
    let r_top = match p.table() {
        Some((r, _)) => big_r.min(*r.last().unwrap()),
        None => big_r,
    };
    let l_end = finite(r_top, p.log_derivative(r_top))?;
    let l_back = finite(0.75 * r_top, p.log_derivative(0.75 * r_top))?;
    let rho_estimate = 0.5 * l_end;
    let c2_limit_gap = (l_end - 2.0 * p.rho()).abs();
    let c2_drift = (l_end - l_back).abs();
    let c2_ok = c2_max_increase < 10.0 * tol
        && p.rho() > 0.0
        && rho_estimate > 10.0 * tol
        && c2_limit_gap < 10.0 * tol
        && c2_drift < 10.0 * tol;

    // C3: A(r) / r^{2α+1} → 1
    let eps = r0.min(1e-4);
    let c3_ratio_gap = (finite(eps, p.log_density(eps))? - (2.0 * p.alpha() + 1.0) * eps.ln()).exp_m1().abs();
    let c3_ok = p.alpha() > -0.5 && c3_ratio_gap < 10.0 * tol;

    // C4: G bounded on [r0, R] and ∫ r|G| dr convergent from r1
    let g_sup = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut increments = Vec::new();
    let mut lo = r1;
    while lo < big_r {
        let hi = (2.0 * lo).min(big_r);
        let mut bad = None;
        let inc = integrate_gl(lo, hi, 32, |r| {
            let v = p.g_function(r);
            if !v.is_finite() {
                bad = Some(r);
            }
            r * v.abs()
        });
        if let Some(r) = bad {
            return Err(Error::ProfileEvaluation { r });
        }
        increments.push(inc);
        lo = hi;
    }
    let g_integral: f64 = increments.iter().sum();
    let floor = tol * increments.first().copied().unwrap_or(0.0).max(1.0);
    let geometric = increments
        .windows(2)
        .skip(1)
        .all(|w| w[1] < floor || w[1] < 0.5 * w[0]);
    let c4_ok = g_sup.is_finite() && g_integral.is_finite() && geometric;

    let mut band = [f64::INFINITY, 0.0f64];
    for (&r, &la) in grid.iter().zip(&log_a) {
        if r >= 1.0 {
            let v = (la - 2.0 * p.rho() * r).exp();
            band[0] = band[0].min(v);
            band[1] = band[1].max(v);
        }
    }

    Ok(ConditionReport {
        profile: p.name().to_string(),
        c1_ok,
        c2_ok,
        c3_ok,
        c4_ok,
        rho_estimate,
        g_integral,
        g_sup,
        growth_band: band,
        residuals: ConditionResiduals {
            c1_min_increment,
            c2_max_increase,
            c2_limit_gap,
            c2_drift,
            c3_ratio_gap,
            c4_tail_increments: increments,
        },
    })
}

/// Default verification window `(r0, r1, R)` for a profile: `R = max(40/ρ, 25)`.
pub fn default_window(p: &DensityProfile) -> (f64, f64, f64) {
    // A'/A approaches 2ρ like e^{-r} on Damek–Ricci profiles, whatever ρ is
    let big_r = if p.rho() > 0.0 { (40.0 / p.rho()).max(25.0) } else { 40.0 };
    (0.1, 1.0, big_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        let pi = std::f64::consts::PI;
        assert!((sphere_volume(0) - 2.0).abs() < 1e-15);
        assert!((sphere_volume(1) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_volume(2) - 4.0 * pi).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * pi * pi).abs() < 1e-13);
        assert!((sphere_volume(4) - 8.0 * pi * pi / 3.0).abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_h3_values() {
        let p = DensityProfile::hyperbolic(3).unwrap();
        assert!((p.density(1.0) - 1.0f64.sinh().powi(2)).abs() < 1e-14);
        assert!((p.density(1.0) - 1.381098).abs() < 1e-6);
        assert_eq!(p.rho(), 1.0);
        assert_eq!(p.alpha(), 0.5);
        assert!((p.log_derivative(2.0) - 2.0 / 2.0f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_rejects_small_dimension() {
        assert!(matches!(DensityProfile::hyperbolic(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn h2_small_r_ratio() {
        let p = DensityProfile::hyperbolic(2).unwrap();
        let r = 1e-6;
        assert!((p.density(r) / r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn damek_ricci_fields() {
        let p = DensityProfile::damek_ricci(2, 1).unwrap();
        assert_eq!(p.rho(), 1.0);
        assert_eq!(p.dim_n(), 4);
        let r = 1e-4;
        assert!((p.density(r) / r.powi(3) - 1.0).abs() < 1e-7);
        let q = DensityProfile::damek_ricci(8, 4).unwrap();
        assert_eq!(q.dim_n(), 13);
        assert_eq!(q.alpha(), 5.5);
        assert!(DensityProfile::damek_ricci(0, 1).is_err());
    }

    #[test]
    fn damek_ricci_limit_of_log_derivative() {
        let p = DensityProfile::damek_ricci(2, 1).unwrap();
        assert!((p.log_derivative(60.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn series_coefficient_matches_numeric_limit() {
        for p in [DensityProfile::hyperbolic(5).unwrap(), DensityProfile::damek_ricci(3, 2).unwrap()] {
            let r = 1e-3;
            let numeric = (p.log_derivative(r) - (2.0 * p.alpha() + 1.0) / r) / (2.0 * r);
            assert!((numeric - p.series_b2()).abs() < 1e-5, "{}", p.name());
        }
    }

    #[test]
    fn h3_conditions_all_pass() {
        let p = DensityProfile::hyperbolic(3).unwrap();
        let rep = verify_conditions(&p, 0.1, 1.0, 40.0, 1e-6).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        assert!((rep.rho_estimate - 1.0).abs() < 1e-6);
    }

    #[test]
    fn euclidean_table_fails_c2() {
        let table: Vec<(f64, f64)> = (1..=400).map(|i| {
            let r = i as f64 * 0.1;
            (r, 2.0 * r.ln())
        }).collect();
        let p = DensityProfile::custom("euclid", &table, None, None, None).unwrap();
        assert!((p.alpha() - 0.5).abs() < 1e-12);
        let rep = verify_conditions(&p, 0.1, 1.0, 40.0, 1e-6).unwrap();
        assert!(rep.c1_ok);
        assert!(!rep.c2_ok);
    }

    #[test]
    fn custom_table_reproduces_hyperbolic() {
        let table: Vec<(f64, f64)> = (1..=3000).map(|i| {
            let r = i as f64 * 0.01;
            (r, 2.0 * r.sinh().ln())
        }).collect();
        let p = DensityProfile::custom("h3-table", &table, Some(0.5), Some(1.0), Some(3)).unwrap();
        let h = DensityProfile::hyperbolic(3).unwrap();
        for r in [0.05, 0.5, 1.3, 7.7, 25.0] {
            assert!((p.log_density(r) - h.log_density(r)).abs() < 1e-6, "r={r}");
            assert!((p.log_derivative(r) - h.log_derivative(r)).abs() < 1e-3, "r={r}");
        }
        assert!((p.asymptotic_constant() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn verify_rejects_bad_window() {
        let p = DensityProfile::hyperbolic(3).unwrap();
        assert!(verify_conditions(&p, 1.0, 0.5, 10.0, 1e-6).is_err());
    }

    #[test]
    fn nonfinite_table_is_rejected() {
        let table = vec![(0.1, 1.0), (0.2, f64::NAN), (0.3, 2.0)];
        assert!(matches!(
            DensityProfile::custom("bad", &table, Some(0.5), None, None),
            Err(Error::ProfileEvaluation { .. })
        ));
    }
}
