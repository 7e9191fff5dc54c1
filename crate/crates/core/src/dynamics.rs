//! Multiplier symbols and the dynamics of the operators they define:
//! strips `S_p`, the heat threshold `c_p`, chaos classification, orbits,
//! periodic points and the resolvent region.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::linear;
use crate::radial::{RadialGridFunction, SpectralBasis, SpectralGridFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `ln(1/ε)` used to size the spatial spread of heat-type operators.
const HEAT_SPREAD_LOG: f64 = 37.0;

pub type SymbolFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum SymbolKind {
    Heat { t: f64 },
    ShiftedHeat { c: Complex64, t: f64 },
    Resolvent { z: Complex64 },
    Constant { value: Complex64 },
    /// `inside` for `|Re λ| < edge`, `outside` elsewhere (discontinuous).
    Step { edge: f64, inside: Complex64, outside: Complex64 },
    /// Values on `λ ≥ 0`, linearly interpolated in `|Re λ|`.
    Tabulated { lambdas: Vec<f64>, values: Vec<Complex64> },
    Custom { name: String, f: SymbolFn },
}

impl fmt::Debug for SymbolKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Heat { t } => write!(out, "Heat(t={t})"),
            SymbolKind::ShiftedHeat { c, t } => write!(out, "ShiftedHeat(c={c}, t={t})"),
            SymbolKind::Resolvent { z } => write!(out, "Resolvent(z={z})"),
            SymbolKind::Constant { value } => write!(out, "Constant({value})"),
            SymbolKind::Step { edge, inside, outside } => write!(out, "Step(edge={edge}, inside={inside}, outside={outside})"),
            SymbolKind::Tabulated { lambdas, .. } => write!(out, "Tabulated({} nodes)", lambdas.len()),
            SymbolKind::Custom { name, .. } => write!(out, "Custom({name})"),
        }
    }
}

/// An even multiplier symbol `m(λ)` together with the half-width of the strip
/// on which it is holomorphic (zero when it is not).
#[derive(Debug, Clone)]
pub struct Symbol {
    kind: SymbolKind,
    rho: f64,
    strip_halfwidth: f64,
    holomorphic: bool,
}

impl Symbol {
    pub fn heat(rho: f64, t: f64) -> Result<Self> {
        positive_time(t)?;
        Ok(Symbol { kind: SymbolKind::Heat { t }, rho, strip_halfwidth: f64::INFINITY, holomorphic: true })
    }

    pub fn shifted_heat(rho: f64, c: Complex64, t: f64) -> Result<Self> {
        positive_time(t)?;
        Ok(Symbol { kind: SymbolKind::ShiftedHeat { c, t }, rho, strip_halfwidth: f64::INFINITY, holomorphic: true })
    }

    /// `−1/((λ² + ρ²) + z)`; holomorphic for `|Im λ|` below the imaginary part
    /// of its poles `±sqrt(−z − ρ²)`.
    pub fn resolvent(rho: f64, z: Complex64) -> Self {
        let pole = (-z - rho * rho).sqrt();
        Symbol { kind: SymbolKind::Resolvent { z }, rho, strip_halfwidth: pole.im.abs(), holomorphic: true }
    }

    pub fn constant(rho: f64, value: Complex64) -> Self {
        Symbol { kind: SymbolKind::Constant { value }, rho, strip_halfwidth: f64::INFINITY, holomorphic: true }
    }

    /// The `±1` step: `−1` on `(−edge, edge)`, `+1` elsewhere.
    pub fn step(rho: f64, edge: f64) -> Self {
        Symbol {
            kind: SymbolKind::Step { edge, inside: Complex64::new(-1.0, 0.0), outside: ONE },
            rho,
            strip_halfwidth: 0.0,
            holomorphic: false,
        }
    }

    pub fn tabulated(rho: f64, lambdas: Vec<f64>, values: Vec<Complex64>, strip_halfwidth: f64) -> Result<Self> {
        if lambdas.len() != values.len() || lambdas.len() < 2 || lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("tabulated symbol needs >= 2 increasing nodes with matching values".into()));
        }
        Ok(Symbol { kind: SymbolKind::Tabulated { lambdas, values }, rho, strip_halfwidth, holomorphic: strip_halfwidth > 0.0 })
    }

    /// A formula symbol; holomorphy on `|Im λ| < strip_halfwidth` is taken on trust.
    pub fn custom(rho: f64, name: &str, strip_halfwidth: f64, f: SymbolFn) -> Self {
        Symbol {
            kind: SymbolKind::Custom { name: name.to_string(), f },
            rho,
            strip_halfwidth,
            holomorphic: strip_halfwidth > 0.0,
        }
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn strip_halfwidth(&self) -> f64 {
        self.strip_halfwidth
    }

    pub fn is_holomorphic(&self) -> bool {
        self.holomorphic
    }

    pub fn describe(&self) -> String {
        format!("{:?}", self.kind)
    }

    /// `m(λ)`.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mu = lambda * lambda + self.rho * self.rho;
        match &self.kind {
            SymbolKind::Heat { t } => (-mu * *t).exp(),
            SymbolKind::ShiftedHeat { c, t } => ((*c - mu) * *t).exp(),
            SymbolKind::Resolvent { z } => -ONE / (mu + *z),
            SymbolKind::Constant { value } => *value,
            SymbolKind::Step { edge, inside, outside } => {
                if lambda.re.abs() < *edge {
                    *inside
                } else {
                    *outside
                }
            }
            SymbolKind::Tabulated { lambdas, values } => {
                let x = lambda.re.abs();
                let re: Vec<f64> = values.iter().map(|v| v.re).collect();
                let im: Vec<f64> = values.iter().map(|v| v.im).collect();
                Complex64::new(linear(lambdas, &re, x), linear(lambdas, &im, x))
            }
            SymbolKind::Custom { f, .. } => f(lambda),
        }
    }

    /// `ln |m(λ)|`, exact for the heat family even where `|m|` under- or overflows.
    pub fn log_abs(&self, lambda: Complex64) -> f64 {
        let mu = lambda * lambda + self.rho * self.rho;
        match &self.kind {
            SymbolKind::Heat { t } => -(mu.re * t),
            SymbolKind::ShiftedHeat { c, t } => (c.re - mu.re) * t,
            _ => self.eval(lambda).norm().ln(),
        }
    }

    /// Largest `t` by which heat-type operators spread support, if known.
    fn heat_time(&self) -> Option<f64> {
        match &self.kind {
            SymbolKind::Heat { t } | SymbolKind::ShiftedHeat { t, .. } => Some(*t),
            SymbolKind::Constant { .. } => Some(0.0),
            _ => None,
        }
    }

    /// First pole with `|Im λ| < limit`, if any.
    pub fn pole_within(&self, limit: f64) -> Option<Complex64> {
        match &self.kind {
            SymbolKind::Resolvent { z } => {
                let pole = (-*z - self.rho * self.rho).sqrt();
                (pole.im.abs() < limit).then_some(pole)
            }
            _ => None,
        }
    }
}

fn positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be positive (got {t})")))
    }
}

/// `λ ↦ conj(m(conj λ))`.
pub fn dual_symbol(m: &Symbol) -> Symbol {
    let kind = match &m.kind {
        SymbolKind::Heat { t } => SymbolKind::Heat { t: *t },
        SymbolKind::ShiftedHeat { c, t } => SymbolKind::ShiftedHeat { c: c.conj(), t: *t },
        SymbolKind::Resolvent { z } => SymbolKind::Resolvent { z: z.conj() },
        SymbolKind::Constant { value } => SymbolKind::Constant { value: value.conj() },
        SymbolKind::Step { edge, inside, outside } => SymbolKind::Step { edge: *edge, inside: inside.conj(), outside: outside.conj() },
        SymbolKind::Tabulated { lambdas, values } => {
            SymbolKind::Tabulated { lambdas: lambdas.clone(), values: values.iter().map(|v| v.conj()).collect() }
        }
        SymbolKind::Custom { name, f } => {
            let f = Arc::clone(f);
            SymbolKind::Custom { name: format!("dual({name})"), f: Arc::new(move |l: Complex64| f(l.conj()).conj()) }
        }
    };
    Symbol { kind, ..m.clone() }
}

/// Hölder conjugate, with `1 ↔ ∞`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// The strip `S_p = {|Im λ| < |1 − 2/p| ρ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub p: f64,
    pub q: f64,
    pub halfwidth: f64,
    /// `γ_p = 1 − 2/p`.
    pub gamma_p: f64,
    /// `γ_q = 1 − 2/q = −γ_p`.
    pub gamma_q: f64,
}

impl StripSpec {
    pub fn new(p: f64, rho: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Usage(format!("exponent p must lie in [1, ∞] (got {p})")));
        }
        let q = conjugate_exponent(p);
        let gamma_p = 1.0 - 2.0 / p;
        let gamma_q = 1.0 - 2.0 / q;
        Ok(StripSpec { p, q, halfwidth: gamma_p.abs() * rho, gamma_p, gamma_q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    /// Set for `p ∈ {1, ∞}`, where the limit value 0 is returned.
    pub endpoint: bool,
}

/// `c_p = 4ρ²/(pq)`.
pub fn c_threshold(rho: f64, p: f64) -> Result<Threshold> {
    if !(p >= 1.0) {
        return Err(Error::Usage(format!("exponent p must lie in [1, ∞] (got {p})")));
    }
    if p == 1.0 || p.is_infinite() {
        return Ok(Threshold { value: 0.0, endpoint: true });
    }
    let q = conjugate_exponent(p);
    Ok(Threshold { value: 4.0 * rho * rho / (p * q), endpoint: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpNormBound {
    /// `e^{−c_p t}`.
    pub bound: f64,
    /// `ĥ_t(−iγ_p ρ)`.
    pub symbol_value: f64,
    pub gamma_p: f64,
    pub c_p: f64,
}

/// Bound `e^{−c_p t}` for the heat operator on `L^p`, together with the heat
/// symbol at `λ = −iγ_p ρ` it must coincide with.
pub fn heat_opnorm_bound(rho: f64, p: f64, t: f64) -> Result<OpNormBound> {
    if p == 2.0 {
        return Err(Error::Usage("operator-norm bound is stated for p != 2".into()));
    }
    positive_time(t)?;
    let c_p = c_threshold(rho, p)?.value;
    let gamma_p = 1.0 - 2.0 / p;
    let at = Complex64::new(0.0, -gamma_p * rho);
    let symbol_value = Symbol::heat(rho, t)?.eval(at).re;
    Ok(OpNormBound { bound: (-c_p * t).exp(), symbol_value, gamma_p, c_p })
}

/// Spatial reach of `e^{tΔ}` beyond the support of its input.
pub fn heat_spread(rho: f64, t: f64) -> f64 {
    2.0 * rho * t + (4.0 * t * HEAT_SPREAD_LOG).sqrt()
}

/// `Λ` with `e^{−tΛ²} = ε`.
pub fn heat_lambda_max(t: f64, eps: f64) -> f64 {
    ((1.0 / eps).ln() / t).sqrt()
}

/// `h_t = C₀ ∫ e^{−t(λ²+ρ²)} φ_λ |c|⁻² dλ`.
pub fn heat_kernel(basis: &SpectralBasis, t: f64) -> Result<RadialGridFunction> {
    let sym = Symbol::heat(basis.space().profile().rho(), t)?;
    let big_f = basis.spectral_fn(|l| sym.eval(Complex64::new(l, 0.0)));
    basis.inverse_with_support(&big_f, heat_spread(sym.rho, t))
}

fn symbol_on_grid(basis: &SpectralBasis, m: &Symbol) -> Result<SpectralGridFunction> {
    let big_m = basis.spectral_fn(|l| m.eval(Complex64::new(l, 0.0)));
    if let Some((l, _)) = basis.lambdas().iter().zip(big_m.values()).find(|(_, v)| !v.is_finite()) {
        return Err(Error::Pole { lambda: Complex64::new(*l, 0.0) });
    }
    Ok(big_m)
}

fn output_support(basis: &SpectralBasis, m: &Symbol, f: &RadialGridFunction, steps: usize) -> f64 {
    match m.heat_time() {
        Some(t) => f.support() + heat_spread(m.rho, t * steps as f64),
        None => basis.space().r_max(),
    }
}

/// `T f` with `(Tf)^ = m f̂`.
pub fn apply_multiplier(basis: &SpectralBasis, m: &Symbol, f: &RadialGridFunction) -> Result<RadialGridFunction> {
    apply_multiplier_power(basis, m, f, 1)
}

/// `Tⁿ f`, composed on the spectral side.
pub fn apply_multiplier_power(basis: &SpectralBasis, m: &Symbol, f: &RadialGridFunction, n: usize) -> Result<RadialGridFunction> {
    let big_m = symbol_on_grid(basis, m)?;
    let fhat = basis.forward(f)?;
    let out = fhat.with_values(fhat.values().iter().zip(big_m.values()).map(|(a, b)| a * b.powu(n as u32)).collect())?;
    basis.inverse_with_support(&out, output_support(basis, m, f, n))
}

/// Sampling of the strip for witness searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessGrid {
    pub n_re: usize,
    pub n_im: usize,
    pub lambda_max: f64,
}

impl Default for WitnessGrid {
    fn default() -> Self {
        WitnessGrid { n_re: 200, n_im: 50, lambda_max: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    ChaoticAfterScaling,
    Chaotic,
    NotChaotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    PLeq2,
    ConstantSymbol,
    Contraction,
    NoExpandingWitness,
    WitnessPairFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub l1: Complex64,
    pub l2: Complex64,
    pub m1_abs: f64,
    pub m2_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosVerdict {
    pub classification: Classification,
    pub reason: Reason,
    /// Scaling `ν` for `ChaoticAfterScaling`; witnesses then refer to `m/ν`.
    pub nu: Option<Complex64>,
    pub witnesses: Option<Witnesses>,
    pub c_p: f64,
    pub strip_halfwidth: f64,
    pub p: f64,
    pub symbol: String,
    pub sup_abs: Option<f64>,
    pub inf_abs: Option<f64>,
    /// Holomorphy of the symbol on the strip is assumed, not verified.
    pub holomorphy_assumed: bool,
}

/// Chaos classification of the multiplier with symbol `m` on `L^p`.
pub fn classify_chaos(m: &Symbol, p: f64, rho: f64, grid: &WitnessGrid) -> Result<ChaosVerdict> {
    let strip = StripSpec::new(p, rho)?;
    let c_p = c_threshold(rho, p)?.value;
    let holomorphy_assumed = matches!(m.kind, SymbolKind::Custom { .. } | SymbolKind::Tabulated { .. });
    let base = ChaosVerdict {
        classification: Classification::NotChaotic,
        reason: Reason::PLeq2,
        nu: None,
        witnesses: None,
        c_p,
        strip_halfwidth: strip.halfwidth,
        p,
        symbol: m.describe(),
        sup_abs: None,
        inf_abs: None,
        holomorphy_assumed,
    };
    if !m.holomorphic && p != 2.0 {
        return Err(Error::Usage(format!("{} is not holomorphic on a strip; only p = 2 is meaningful", m.describe())));
    }
    if p <= 2.0 {
        return Ok(base);
    }
    if m.strip_halfwidth < strip.halfwidth && m.pole_within(strip.halfwidth).is_none() {
        return Err(Error::StripViolation { lambda: Complex64::new(0.0, strip.halfwidth), limit: m.strip_halfwidth });
    }
    if let Some(pole) = m.pole_within(strip.halfwidth) {
        return Err(Error::Pole { lambda: pole });
    }
    let hw = strip.halfwidth * (1.0 - 1e-3);
    let n_re = grid.n_re.max(2);
    let n_im = grid.n_im.max(2);
    let mut ims: Vec<f64> = (0..n_im).map(|j| hw * j as f64 / (n_im - 1) as f64).collect();
    ims.extend((1..n_im).map(|j| -hw * j as f64 / (n_im - 1) as f64));
    let samples: Vec<(Complex64, Complex64)> = (0..n_re)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = grid.lambda_max * i as f64 / (n_re - 1) as f64;
            ims.iter().map(move |&y| {
                let l = Complex64::new(x, y);
                (l, m.eval(l))
            })
        })
        .collect();
    if let Some((l, _)) = samples.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Pole { lambda: *l });
    }
    let (mut lo, mut hi) = (samples[0], samples[0]);
    for s in &samples {
        if s.1.norm() < lo.1.norm() {
            lo = *s;
        }
        if s.1.norm() > hi.1.norm() {
            hi = *s;
        }
    }
    let (inf, sup) = (lo.1.norm(), hi.1.norm());
    let mut v = ChaosVerdict { sup_abs: Some(sup), inf_abs: Some(inf), ..base };
    if sup - inf <= 1e-10 * sup.max(1.0) {
        v.reason = Reason::ConstantSymbol;
        return Ok(v);
    }
    if inf < 1.0 && sup > 1.0 {
        v.classification = Classification::Chaotic;
        v.reason = Reason::WitnessPairFound;
        v.witnesses = Some(Witnesses { l1: lo.0, l2: hi.0, m1_abs: inf, m2_abs: sup });
        return Ok(v);
    }
    if sup <= 1.0 {
        v.reason = if sup < 1.0 - 1e-12 { Reason::Contraction } else { Reason::NoExpandingWitness };
        return Ok(v);
    }
    // |m| >= 1 on the whole sample: rescale by a value of m between the extremes
    let target = (inf * sup).sqrt();
    let pick = samples
        .iter()
        .min_by(|a, b| (a.1.norm() - target).abs().total_cmp(&(b.1.norm() - target).abs()))
        .unwrap();
    let nu = pick.1;
    v.classification = Classification::ChaoticAfterScaling;
    v.reason = Reason::WitnessPairFound;
    v.nu = Some(nu);
    v.witnesses = Some(Witnesses { l1: lo.0, l2: hi.0, m1_abs: inf / nu.norm(), m2_abs: sup / nu.norm() });
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub p: f64,
    /// `‖Tⁿ f‖_p` for `n = 0..=N` (up to truncation).
    pub norms: Vec<f64>,
    /// `ln ‖Tⁿ f‖_p`, finite even when `norms` over- or underflows.
    pub log_norms: Vec<f64>,
    /// `‖T^{n+1} f‖_p / ‖Tⁿ f‖_p`.
    pub growth: Vec<f64>,
    pub truncated: bool,
    pub flag: Option<String>,
}

/// `‖Tⁿ f‖_p`, `n = 0..=steps`, from `mⁿ f̂` carried with a separate
/// logarithmic scale.
pub fn orbit_simulate(basis: &SpectralBasis, m: &Symbol, f: &RadialGridFunction, p: f64, steps: usize) -> Result<OrbitTrace> {
    if steps == 0 {
        return Err(Error::Usage("orbit length must be at least 1".into()));
    }
    let big_m = symbol_on_grid(basis, m)?;
    let mut current = basis.forward(f)?;
    let mut log_scale = 0.0f64;
    let mut trace = OrbitTrace { p, norms: vec![], log_norms: vec![], growth: vec![], truncated: false, flag: None };
    for n in 0..=steps {
        if n > 0 {
            let next: Vec<Complex64> = current.values().iter().zip(big_m.values()).map(|(a, b)| a * b).collect();
            let peak = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let next = if peak > 0.0 && !(1e-100..=1e100).contains(&peak) {
                log_scale += peak.ln();
                next.into_iter().map(|v| v / peak).collect()
            } else {
                next
            };
            current = current.with_values(next)?;
        }
        let support = output_support(basis, m, f, n);
        let norm = basis.inverse_with_support(&current, support).and_then(|g| g.lp_norm(p));
        let norm = match norm {
            Ok(v) => v,
            Err(e @ (Error::Truncation(_) | Error::Tail { .. })) => {
                trace.truncated = true;
                trace.flag = Some(format!("orbit truncated at step {n}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let log_norm = norm.ln() + log_scale;
        if let Some(prev) = trace.log_norms.last() {
            trace.growth.push((log_norm - prev).exp());
        }
        trace.log_norms.push(log_norm);
        trace.norms.push(log_norm.exp());
        if !log_norm.exp().is_finite() && log_norm.is_finite() {
            trace.flag.get_or_insert_with(|| format!("norm overflows f64 from step {n}; see log_norms"));
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGrowth {
    pub lambda: Complex64,
    pub m_abs: f64,
    /// `‖Tⁿ P‖_p / (‖P‖_p |m(λ)|ⁿ)` for `n = 1..=steps`.
    pub relative: Vec<f64>,
    pub max_deviation: f64,
}

/// Iterates `T` on a packet of eigenfunctions `φ_μ`, `μ` on a short segment
/// around `lambda`, using `Tφ_μ = m(μ) φ_μ`, and compares the growth of the
/// truncated `L^p` norm with `|m(λ)|ⁿ`.
pub fn mode_growth(basis: &SpectralBasis, m: &Symbol, lambda: Complex64, p: f64, steps: usize, half_width: f64) -> Result<ModeGrowth> {
    let space = basis.space();
    let opts = crate::eigen::SolverOptions { strip_limit: Some(space.profile().rho()), ..basis.tolerances().solver_options() };
    let (x, w) = crate::quadrature::gauss_legendre(8);
    let mut cols = Vec::new();
    for (xi, wi) in x.iter().zip(&w) {
        let mu = lambda + Complex64::new(half_width * xi, 0.0);
        let phi: Vec<Complex64> = crate::eigen::phi_at(space.profile(), mu, space.nodes(), &opts)?.into_iter().map(|s| s[0]).collect();
        cols.push((m.eval(mu), wi * half_width, phi));
    }
    let norm_of = |n: u32| -> Result<f64> {
        let mut vals = vec![ZERO; space.nodes().len()];
        for (mv, wt, phi) in &cols {
            let c = mv.powu(n) * *wt;
            for (v, f) in vals.iter_mut().zip(phi) {
                *v += c * f;
            }
        }
        Ok(RadialGridFunction::new(Arc::clone(space), vals)?.lp_norm_truncated(p))
    };
    let base = norm_of(0)?;
    let m_abs = m.eval(lambda).norm();
    let mut relative = Vec::with_capacity(steps);
    for n in 1..=steps {
        relative.push(norm_of(n as u32)? / (base * m_abs.powi(n as i32)));
    }
    let max_deviation = relative.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    Ok(ModeGrowth { lambda, m_abs, relative, max_deviation })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub lambda: f64,
    pub n: usize,
}

fn minimal_period(v: Complex64, n_max: usize) -> Option<usize> {
    let turns = v.arg() / (2.0 * PI);
    (1..=n_max).find(|&n| {
        let x = turns * n as f64;
        (x - x.round()).abs() < 1e-9
    })
}

/// Real `λ ∈ [0, lambda_max]` with `m(λ)ⁿ = 1` for some `n <= n_max`.
pub fn periodic_point_search(m: &Symbol, lambda_max: f64, samples: usize, n_max: usize) -> Vec<PeriodicPoint> {
    let n = samples.max(2);
    let xs: Vec<f64> = (0..n).map(|i| lambda_max * i as f64 / (n - 1) as f64).collect();
    let at = |x: f64| m.eval(Complex64::new(x, 0.0));
    let gap: Vec<f64> = xs.iter().map(|&x| at(x).norm() - 1.0).collect();
    let mut out = Vec::new();
    if gap.iter().all(|g| g.abs() <= 1e-12) {
        for &x in &xs {
            if let Some(k) = minimal_period(at(x), n_max) {
                out.push(PeriodicPoint { lambda: x, n: k });
            }
        }
        return out;
    }
    let mut roots = Vec::new();
    for i in 0..n {
        if gap[i] == 0.0 {
            roots.push(xs[i]);
        } else if i + 1 < n && gap[i] * gap[i + 1] < 0.0 {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let sa = gap[i].signum();
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (at(mid).norm() - 1.0).signum() == sa {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    for x in roots {
        if let Some(k) = minimal_period(at(x), n_max) {
            out.push(PeriodicPoint { lambda: x, n: k });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleRegionReport {
    pub rho: f64,
    pub p: f64,
    pub z: Complex64,
    pub a: f64,
    pub c_p: f64,
    /// Verdict of `τ² > −4a²(σ + c_p)`.
    pub bounded: bool,
    /// Verdict of the literal `τ > −4a²(σ + c_p)`; may differ from `bounded`.
    pub bounded_tau_form: bool,
    pub forms_agree: bool,
    /// Euclidean distance from `z` to the curve `τ² = −4a²(σ + c_p)`.
    pub boundary_distance: f64,
    /// `a = 0` (`p = 2`): the curve collapses and the criterion is degenerate.
    pub degenerate: bool,
}

/// Real roots of `s³ + P s + Q = 0`.
fn depressed_cubic_roots(pp: f64, qq: f64) -> Vec<f64> {
    let disc = (qq / 2.0).powi(2) + (pp / 3.0).powi(3);
    if disc > 0.0 {
        let sq = disc.sqrt();
        vec![(-qq / 2.0 + sq).cbrt() + (-qq / 2.0 - sq).cbrt()]
    } else if pp == 0.0 {
        vec![0.0]
    } else {
        let r = (-pp / 3.0).sqrt();
        let arg = ((-qq / 2.0) / r.powi(3)).clamp(-1.0, 1.0).acos();
        (0..3).map(|k| 2.0 * r * ((arg - 2.0 * PI * k as f64) / 3.0).cos()).collect()
    }
}

/// Where `R(z)` is bounded on `L^p`, `p ∈ [1, 2]`, with `a = ρ(2/p − 1)`.
pub fn resolvent_pole_region(rho: f64, p: f64, z: Complex64) -> Result<PoleRegionReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::Usage(format!("pole region is stated for p in [1, 2] (got {p})")));
    }
    let a = rho * (2.0 / p - 1.0);
    let c_p = c_threshold(rho, p)?.value;
    let (sigma, tau) = (z.re, z.im);
    let rhs = -4.0 * a * a * (sigma + c_p);
    let bounded = tau * tau > rhs;
    let bounded_tau_form = tau > rhs;
    let degenerate = a == 0.0;
    let boundary_distance = if degenerate {
        tau.abs()
    } else {
        // curve (σ, τ) = (−c_p − s²k, s), k = 1/(4a²): nearest point solves
        // 2k²s³ + (2k w + 1)s − τ = 0 with w = σ + c_p
        let k = 1.0 / (4.0 * a * a);
        let w = sigma + c_p;
        let roots = depressed_cubic_roots((2.0 * k * w + 1.0) / (2.0 * k * k), -tau / (2.0 * k * k));
        roots
            .into_iter()
            .map(|s| ((w + k * s * s).powi(2) + (tau - s).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    Ok(PoleRegionReport {
        rho,
        p,
        z,
        a,
        c_p,
        bounded,
        bounded_tau_form,
        forms_agree: bounded == bounded_tau_form,
        boundary_distance,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventSearch {
    pub found: bool,
    pub z: Option<Complex64>,
    pub verdict: Option<ChaosVerdict>,
    pub attempts: usize,
}

/// Looks for `z` just outside the `L^p` spectral region
/// `{−(λ² + ρ²) : λ ∈ S_p}` whose resolvent symbol admits a witness pair.
pub fn resolvent_chaotic_z(rho: f64, p: f64, grid: &WitnessGrid) -> Result<ResolventSearch> {
    if !(p > 2.0) {
        return Err(Error::Usage(format!("resolvent chaos needs p > 2 (got {p})")));
    }
    let hw = StripSpec::new(p, rho)?.halfwidth;
    let mut attempts = 0;
    for kappa in [1.05, 1.2, 1.5, 2.0, 3.0] {
        for s in [0.0, 0.25, 0.5, 1.0, 2.0] {
            attempts += 1;
            let pole = Complex64::new(s, kappa * hw);
            // adding +0 clears a signed zero in the imaginary part
            let z = -(pole * pole + rho * rho) + ZERO;
            let verdict = classify_chaos(&Symbol::resolvent(rho, z), p, rho, grid)?;
            if verdict.classification == Classification::Chaotic {
                return Ok(ResolventSearch { found: true, z: Some(z), verdict: Some(verdict), attempts });
            }
        }
    }
    Ok(ResolventSearch { found: false, z: None, verdict: None, attempts })
}
