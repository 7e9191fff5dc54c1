//! Spherical eigenfunctions `φ_λ`, the c-function and the Plancherel density.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityProfile;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::ode::{integrate_to_nodes, State, StepControl};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub rk_tol: f64,
    /// Radius where the Taylor start hands over to the integrator.
    pub r_start: f64,
    /// Largest admissible `|Im λ|`; `None` means `ρ`.
    pub strip_limit: Option<f64>,
    /// Relative agreement required between successive matching radii.
    pub match_tol: f64,
    pub match_levels: usize,
    /// Matching systems with a larger condition number carry a warning.
    pub cond_warn: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rk_tol: 1e-10,
            r_start: 1e-3,
            strip_limit: None,
            match_tol: 1e-9,
            match_levels: 10,
            cond_warn: 1e8,
        }
    }
}

fn check_strip(p: &DensityProfile, lambda: Complex64, opts: &SolverOptions) -> Result<()> {
    let limit = opts.strip_limit.unwrap_or(p.rho());
    if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.im.abs() > limit * (1.0 + 1e-12) {
        return Err(Error::StripViolation { lambda, limit });
    }
    Ok(())
}

/// `(u, u')` from `1 + a₂r² + a₄r⁴`.
fn taylor_start(p: &DensityProfile, mu: Complex64, r: f64) -> State {
    let alpha = p.alpha();
    let a2 = -mu / (2.0 * (2.0 * alpha + 2.0));
    let a4 = -a2 * (mu + 4.0 * p.series_b2()) / (8.0 * (alpha + 2.0));
    let r2 = r * r;
    [ONE + a2 * r2 + a4 * r2 * r2, a2 * (2.0 * r) + a4 * (4.0 * r2 * r)]
}

/// `(φ_λ, φ_λ')` at arbitrary non-negative radii (any order).
pub fn phi_at(p: &DensityProfile, lambda: Complex64, radii: &[f64], opts: &SolverOptions) -> Result<Vec<State>> {
    p.require_positive_rho()?;
    check_strip(p, lambda, opts)?;
    if radii.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter("radii must be finite and non-negative".into()));
    }
    let mu = lambda * lambda + p.rho() * p.rho();
    let scale = mu.norm().sqrt();
    // keep the neglected r⁶ term far below the tolerance at high frequency
    let r_start = if scale * opts.r_start > 0.05 { 0.05 / scale } else { opts.r_start };

    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let mut out = vec![[ZERO; 2]; radii.len()];
    let mut far_idx = Vec::new();
    let mut far_r = Vec::new();
    for &i in &order {
        let r = radii[i];
        if r == 0.0 {
            out[i] = [ONE, ZERO];
        } else if r <= r_start {
            out[i] = taylor_start(p, mu, r);
        } else {
            far_idx.push(i);
            far_r.push(r);
        }
    }
    if far_r.is_empty() {
        return Ok(out);
    }
    let ctl = StepControl::new(opts.rk_tol, lambda.norm() + p.rho());
    let rhs = |r: f64, y: &State| -> State {
        let l = p.log_derivative(r);
        [y[1], -y[1] * l - y[0] * mu]
    };
    let sol = integrate_to_nodes(rhs, r_start, taylor_start(p, mu, r_start), &far_r, &ctl)?;
    for (i, s) in far_idx.into_iter().zip(sol) {
        out[i] = s;
    }
    Ok(out)
}

/// `φ_λ` (and derivative) on a (λ × r) lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenTable {
    pub profile_id: String,
    pub lambdas: Vec<Complex64>,
    pub r_grid: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
    pub derivs: Vec<Vec<Complex64>>,
    /// Worst relative ODE residual over the lattice (spectral differentiation).
    pub ode_residual: f64,
    pub rk_tol: f64,
}

impl EigenTable {
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.values[j]
    }
}

/// Relative residual of `u'' + (A'/A) u' + μ u` on the panel nodes, using the
/// panel-wise polynomial derivative of `u'`.
pub fn ode_residual(p: &DensityProfile, lambda: Complex64, grid: &RadialGrid, values: &[Complex64], derivs: &[Complex64]) -> f64 {
    let mu = lambda * lambda + p.rho() * p.rho();
    let panels = grid.panels();
    let m = panels.order();
    let du = panels.differentiate(&derivs[1..]);
    let nodes = panels.nodes();
    let mut worst = 0.0f64;
    for block in 0..panels.panels() {
        let mut scale = 0.0f64;
        let mut res = 0.0f64;
        for i in block * m..(block + 1) * m {
            let l = p.log_derivative(nodes[i]);
            let (u, up) = (values[i + 1], derivs[i + 1]);
            scale = scale.max(du[i].norm() + l.abs() * up.norm() + mu.norm() * u.norm());
            res = res.max((du[i] + up * l + u * mu).norm());
        }
        if scale > 0.0 {
            worst = worst.max(res / scale);
        }
    }
    worst
}

/// `φ_λ` on a radial grid (single λ).
pub fn solve_phi(p: &DensityProfile, lambda: Complex64, grid: &RadialGrid, opts: &SolverOptions) -> Result<EigenTable> {
    solve_phi_grid(p, &[lambda], grid, opts)
}

/// `φ_λ` for every λ in `lambdas`, computed in parallel and assembled in order.
pub fn solve_phi_grid(p: &DensityProfile, lambdas: &[Complex64], grid: &RadialGrid, opts: &SolverOptions) -> Result<EigenTable> {
    let cols: Vec<(Vec<Complex64>, Vec<Complex64>, f64)> = lambdas
        .par_iter()
        .map(|&lambda| {
            let sol = phi_at(p, lambda, grid.nodes(), opts)?;
            let (v, d): (Vec<_>, Vec<_>) = sol.into_iter().map(|s| (s[0], s[1])).unzip();
            let res = ode_residual(p, lambda, grid, &v, &d);
            Ok((v, d, res))
        })
        .collect::<Result<_>>()?;
    let ode_residual = cols.iter().map(|c| c.2).fold(0.0, f64::max);
    let (values, derivs) = cols.into_iter().map(|(v, d, _)| (v, d)).unzip();
    Ok(EigenTable {
        profile_id: p.hash(),
        lambdas: lambdas.to_vec(),
        r_grid: grid.nodes().to_vec(),
        values,
        derivs,
        ode_residual,
        rk_tol: opts.rk_tol,
    })
}

/// Offset between the two matching radii.
pub fn matching_offset(lambda: Complex64) -> f64 {
    PI / (4.0 * lambda.re.abs().max(0.5))
}

/// First matching radius: `max(15/ρ, 15)`.
pub fn default_matching_radius(p: &DensityProfile) -> f64 {
    (15.0 / p.rho()).max(15.0)
}

/// Largest over smallest singular value of a 2×2 complex matrix.
fn condition_2x2(m: [[Complex64; 2]; 2]) -> f64 {
    let fro: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    let smax2 = 0.5 * (fro + disc);
    // σ_max σ_min = |det|
    if det > 0.0 { smax2 / det } else { f64::INFINITY }
}

/// Solves the 2×2 matching system for `(c(λ), c(−λ))` from `φ_λ` at two radii.
pub fn match_pair(rho: f64, lambda: Complex64, radii: [f64; 2], phi: [Complex64; 2]) -> Result<(Complex64, Complex64, f64)> {
    let i = Complex64::new(0.0, 1.0);
    let row = |r: f64| [(i * lambda * r).exp(), (-i * lambda * r).exp()];
    let m = [row(radii[0]), row(radii[1])];
    let b = [phi[0] * (rho * radii[0]).exp(), phi[1] * (rho * radii[1]).exp()];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let cond = condition_2x2(m);
    if !(cond < 1e12) || det.norm() == 0.0 {
        return Err(Error::DegenerateMatching { lambda, detail: format!("matching system condition number {cond:.3e}") });
    }
    let c_plus = (b[0] * m[1][1] - b[1] * m[0][1]) / det;
    let c_minus = (m[0][0] * b[1] - m[1][0] * b[0]) / det;
    Ok((c_plus, c_minus, cond))
}

/// One c-function evaluation with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CValue {
    pub lambda: Complex64,
    pub value: Complex64,
    /// Companion coefficient `c(−λ)` from the same system.
    pub companion: Complex64,
    pub conditioning: f64,
    /// Relative change between the last two matching radii.
    pub agreement: f64,
    pub radius: f64,
    pub settled: bool,
}

/// `c(λ)` by matching at `(R1 + 2j, R2 + 2j)`, `j = 0, 1, …`, stopping when
/// two successive values agree to `match_tol`.
pub fn compute_c(p: &DensityProfile, lambda: Complex64, r1: f64, r2: f64, opts: &SolverOptions) -> Result<CValue> {
    if lambda.norm() == 0.0 {
        return Err(Error::DegenerateMatching { lambda, detail: "λ = 0".into() });
    }
    if !(r1 > 0.0) || !(r2 > r1) {
        return Err(Error::InvalidParameter(format!("matching radii must satisfy 0 < R1 < R2 (got {r1}, {r2})")));
    }
    let levels = opts.match_levels.max(2);
    let radii: Vec<f64> = (0..levels).flat_map(|j| [r1 + 2.0 * j as f64, r2 + 2.0 * j as f64]).collect();
    let phi = phi_at(p, lambda, &radii, opts)?;
    let mut prev: Option<Complex64> = None;
    let mut last = None;
    for j in 0..levels {
        let (c, cm, cond) = match_pair(p.rho(), lambda, [radii[2 * j], radii[2 * j + 1]], [phi[2 * j][0], phi[2 * j + 1][0]])?;
        let agreement = prev.map_or(f64::INFINITY, |q| (c - q).norm() / c.norm());
        let cv = CValue { lambda, value: c, companion: cm, conditioning: cond, agreement, radius: radii[2 * j], settled: agreement <= opts.match_tol };
        if cv.settled {
            return Ok(cv);
        }
        prev = Some(c);
        last = Some(cv);
    }
    Ok(last.unwrap())
}

/// [`compute_c`] with `R1 = max(15/ρ, 15)` and `R2 = R1 + π/(4 max(|Re λ|, ½))`.
pub fn compute_c_auto(p: &DensityProfile, lambda: Complex64, opts: &SolverOptions) -> Result<CValue> {
    p.require_positive_rho()?;
    let r1 = default_matching_radius(p);
    compute_c(p, lambda, r1, r1 + matching_offset(lambda), opts)
}

/// `C₀ = 1/(2π ω_{n-1} K)` with `K = lim A(r) e^{-2ρr}`.
pub fn plancherel_constant(p: &DensityProfile) -> f64 {
    1.0 / (2.0 * PI * p.omega() * p.asymptotic_constant())
}

/// `c(λ)` and `C₀|c(λ)|⁻²` on a grid of positive λ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CFunctionTable {
    pub profile_id: String,
    pub lambdas: Vec<f64>,
    pub c_values: Vec<Complex64>,
    pub plancherel: Vec<f64>,
    pub c0: f64,
    pub asymptotic_constant: f64,
    pub conditioning: Vec<f64>,
    pub agreement: Vec<f64>,
    /// Per-node warnings (ill-conditioning, unsettled matching).
    pub notes: Vec<Option<String>>,
}

impl CFunctionTable {
    pub fn from_values(p: &DensityProfile, lambdas: &[f64], values: &[CValue], opts: &SolverOptions) -> Self {
        let c0 = plancherel_constant(p);
        let notes = values
            .iter()
            .map(|v| {
                let mut parts = Vec::new();
                if v.conditioning > opts.cond_warn {
                    parts.push(format!("conditioning {:.3e}", v.conditioning));
                }
                if !v.settled {
                    parts.push(format!("matching unsettled (relative change {:.3e})", v.agreement));
                }
                (!parts.is_empty()).then(|| parts.join("; "))
            })
            .collect();
        CFunctionTable {
            profile_id: p.hash(),
            lambdas: lambdas.to_vec(),
            c_values: values.iter().map(|v| v.value).collect(),
            plancherel: values.iter().map(|v| c0 / v.value.norm_sqr()).collect(),
            c0,
            asymptotic_constant: p.asymptotic_constant(),
            conditioning: values.iter().map(|v| v.conditioning).collect(),
            agreement: values.iter().map(|v| v.agreement).collect(),
            notes,
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

fn check_lambda_grid(lambdas: &[f64]) -> Result<()> {
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter(format!("Plancherel grid needs every λ > 0 (found {bad})")));
    }
    Ok(())
}

/// Tabulates `C₀|c(λ)|⁻²` on a grid of positive λ.
pub fn plancherel_density(p: &DensityProfile, lambdas: &[f64], opts: &SolverOptions) -> Result<CFunctionTable> {
    p.require_positive_rho()?;
    check_lambda_grid(lambdas)?;
    let values: Vec<CValue> = lambdas
        .par_iter()
        .map(|&l| compute_c_auto(p, Complex64::new(l, 0.0), opts))
        .collect::<Result<_>>()?;
    Ok(CFunctionTable::from_values(p, lambdas, &values, opts))
}

/// Eigenfunctions on the radial grid together with the c-function, from one
/// integration per λ.
pub fn eigen_and_plancherel(
    p: &DensityProfile,
    lambdas: &[f64],
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<(EigenTable, CFunctionTable)> {
    p.require_positive_rho()?;
    check_lambda_grid(lambdas)?;
    let n = grid.len();
    let r1 = default_matching_radius(p);
    let levels = opts.match_levels.max(2);
    let cols: Vec<(Vec<Complex64>, Vec<Complex64>, f64, CValue)> = lambdas
        .par_iter()
        .map(|&l| {
            let lambda = Complex64::new(l, 0.0);
            let delta = matching_offset(lambda);
            let mut radii = grid.nodes().to_vec();
            for j in 0..levels {
                radii.push(r1 + 2.0 * j as f64);
                radii.push(r1 + delta + 2.0 * j as f64);
            }
            let sol = phi_at(p, lambda, &radii, opts)?;
            let (v, d): (Vec<_>, Vec<_>) = sol[..n].iter().map(|s| (s[0], s[1])).unzip();
            let res = ode_residual(p, lambda, grid, &v, &d);
            let mut prev: Option<Complex64> = None;
            let mut cv = None;
            for j in 0..levels {
                let (a, b) = (n + 2 * j, n + 2 * j + 1);
                let (c, cm, cond) = match_pair(p.rho(), lambda, [radii[a], radii[b]], [sol[a][0], sol[b][0]])?;
                let agreement = prev.map_or(f64::INFINITY, |q| (c - q).norm() / c.norm());
                let settled = agreement <= opts.match_tol;
                cv = Some(CValue { lambda, value: c, companion: cm, conditioning: cond, agreement, radius: radii[a], settled });
                if settled {
                    break;
                }
                prev = Some(c);
            }
            Ok((v, d, res, cv.unwrap()))
        })
        .collect::<Result<_>>()?;
    let ode_residual = cols.iter().map(|c| c.2).fold(0.0, f64::max);
    let cvals: Vec<CValue> = cols.iter().map(|c| c.3).collect();
    let (values, derivs) = cols.into_iter().map(|(v, d, _, _)| (v, d)).unzip();
    let table = EigenTable {
        profile_id: p.hash(),
        lambdas: lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
        r_grid: grid.nodes().to_vec(),
        values,
        derivs,
        ode_residual,
        rk_tol: opts.rk_tol,
    };
    Ok((table, CFunctionTable::from_values(p, lambdas, &cvals, opts)))
}
