//! Radial functions on a profile: `L^p` norms, the spherical Fourier
//! transform and its inverse, and Plancherel / strip diagnostics.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigen_and_plancherel, phi_at, CFunctionTable, EigenTable, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialSpace, SpectralGrid};
use crate::interp::{Interp, Pchip};
use crate::quadrature::{gauss_legendre, PanelGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// integrand density at r_max, relative to the norm, above which the
// truncated integral is rejected
const TAIL_DENSITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rk_tol: f64,
    /// Relative size of a neglected `L^p` tail that is still accepted.
    pub quad_tol: f64,
    /// Relative spectral mass allowed beyond `Λ_max`.
    pub tail_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rk_tol: 1e-10, quad_tol: 1e-8, tail_tol: 1e-9 }
    }
}

impl Tolerances {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions { rk_tol: self.rk_tol, ..SolverOptions::default() }
    }
}

/// Samples `u(r_i)` of a radial function `f = u ∘ d` on the nodes of a
/// [`RadialSpace`]. Beyond `support` the function is taken to vanish.
#[derive(Debug, Clone)]
pub struct RadialGridFunction {
    space: Arc<RadialSpace>,
    values: Vec<Complex64>,
    support: f64,
    interp: Interp,
    splines: OnceLock<(Pchip, Pchip)>,
}

impl RadialGridFunction {
    pub fn new(space: Arc<RadialSpace>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.nodes().len() {
            return Err(Error::GridMismatch(format!("{} values for {} grid nodes", values.len(), space.nodes().len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Propagation { r: space.nodes()[i] });
        }
        let support = space.r_max();
        Ok(RadialGridFunction { space, values, support, interp: Interp::default(), splines: OnceLock::new() })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(space: &Arc<RadialSpace>, f: F) -> Result<Self> {
        let values = space.nodes().iter().map(|&r| f(r)).collect();
        Self::new(Arc::clone(space), values)
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(space: &Arc<RadialSpace>, f: F) -> Result<Self> {
        Self::from_fn(space, |r| Complex64::new(f(r), 0.0))
    }

    pub fn zero(space: &Arc<RadialSpace>) -> Self {
        Self::new(Arc::clone(space), vec![ZERO; space.nodes().len()]).unwrap()
    }

    /// `(a/2)·(exp(−((r − c)/w)²) + exp(−((r + c)/w)²))`, cut off where it
    /// drops below `e^{-30}`. The even extension keeps the function smooth at
    /// the origin, so its transform decays like a Gaussian.
    pub fn gaussian(space: &Arc<RadialSpace>, center: f64, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0) || !(center >= 0.0) {
            return Err(Error::InvalidParameter(format!("gaussian needs width > 0 and centre >= 0 (got {width}, {center})")));
        }
        let support = center + 30f64.sqrt() * width;
        let f = Self::from_real_fn(space, |r| {
            if r <= support {
                0.5 * amplitude * ((-((r - center) / width).powi(2)).exp() + (-((r + center) / width).powi(2)).exp())
            } else {
                0.0
            }
        })?;
        Ok(f.with_support(support))
    }

    /// `ψ_ε(r) = c_ε exp(−1/(1 − (r/ε)²))` on `[0, ε)`, with `c_ε` fixing `∫_X ψ_ε = 1`.
    pub fn approximate_identity(space: &Arc<RadialSpace>, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || eps >= space.r_max() {
            return Err(Error::InvalidParameter(format!("bump radius must lie in (0, r_max) (got {eps})")));
        }
        let shape = |r: f64| {
            let s = r / eps;
            if s < 1.0 {
                (-1.0 / (1.0 - s * s)).exp()
            } else {
                0.0
            }
        };
        let p = space.profile();
        let fine = PanelGrid::uniform(0.0, eps, 16, 16)?;
        let vals: Vec<f64> = fine.nodes().iter().map(|&r| shape(r) * p.density(r)).collect();
        let mass = p.omega() * fine.integrate(&vals);
        let f = Self::from_real_fn(space, |r| shape(r) / mass)?;
        Ok(f.with_support(eps))
    }

    /// Declares `u = 0` for `r > support`.
    pub fn with_support(mut self, support: f64) -> Self {
        let support = support.min(self.space.r_max()).max(0.0);
        let k = self.space.grid().count_within(support);
        for v in &mut self.values[k..] {
            *v = ZERO;
        }
        self.support = support;
        self.splines = OnceLock::new();
        self
    }

    pub fn with_interp(mut self, interp: Interp) -> Self {
        self.interp = interp;
        self
    }

    pub fn space(&self) -> &Arc<RadialSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn nodes(&self) -> &[f64] {
        self.space.nodes()
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    /// Number of nodes inside the support.
    pub fn active(&self) -> usize {
        self.space.grid().count_within(self.support)
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::GridMismatch("radial functions live on different grids".into()))
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        out.splines = OnceLock::new();
        out
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.same_space(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        let f = Self::new(Arc::clone(&self.space), values)?;
        Ok(f.with_support(self.support.max(other.support)))
    }

    /// Value at an arbitrary radius through the attached interpolation rule.
    pub fn eval(&self, r: f64) -> Complex64 {
        if r > self.support || r > self.space.r_max() || r < 0.0 {
            return ZERO;
        }
        let x = self.space.nodes();
        match self.interp {
            Interp::Linear => {
                let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
                let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
                Complex64::new(crate::interp::linear(x, &re, r), crate::interp::linear(x, &im, r))
            }
            Interp::MonotoneCubic => {
                let (re, im) = self.splines.get_or_init(|| {
                    (
                        Pchip::new(x.to_vec(), self.values.iter().map(|v| v.re).collect()),
                        Pchip::new(x.to_vec(), self.values.iter().map(|v| v.im).collect()),
                    )
                });
                Complex64::new(re.eval(r), im.eval(r))
            }
        }
    }

    /// Value at `r` of the panel-wise polynomial through the samples
    /// (spectrally accurate for smooth `u`; used by quadrature oracles).
    pub fn eval_smooth(&self, r: f64) -> Complex64 {
        if r > self.support || r < 0.0 {
            return ZERO;
        }
        self.space.grid().panels().interpolate(&self.values[1..], r)
    }

    /// `(ω_{n-1} ∫ |u|^p A dr)^{1/p}`, or `sup |u|` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::Usage(format!("L^p norm needs p >= 1 (got {p})")));
        }
        let k = self.active();
        if p.is_infinite() {
            return Ok(self.values[..k].iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        let measure = self.space.measure();
        let total: f64 = (0..k).map(|i| self.values[i].norm().powf(p) * measure[i]).sum();
        if self.support >= self.space.r_max() && k > 1 {
            let i = k - 1;
            let dens = self.space.profile().omega() * self.space.density()[i];
            let tail = self.values[i].norm().powf(p) * dens;
            if tail > TAIL_DENSITY_TOL * total {
                return Err(Error::Truncation(format!(
                    "|u|^p A does not decay at r_max = {}: tail density {tail:.3e} against total {total:.3e}",
                    self.space.r_max()
                )));
            }
        }
        Ok(total.powf(1.0 / p))
    }

    /// `L^p` norm over the grid without the decay check.
    pub fn lp_norm_truncated(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values[..self.active()].iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        self.lp_sum(p).powf(1.0 / p)
    }

    fn lp_sum(&self, p: f64) -> f64 {
        let k = self.active();
        (0..k).map(|i| self.values[i].norm().powf(p) * self.space.measure()[i]).sum()
    }

    /// `ω_{n-1} ∫ u A dr`.
    pub fn integral(&self) -> Complex64 {
        let k = self.active();
        (0..k).map(|i| self.values[i] * self.space.measure()[i]).sum()
    }

    /// `⟨f, g⟩ = ω_{n-1} ∫ u_f conj(u_g) A dr`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_space(other)?;
        let k = self.active().min(other.active());
        Ok((0..k).map(|i| self.values[i] * other.values[i].conj() * self.space.measure()[i]).sum())
    }

    /// `‖self − other‖₂ / ‖other‖₂` (absolute distance when `other = 0`).
    pub fn rel_l2_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))?;
        let d = diff.lp_sum(2.0).sqrt();
        let n = other.lp_sum(2.0).sqrt();
        Ok(if n > 0.0 { d / n } else { d })
    }
}

/// A spectral profile `F(λ)` on the nodes of a spectral grid, tied to the
/// Plancherel table of that grid.
#[derive(Debug, Clone)]
pub struct SpectralGridFunction {
    table: Arc<CFunctionTable>,
    weights: Arc<Vec<f64>>,
    values: Vec<Complex64>,
}

impl SpectralGridFunction {
    pub fn lambdas(&self) -> &[f64] {
        &self.table.lambdas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn table(&self) -> &Arc<CFunctionTable> {
        &self.table
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::GridMismatch("spectral functions live on different grids".into()))
        }
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch("spectral value count does not match the grid".into()));
        }
        Ok(SpectralGridFunction { table: Arc::clone(&self.table), weights: Arc::clone(&self.weights), values })
    }

    /// Pointwise `F(λ) · m(λ)`.
    pub fn map<M: Fn(f64, Complex64) -> Complex64>(&self, m: M) -> Self {
        let values = self.lambdas().iter().zip(&self.values).map(|(&l, &v)| m(l, v)).collect();
        SpectralGridFunction { table: Arc::clone(&self.table), weights: Arc::clone(&self.weights), values }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫ F conj(G) C₀|c(λ)|⁻² dλ`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).zip(self.weights.iter()).map(|((a, b), w)| a * b.conj() * w).sum())
    }
}

/// Eigenfunctions and Plancherel weights for a (radial grid × spectral grid)
/// pair; the workhorse behind every transform.
#[derive(Debug)]
pub struct SpectralBasis {
    space: Arc<RadialSpace>,
    spectral: SpectralGrid,
    eigen: EigenTable,
    table: Arc<CFunctionTable>,
    weights: Arc<Vec<f64>>,
    tol: Tolerances,
}

impl SpectralBasis {
    pub fn build(space: Arc<RadialSpace>, spectral: SpectralGrid, tol: Tolerances) -> Result<Arc<Self>> {
        let opts = tol.solver_options();
        let (mut eigen, table) = eigen_and_plancherel(space.profile(), spectral.nodes(), space.grid(), &opts)?;
        eigen.derivs.clear();
        Self::from_tables(space, spectral, eigen, table, tol)
    }

    /// Reassembles a basis from previously computed tables (cache reuse).
    pub fn from_tables(
        space: Arc<RadialSpace>,
        spectral: SpectralGrid,
        eigen: EigenTable,
        table: CFunctionTable,
        tol: Tolerances,
    ) -> Result<Arc<Self>> {
        let hash = space.profile().hash();
        if eigen.profile_id != hash || table.profile_id != hash {
            return Err(Error::GridMismatch("tables were computed for a different profile".into()));
        }
        if eigen.r_grid.as_slice() != space.nodes() || eigen.values.len() != spectral.len() {
            return Err(Error::GridMismatch("eigenfunction table does not match the grids".into()));
        }
        if table.lambdas.as_slice() != spectral.nodes() || eigen.lambdas.iter().zip(spectral.nodes()).any(|(a, b)| a.re != *b || a.im != 0.0) {
            return Err(Error::GridMismatch("spectral tables do not match the λ-grid".into()));
        }
        let weights = table.plancherel.iter().zip(spectral.weights()).map(|(d, w)| d * w).collect();
        Ok(Arc::new(SpectralBasis { space, spectral, eigen, table: Arc::new(table), weights: Arc::new(weights), tol }))
    }

    pub fn space(&self) -> &Arc<RadialSpace> {
        &self.space
    }

    pub fn spectral(&self) -> &SpectralGrid {
        &self.spectral
    }

    pub fn eigen(&self) -> &EigenTable {
        &self.eigen
    }

    pub fn cfunction(&self) -> &Arc<CFunctionTable> {
        &self.table
    }

    /// `C₀|c(λ_j)|⁻² w_j`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn lambdas(&self) -> &[f64] {
        self.spectral.nodes()
    }

    fn check_space(&self, f: &RadialGridFunction) -> Result<()> {
        if Arc::ptr_eq(&self.space, f.space()) {
            Ok(())
        } else {
            Err(Error::GridMismatch("function does not live on this basis' radial grid".into()))
        }
    }

    fn check_spectral(&self, f: &SpectralGridFunction) -> Result<()> {
        if Arc::ptr_eq(&self.table, &f.table) {
            Ok(())
        } else {
            Err(Error::GridMismatch("spectral function does not live on this basis' λ-grid".into()))
        }
    }

    /// Spectral function from a formula in λ.
    pub fn spectral_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> SpectralGridFunction {
        SpectralGridFunction {
            table: Arc::clone(&self.table),
            weights: Arc::clone(&self.weights),
            values: self.lambdas().iter().map(|&l| f(l)).collect(),
        }
    }

    /// `f̂` at every node of the spectral grid.
    pub fn forward(&self, f: &RadialGridFunction) -> Result<SpectralGridFunction> {
        self.check_space(f)?;
        let k = f.active();
        let weighted: Vec<Complex64> = (0..k).map(|i| f.values()[i] * self.space.measure()[i]).collect();
        let values = self
            .eigen
            .values
            .par_iter()
            .map(|col| weighted.iter().zip(&col[..k]).map(|(a, b)| a * b).sum())
            .collect();
        Ok(self.spectral_fn(|_| ZERO).with_values(values).unwrap())
    }

    /// `f̂(λ) = ω_{n-1} ∫ u φ_λ A dr` at one (possibly complex) λ.
    pub fn fourier(&self, f: &RadialGridFunction, lambda: Complex64) -> Result<Complex64> {
        self.check_space(f)?;
        let k = f.active();
        if k == 0 {
            return Ok(ZERO);
        }
        let phi: Vec<Complex64> = if lambda.im == 0.0 && lambda.re >= 0.0 {
            match self.lambdas().iter().position(|&l| l == lambda.re) {
                Some(j) => self.eigen.values[j][..k].to_vec(),
                None => self.solve_column(lambda, k)?,
            }
        } else {
            self.solve_column(lambda, k)?
        };
        let dens = self.space.density();
        let omega = self.space.profile().omega();
        let mut peak = 0.0f64;
        let mut sum = ZERO;
        for i in 0..k {
            let v = f.values()[i] * phi[i];
            peak = peak.max(v.norm() * dens[i]);
            sum += v * self.space.measure()[i];
        }
        // integrand must have died out when the function is not compactly supported
        if f.support() >= self.space.r_max() {
            let last = (f.values()[k - 1] * phi[k - 1]).norm() * dens[k - 1] * omega;
            if last > 1e-8 * peak * omega {
                let limit = self.space.profile().rho();
                return Err(if lambda.im != 0.0 {
                    Error::StripViolation { lambda, limit }
                } else {
                    Error::Truncation(format!("transform integrand does not decay at r_max (ratio {:.3e})", last / (peak * omega)))
                });
            }
        }
        Ok(sum)
    }

    fn solve_column(&self, lambda: Complex64, k: usize) -> Result<Vec<Complex64>> {
        let opts = self.tol.solver_options();
        Ok(phi_at(self.space.profile(), lambda, &self.space.nodes()[..k], &opts)?.into_iter().map(|s| s[0]).collect())
    }

    /// `C₀ ∫ F(λ) φ_λ |c(λ)|⁻² dλ` on the full radial grid.
    pub fn inverse(&self, big_f: &SpectralGridFunction) -> Result<RadialGridFunction> {
        self.inverse_with_support(big_f, self.space.r_max())
    }

    /// Inverse transform, evaluated only up to `support` (zero beyond).
    pub fn inverse_with_support(&self, big_f: &SpectralGridFunction, support: f64) -> Result<RadialGridFunction> {
        self.check_spectral(big_f)?;
        self.check_tail(big_f)?;
        let k = self.space.grid().count_within(support);
        let coef: Vec<Complex64> = big_f.values.iter().zip(self.weights.iter()).map(|(v, w)| v * w).collect();
        let mut values: Vec<Complex64> = (0..k)
            .into_par_iter()
            .map(|i| coef.iter().zip(&self.eigen.values).map(|(c, col)| c * col[i]).sum())
            .collect();
        values.resize(self.space.nodes().len(), ZERO);
        Ok(RadialGridFunction::new(Arc::clone(&self.space), values)?.with_support(support))
    }

    /// Relative spectral mass carried by the last panel, as a proxy for the
    /// part beyond `Λ_max`.
    pub fn tail_deficit(&self, big_f: &SpectralGridFunction) -> f64 {
        let mass: Vec<f64> = big_f.values.iter().zip(self.weights.iter()).map(|(v, w)| v.norm() * w).collect();
        let total: f64 = mass.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let m = self.spectral.panels().order();
        let last: f64 = mass[mass.len() - m..].iter().sum();
        last / total
    }

    fn check_tail(&self, big_f: &SpectralGridFunction) -> Result<()> {
        let deficit = self.tail_deficit(big_f);
        if deficit > self.tol.tail_tol {
            return Err(Error::Tail { deficit });
        }
        Ok(())
    }

    /// Compares `⟨f, g⟩` with `∫ f̂ conj(ĝ) C₀|c|⁻² dλ`.
    pub fn plancherel_check(&self, f: &RadialGridFunction, g: &RadialGridFunction) -> Result<PlancherelReport> {
        let spatial = f.inner(g)?;
        let spectral = self.forward(f)?.inner(&self.forward(g)?)?;
        let diff = (spatial - spectral).norm();
        let residual = if spatial.norm() > 0.0 { diff / spatial.norm() } else { diff };
        Ok(PlancherelReport { spatial, spectral, residual })
    }

    /// Samples `f̂` on the lines `Im λ = ±t` inside the strip `|Im λ| < γ_q ρ`
    /// and reports `sup |f̂|` per line against `‖f‖_p`.
    pub fn strip_bound_check(&self, f: &RadialGridFunction, p: f64, samples: usize) -> Result<StripReport> {
        if !(1.0..2.0).contains(&p) {
            return Err(Error::Usage(format!("strip bound check needs p in [1, 2) (got {p})")));
        }
        let gamma_q = 2.0 / p - 1.0;
        let rho = self.space.profile().rho();
        let halfwidth = gamma_q * rho;
        let norm = f.lp_norm(p)?;
        let lmax = self.spectral.lambda_max();
        let n = samples.max(2);
        let res: Vec<f64> = (0..n).map(|i| lmax * i as f64 / (n - 1) as f64).collect();
        let mut lines = Vec::new();
        for frac in [0.0, 0.25, 0.5, 0.75, 0.9] {
            for sign in [1.0, -1.0] {
                if frac == 0.0 && sign < 0.0 {
                    continue;
                }
                let t = sign * frac * halfwidth;
                let vals: Vec<f64> = res
                    .par_iter()
                    .map(|&x| self.fourier(f, Complex64::new(x, t)).map(|v| v.norm()))
                    .collect::<Result<_>>()?;
                lines.push(StripLine { im: t, sup: vals.into_iter().fold(0.0, f64::max) });
            }
        }
        let sup = lines.iter().map(|l| l.sup).fold(0.0, f64::max);
        let ratio = if norm > 0.0 { sup / norm } else { 0.0 };
        Ok(StripReport { p, gamma_q, halfwidth, lp_norm: norm, lines, ratio })
    }

    /// `|∮ f̂ dλ| / (perimeter · max |f̂|)` around `[a, b] × [c, d]`, which must
    /// lie strictly inside `|Im λ| < γ_q ρ` (`q` conjugate to `p`).
    pub fn holomorphy_check(&self, f: &RadialGridFunction, p: f64, rect: [f64; 4]) -> Result<f64> {
        let [a, b, c, d] = rect;
        if !(1.0..2.0).contains(&p) && p != 2.0 {
            return Err(Error::Usage(format!("holomorphy check needs p in [1, 2) (got {p})")));
        }
        let halfwidth = (2.0 / p - 1.0) * self.space.profile().rho();
        if !(b > a) || !(d > c) || c.abs() >= halfwidth || d.abs() >= halfwidth {
            return Err(Error::InvalidParameter(format!(
                "rectangle [{a}, {b}] x [{c}, {d}] must lie strictly inside |Im λ| < {halfwidth}"
            )));
        }
        let corners = [Complex64::new(a, c), Complex64::new(b, c), Complex64::new(b, d), Complex64::new(a, d)];
        let (x, w) = gauss_legendre(32);
        let mut pts = Vec::new();
        for s in 0..4 {
            let (z0, z1) = (corners[s], corners[(s + 1) % 4]);
            let half = (z1 - z0) * 0.5;
            for (xi, wi) in x.iter().zip(&w) {
                pts.push((z0 + half * (1.0 + xi), half * wi));
            }
        }
        let vals: Vec<Complex64> = pts.par_iter().map(|(z, _)| self.fourier(f, *z)).collect::<Result<_>>()?;
        let integral: Complex64 = vals.iter().zip(&pts).map(|(v, (_, dz))| v * dz).sum();
        let peak = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Ok(0.0);
        }
        let perimeter = 2.0 * ((b - a) + (d - c));
        Ok(integral.norm() / (perimeter * peak))
    }
}

/// Convenience: a basis on the default grids of `profile` with spectral
/// cut-off `lambda_max`.
pub fn default_basis(profile: crate::density::DensityProfile, lambda_max: f64, tol: Tolerances) -> Result<Arc<SpectralBasis>> {
    let grid = RadialGrid::default_for(&profile)?;
    let space = RadialSpace::new(Arc::new(profile), grid)?;
    SpectralBasis::build(space, SpectralGrid::up_to(lambda_max)?, tol)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlancherelReport {
    pub spatial: Complex64,
    pub spectral: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StripLine {
    pub im: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StripReport {
    pub p: f64,
    pub gamma_q: f64,
    pub halfwidth: f64,
    pub lp_norm: f64,
    pub lines: Vec<StripLine>,
    /// `max sup |f̂| / ‖f‖_p`, an empirical lower bound for the constant.
    pub ratio: f64,
}
