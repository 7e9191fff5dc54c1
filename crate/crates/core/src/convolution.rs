//! Radial convolution: spectral route for every profile, a spatial double
//! integral on real hyperbolic space, and the norm inequalities.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{sphere_volume, ProfileKind};
use crate::eigen::phi_at;
use crate::error::{Error, Result};
use crate::grid::RadialSpace;
use crate::quadrature::gauss_legendre;
use crate::radial::{RadialGridFunction, SpectralBasis};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const THETA_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Spatial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub profile_hash: String,
    pub r_max: f64,
    pub r_nodes: usize,
    pub lambda_max: f64,
    pub lambda_nodes: usize,
}

impl GridMeta {
    pub fn of(basis: &SpectralBasis) -> Self {
        GridMeta {
            profile_hash: basis.space().profile().hash(),
            r_max: basis.space().r_max(),
            r_nodes: basis.space().nodes().len(),
            lambda_max: basis.spectral().lambda_max(),
            lambda_nodes: basis.spectral().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub method: Method,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub grid_meta: GridMeta,
}

/// `f * g` as the inverse transform of `f̂ ĝ`; the result is supported in
/// `[0, supp f + supp g]`.
pub fn convolve_spectral(basis: &SpectralBasis, f: &RadialGridFunction, g: &RadialGridFunction) -> Result<RadialGridFunction> {
    let prod = basis.forward(f)?.mul(&basis.forward(g)?)?;
    basis.inverse_with_support(&prod, f.support() + g.support())
}

/// `d(x, y)` for points at distances `r`, `s` from the base point with angle
/// `θ` between them, in curvature −1.
pub fn hyperbolic_distance(r: f64, s: f64, theta: f64) -> f64 {
    let a = (0.5 * (r - s)).sinh();
    let b = (0.5 * theta).sin();
    2.0 * (a * a + r.sinh() * s.sinh() * b * b).sqrt().asinh()
}

/// `(f * g)(s) = ω_{n-2} ∫∫ u_f(r) u_g(d(r, s, θ)) A(r) sin^{n-2}θ dθ dr` on
/// `H^n`, with `u_g` read through its panel-wise polynomial interpolant.
pub fn convolve_spatial_hyperbolic(f: &RadialGridFunction, g: &RadialGridFunction, n: i64) -> Result<RadialGridFunction> {
    convolve_spatial_with(f, g, n, THETA_ORDER, f.support() + g.support())
}

/// Spatial convolution with an explicit angular order and output radius.
pub fn convolve_spatial_with(
    f: &RadialGridFunction,
    g: &RadialGridFunction,
    n: i64,
    theta_order: usize,
    out_support: f64,
) -> Result<RadialGridFunction> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let space = f.space();
    match space.profile().kind() {
        ProfileKind::Hyperbolic { n: pn } if *pn as i64 == n => {}
        _ => return Err(Error::GridMismatch(format!("spatial convolution needs the hyperbolic profile H^{n}"))),
    }
    if !Arc::ptr_eq(space, g.space()) {
        return Err(Error::GridMismatch("radial functions live on different grids".into()));
    }
    let (x, w) = gauss_legendre(theta_order);
    let half = 0.5 * std::f64::consts::PI;
    // (sin²(θ/2), weight · sin^{n-2} θ)
    let thetas: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let th = half * (1.0 + xi);
            ((0.5 * th).sin().powi(2), half * wi * th.sin().powi(n as i32 - 2))
        })
        .collect();
    let omega = sphere_volume(n as usize - 2);
    let kf = f.active();
    let nodes = space.nodes();
    let sinh: Vec<f64> = nodes.iter().map(|r| r.sinh()).collect();
    let kout = space.grid().count_within(out_support);
    let g_support = g.support();
    let mut values: Vec<Complex64> = (0..kout)
        .into_par_iter()
        .map(|j| {
            let s = nodes[j];
            let mut acc = ZERO;
            for i in 0..kf {
                let m = space.measure()[i];
                // d(r, s, θ) >= |r − s|, so u_g vanishes on the whole circle
                if m == 0.0 || (nodes[i] - s).abs() > g_support {
                    continue;
                }
                let a = (0.5 * (nodes[i] - s)).sinh().powi(2);
                let b = sinh[i] * sinh[j];
                let ang: Complex64 = thetas
                    .iter()
                    .map(|&(s2, wt)| g.eval_smooth(2.0 * (a + b * s2).sqrt().asinh()) * wt)
                    .sum();
                acc += f.values()[i] * ang * (m / space.profile().omega());
            }
            acc * omega
        })
        .collect();
    values.resize(nodes.len(), ZERO);
    Ok(RadialGridFunction::new(Arc::clone(space), values)?.with_support(out_support))
}

/// `r` from `1 + 1/r = 1/p + 1/q`.
pub fn young_exponent(p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::Usage(format!("Young exponents need p, q >= 1 (got {p}, {q})")));
    }
    let inv = 1.0 / p + 1.0 / q - 1.0;
    if inv < -1e-12 {
        return Err(Error::Usage(format!("1/p + 1/q = {} < 1: no admissible r", inv + 1.0)));
    }
    Ok(if inv <= 1e-12 { f64::INFINITY } else { 1.0 / inv })
}

/// `‖f*g‖_r` against `‖f‖_p ‖g‖_q`.
pub fn young_check(basis: &SpectralBasis, f: &RadialGridFunction, g: &RadialGridFunction, p: f64, q: f64) -> Result<ConvolutionReport> {
    let r = young_exponent(p, q)?;
    let conv = convolve_spectral(basis, f, g)?;
    let lhs = conv.lp_norm(r)?;
    let rhs = f.lp_norm(p)? * g.lp_norm(q)?;
    Ok(report(basis, p, q, r, lhs, rhs))
}

fn report(basis: &SpectralBasis, p: f64, q: f64, r: f64, lhs: f64, rhs: f64) -> ConvolutionReport {
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    ConvolutionReport { method: Method::Spectral, p, q, r, lhs, rhs, ratio, grid_meta: GridMeta::of(basis) }
}

/// `‖f*g‖₂ / (‖g‖_p ‖f‖₂)` for `p ∈ [1, 2)`; an empirical lower bound on the
/// Kunze–Stein constant.
pub fn kunze_stein_check(basis: &SpectralBasis, f: &RadialGridFunction, g: &RadialGridFunction, p: f64) -> Result<ConvolutionReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::Usage(format!("Kunze–Stein check needs p in [1, 2) (got {p})")));
    }
    let conv = convolve_spectral(basis, f, g)?;
    let lhs = conv.lp_norm(2.0)?;
    let rhs = g.lp_norm(p)? * f.lp_norm(2.0)?;
    Ok(report(basis, 2.0, p, 2.0, lhs, rhs))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenConvolutionReport {
    pub lambda: Complex64,
    pub fhat: Complex64,
    pub r_cmp: f64,
    /// `max |f*φ_λ − f̂(λ) φ_λ| / max |f̂(λ) φ_λ|` on `[0, r_cmp]`.
    pub residual: f64,
    /// Set when the comparison window is empty because of truncation.
    pub inconclusive: bool,
}

/// Compares the spatial `f * φ_λ` with `f̂(λ) φ_λ` on `[0, r_cmp]`.
pub fn eigenfunction_convolution_check(
    basis: &SpectralBasis,
    f: &RadialGridFunction,
    lambda: Complex64,
    r_cmp: f64,
) -> Result<EigenConvolutionReport> {
    let space = basis.space();
    let n = space.profile().dim_n() as i64;
    let fhat = basis.fourier(f, lambda)?;
    let r_cmp = r_cmp.min(space.r_max() - f.support());
    if r_cmp <= 0.0 {
        return Ok(EigenConvolutionReport { lambda, fhat, r_cmp, residual: f64::NAN, inconclusive: true });
    }
    let opts = basis.tolerances().solver_options();
    let phi: Vec<Complex64> = phi_at(space.profile(), lambda, space.nodes(), &opts)?.into_iter().map(|s| s[0]).collect();
    let phi = RadialGridFunction::new(Arc::clone(space), phi)?;
    let conv = convolve_spatial_with(f, &phi, n, THETA_ORDER, r_cmp)?;
    let k = space.grid().count_within(r_cmp);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..k {
        let expect = fhat * phi.values()[i];
        diff = diff.max((conv.values()[i] - expect).norm());
        scale = scale.max(expect.norm());
    }
    let residual = if scale > 0.0 { diff / scale } else { diff };
    Ok(EigenConvolutionReport { lambda, fhat, r_cmp, residual, inconclusive: false })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct L2OperatorReport {
    pub sup_ghat: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub holds: bool,
}

/// `‖f*g‖₂ ≤ sup|ĝ| ‖f‖₂` over a corpus of `f`.
pub fn l2_operator_norm_check(basis: &SpectralBasis, g: &RadialGridFunction, corpus: &[RadialGridFunction], tol: f64) -> Result<L2OperatorReport> {
    let ghat = basis.forward(g)?;
    let sup_ghat = ghat.sup_abs();
    let mut ratios = Vec::with_capacity(corpus.len());
    for f in corpus {
        let conv = basis.inverse_with_support(&basis.forward(f)?.mul(&ghat)?, f.support() + g.support())?;
        let bound = sup_ghat * f.lp_norm(2.0)?;
        ratios.push(if bound > 0.0 { conv.lp_norm(2.0)? / bound } else { 0.0 });
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(L2OperatorReport { sup_ghat, ratios, max_ratio, holds: max_ratio <= 1.0 + tol })
}

/// A sum of even Gaussian rings, reproducible on any grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    /// `(centre, width, amplitude)` per ring.
    pub rings: Vec<(f64, f64, f64)>,
}

impl BumpSpec {
    pub fn build(&self, space: &Arc<RadialSpace>) -> Result<RadialGridFunction> {
        let mut acc: Option<RadialGridFunction> = None;
        for &(c, w, a) in &self.rings {
            let g = RadialGridFunction::gaussian(space, c, w, a)?;
            acc = Some(match acc {
                None => g,
                Some(f) => f.combine(Complex64::new(1.0, 0.0), &g, Complex64::new(1.0, 0.0))?,
            });
        }
        Ok(acc.unwrap_or_else(|| RadialGridFunction::zero(space)))
    }
}

/// `count` random one- or two-ring bumps: centres in `[0, 1.5]`, widths in
/// `[0.45, 0.8]`, amplitudes of size `[0.5, 2]` (second ring of either sign).
pub fn random_bumps(seed: u64, count: usize) -> Vec<BumpSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rings = if rng.random_bool(0.5) { 1 } else { 2 };
            let rings = (0..rings)
                .map(|k| {
                    let c = rng.random_range(0.0..1.5);
                    let w = rng.random_range(0.45..0.8);
                    let a: f64 = rng.random_range(0.5..2.0);
                    let sign = if k > 0 && rng.random_bool(0.5) { -1.0 } else { 1.0 };
                    (c, w, sign * a)
                })
                .collect();
            BumpSpec { rings }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_limits() {
        assert!((hyperbolic_distance(1.3, 0.0, 0.7) - 1.3).abs() < 1e-14);
        assert!((hyperbolic_distance(1.3, 0.4, 0.0) - 0.9).abs() < 1e-14);
        assert!((hyperbolic_distance(1.3, 0.4, std::f64::consts::PI) - 1.7).abs() < 1e-13);
        // cosh d = cosh r cosh s − sinh r sinh s cos θ
        let (r, s, t) = (0.8f64, 1.9f64, 1.1f64);
        let c = r.cosh() * s.cosh() - r.sinh() * s.sinh() * t.cos();
        assert!((hyperbolic_distance(r, s, t) - c.acosh()).abs() < 1e-13);
    }

    #[test]
    fn young_exponents() {
        assert_eq!(young_exponent(1.0, 1.0).unwrap(), 1.0);
        assert!((young_exponent(1.5, 1.5).unwrap() - 3.0).abs() < 1e-12);
        assert!((young_exponent(2.0, 4.0 / 3.0).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(young_exponent(2.0, 2.0).unwrap(), f64::INFINITY);
        assert!(young_exponent(3.0, 3.0).is_err());
    }

    #[test]
    fn corpus_is_reproducible() {
        assert_eq!(random_bumps(7, 5), random_bumps(7, 5));
        assert_ne!(random_bumps(7, 5), random_bumps(8, 5));
    }
}
