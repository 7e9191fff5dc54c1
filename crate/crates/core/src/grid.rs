//! Radial and spectral quadrature grids.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::DensityProfile;
use crate::error::{Error, Result};
use crate::quadrature::PanelGrid;

pub const DEFAULT_ORDER: usize = 16;

/// Radii `0 = r_0 < r_1 < … ` made of the origin followed by the
/// Gauss–Legendre nodes of graded panels (geometric on `[0, 1]`, uniform
/// beyond). The origin carries zero quadrature weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    panels: PanelGrid,
    #[serde(skip)]
    nodes: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl RadialGrid {
    pub fn from_panels(panels: PanelGrid) -> Result<Self> {
        if panels.lower() != 0.0 {
            return Err(Error::InvalidParameter("radial grid must start at r = 0".into()));
        }
        let mut g = RadialGrid { panels, nodes: vec![], weights: vec![] };
        g.rebuild();
        Ok(g)
    }

    pub(crate) fn rebuild(&mut self) {
        self.panels.rebuild();
        self.nodes = std::iter::once(0.0).chain(self.panels.nodes().iter().copied()).collect();
        self.weights = std::iter::once(0.0).chain(self.panels.weights().iter().copied()).collect();
    }

    /// `panels` panels of `order` nodes on `[0, r_max]`: uniform panels of
    /// width `h`, except that `[0, h]` is split geometrically (ratio 2) into
    /// up to eight panels.
    pub fn graded(r_max: f64, panels: usize, order: usize) -> Result<Self> {
        if !(r_max > 0.0) || panels < 2 {
            return Err(Error::InvalidParameter(format!("radial grid needs r_max > 0 and >= 2 panels (got {r_max}, {panels})")));
        }
        let inner = (panels / 4).clamp(1, 8);
        let outer = panels - inner;
        let h = r_max / (outer + 1) as f64;
        let mut breaks = vec![0.0];
        for j in (0..inner).rev() {
            breaks.push(h * 0.5f64.powi(j as i32));
        }
        for i in 2..=outer + 1 {
            breaks.push(h * i as f64);
        }
        *breaks.last_mut().unwrap() = r_max;
        Self::from_panels(PanelGrid::new(breaks, order)?)
    }

    /// `r ∈ [0, 25/ρ]` with 128 panels of 16 nodes (2048 nodes plus the origin).
    pub fn default_for(profile: &DensityProfile) -> Result<Self> {
        profile.require_positive_rho()?;
        Self::graded(25.0 / profile.rho(), 128, DEFAULT_ORDER)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.panels.upper()
    }

    pub fn panels(&self) -> &PanelGrid {
        &self.panels
    }

    /// Number of leading nodes with `r <= radius`.
    pub fn count_within(&self, radius: f64) -> usize {
        self.nodes.partition_point(|&r| r <= radius)
    }
}

/// Gauss–Legendre panels on `[lower, Λ_max]`; every node is strictly
/// positive even when `lower = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    panels: PanelGrid,
}

impl SpectralGrid {
    pub fn new(lower: f64, upper: f64, panels: usize, order: usize) -> Result<Self> {
        if !(lower >= 0.0) || !(upper > lower) {
            return Err(Error::InvalidParameter(format!("spectral grid needs 0 <= lower < upper (got {lower}, {upper})")));
        }
        Ok(SpectralGrid { panels: PanelGrid::uniform(lower, upper, panels, order)? })
    }

    /// Panels of width about 0.5 on `[0, Λ_max]`.
    pub fn up_to(lambda_max: f64) -> Result<Self> {
        let panels = ((lambda_max / 0.5).ceil() as usize).max(1);
        Self::new(0.0, lambda_max, panels, DEFAULT_ORDER)
    }

    pub(crate) fn rebuild(&mut self) {
        self.panels.rebuild();
    }

    pub fn nodes(&self) -> &[f64] {
        self.panels.nodes()
    }

    pub fn weights(&self) -> &[f64] {
        self.panels.weights()
    }

    pub fn len(&self) -> usize {
        self.panels.nodes().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lambda_min(&self) -> f64 {
        self.panels.nodes()[0]
    }

    pub fn lower(&self) -> f64 {
        self.panels.lower()
    }

    pub fn lambda_max(&self) -> f64 {
        self.panels.upper()
    }

    pub fn panels(&self) -> &PanelGrid {
        &self.panels
    }
}

/// A radial grid bound to a profile, with the measure `ω_{n-1} A(r) dr`
/// folded into the quadrature weights.
#[derive(Debug)]
pub struct RadialSpace {
    profile: Arc<DensityProfile>,
    grid: RadialGrid,
    density: Vec<f64>,
    measure: Vec<f64>,
}

impl RadialSpace {
    pub fn new(profile: Arc<DensityProfile>, grid: RadialGrid) -> Result<Arc<Self>> {
        let mut density = Vec::with_capacity(grid.len());
        for &r in grid.nodes() {
            let a = if r == 0.0 { 0.0 } else { profile.density(r) };
            if !a.is_finite() {
                return Err(Error::ProfileEvaluation { r });
            }
            density.push(a);
        }
        let measure = density.iter().zip(grid.weights()).map(|(a, w)| profile.omega() * a * w).collect();
        Ok(Arc::new(RadialSpace { profile, grid, density, measure }))
    }

    pub fn profile(&self) -> &DensityProfile {
        &self.profile
    }

    pub fn profile_arc(&self) -> Arc<DensityProfile> {
        Arc::clone(&self.profile)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    /// `A(r_i)` at the grid nodes.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `ω_{n-1} A(r_i) w_i`.
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_grid_layout() {
        let g = RadialGrid::graded(25.0, 128, 16).unwrap();
        assert_eq!(g.len(), 2049);
        assert_eq!(g.nodes()[0], 0.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!((g.r_max() - 25.0).abs() < 1e-12);
        let total: f64 = g.weights().iter().sum();
        assert!((total - 25.0).abs() < 1e-11);
    }

    #[test]
    fn spectral_nodes_are_positive() {
        let s = SpectralGrid::new(0.0, 10.0, 20, 16).unwrap();
        assert!(s.lambda_min() > 0.0);
        assert!(SpectralGrid::new(-1.0, 1.0, 2, 4).is_err());
    }

    #[test]
    fn measure_integrates_ball_volume() {
        // Vol B(R) in H^3 = π (sinh 2R − 2R)
        let p = Arc::new(DensityProfile::hyperbolic(3).unwrap());
        let space = RadialSpace::new(p, RadialGrid::graded(3.0, 24, 16).unwrap()).unwrap();
        let vol: f64 = space.measure().iter().sum();
        let exact = std::f64::consts::PI * ((6.0f64).sinh() - 6.0);
        assert!((vol - exact).abs() < 1e-10 * exact);
    }
}
