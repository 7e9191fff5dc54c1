//! Composite Gauss–Legendre panels and panel-local spectral differentiation.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on [-1, 1],
/// sorted by node.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let order = NonZeroUsize::new(order.max(1)).unwrap();
    let rule = GaussLegendre::new(order);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Integrate `f` over [a, b] with a single `order`-point rule.
pub fn integrate_gl<F: FnMut(f64) -> f64>(a: f64, b: f64, order: usize, mut f: F) -> f64 {
    let (x, w) = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}

/// A partition of an interval into panels, each carrying the same
/// Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelGrid {
    breaks: Vec<f64>,
    order: usize,
    #[serde(skip)]
    nodes: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
    #[serde(skip)]
    diff: Vec<f64>,
    #[serde(skip)]
    reference: Vec<f64>,
    #[serde(skip)]
    bary: Vec<f64>,
}

impl PanelGrid {
    pub fn new(breaks: Vec<f64>, order: usize) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::InvalidParameter("panel grid needs at least two breakpoints".into()));
        }
        if order < 2 {
            return Err(Error::InvalidParameter("panel order must be at least 2".into()));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("panel breakpoints must be finite and strictly increasing".into()));
        }
        let mut grid = PanelGrid { breaks, order, nodes: vec![], weights: vec![], diff: vec![], reference: vec![], bary: vec![] };
        grid.rebuild();
        Ok(grid)
    }

    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || !(b > a) {
            return Err(Error::InvalidParameter(format!("bad uniform panel grid on [{a}, {b}] with {panels} panels")));
        }
        let h = (b - a) / panels as f64;
        let mut breaks: Vec<f64> = (0..panels).map(|i| a + h * i as f64).collect();
        breaks.push(b);
        Self::new(breaks, order)
    }

    /// Restore the derived node tables (after deserialization).
    pub fn rebuild(&mut self) {
        let (x, w) = gauss_legendre(self.order);
        self.nodes.clear();
        self.weights.clear();
        for pair in self.breaks.windows(2) {
            let half = 0.5 * (pair[1] - pair[0]);
            let mid = 0.5 * (pair[1] + pair[0]);
            for (xi, wi) in x.iter().zip(&w) {
                self.nodes.push(mid + half * xi);
                self.weights.push(half * wi);
            }
        }
        self.diff = differentiation_matrix(&x);
        self.bary = barycentric_weights(&x);
        self.reference = x;
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lower(&self) -> f64 {
        self.breaks[0]
    }

    pub fn upper(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_complex(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Value at `t` of the panel-wise interpolating polynomial through
    /// `values` (one per node); zero outside the grid.
    pub fn interpolate(&self, values: &[Complex64], t: f64) -> Complex64 {
        if !(t >= self.lower() && t <= self.upper()) {
            return Complex64::new(0.0, 0.0);
        }
        let p = (self.breaks.partition_point(|&b| b <= t).max(1) - 1).min(self.panels() - 1);
        let (a, b) = (self.breaks[p], self.breaks[p + 1]);
        let x = (2.0 * t - a - b) / (b - a);
        let block = &values[p * self.order..(p + 1) * self.order];
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((xj, wj), vj) in self.reference.iter().zip(&self.bary).zip(block) {
            let d = x - xj;
            if d == 0.0 {
                return *vj;
            }
            let c = wj / d;
            num += vj * c;
            den += c;
        }
        num / den
    }

    /// Derivative of the panel-wise interpolating polynomial at the nodes.
    pub fn differentiate(&self, values: &[Complex64]) -> Vec<Complex64> {
        let m = self.order;
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        for (p, pair) in self.breaks.windows(2).enumerate() {
            let scale = 2.0 / (pair[1] - pair[0]);
            let block = &values[p * m..(p + 1) * m];
            for i in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    acc += block[j] * self.diff[i * m + j];
                }
                out[p * m + i] = acc * scale;
            }
        }
        out
    }
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let prod: f64 = (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
            1.0 / prod
        })
        .collect()
}

/// Row-major differentiation matrix on the reference nodes.
fn differentiation_matrix(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let w = barycentric_weights(x);
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut diag = 0.0;
        for j in 0..m {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[i * m + j] = v;
                diag -= v;
            }
        }
        d[i * m + i] = diag;
    }
    d
}
