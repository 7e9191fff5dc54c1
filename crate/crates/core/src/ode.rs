//! Adaptive Dormand–Prince 5(4) integration of a complex two-component
//! first-order system, stepping exactly onto a list of output nodes.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 2];

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Scale used to put the second component on the same footing as the
    /// first in the error norm (for `(u, u')` pass the local frequency).
    pub kappa: f64,
}

impl StepControl {
    pub fn new(rtol: f64, kappa: f64) -> Self {
        StepControl { rtol, atol: 1e-300, h_min: 1e-14, max_steps: 5_000_000, kappa: kappa.max(1e-3) }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy(y: &State, h: f64, coeffs: &[f64], k: &[State]) -> State {
    let mut out = *y;
    for (c, ki) in coeffs.iter().zip(k) {
        if *c != 0.0 {
            out[0] += ki[0] * (h * c);
            out[1] += ki[1] * (h * c);
        }
    }
    out
}

/// Integrates `y' = rhs(r, y)` from `(r0, y0)` and returns the state at each
/// node of `nodes` (which must be non-decreasing and `>= r0`).
pub fn integrate_to_nodes<F>(rhs: F, r0: f64, y0: State, nodes: &[f64], ctl: &StepControl) -> Result<Vec<State>>
where
    F: Fn(f64, &State) -> State,
{
    let mut out = Vec::with_capacity(nodes.len());
    let mut r = r0;
    let mut y = y0;
    let mut h = (0.05 / ctl.kappa).min(0.05).max(ctl.h_min * 10.0);
    let mut steps = 0usize;
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];

    for &target in nodes {
        if target < r - 1e-15 * r.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("output node {target} precedes current position {r}")));
        }
        while target - r > 1e-15 * target.abs().max(1.0) {
            let clipped = h >= target - r;
            let h_try = if clipped { target - r } else { h };
            k[0] = rhs(r, &y);
            for s in 1..7 {
                let ys = axpy(&y, h_try, &A[s][..s], &k[..s]);
                k[s] = rhs(r + C[s] * h_try, &ys);
            }
            let y_new = axpy(&y, h_try, &A[6], &k[..6]);
            let err = axpy(&[Complex64::new(0.0, 0.0); 2], h_try, &E, &k);
            if !(y_new[0].is_finite() && y_new[1].is_finite()) {
                return Err(Error::Propagation { r });
            }
            let size = |s: &State| s[0].norm().max(s[1].norm() / ctl.kappa);
            let scale = ctl.atol + ctl.rtol * size(&y).max(size(&y_new));
            let err_norm = size(&err) / scale;
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
            steps += 1;
            if steps > ctl.max_steps {
                return Err(Error::Stiffness { r });
            }
            if err_norm <= 1.0 {
                r = if clipped { target } else { r + h_try };
                y = y_new;
                let proposal = h_try * factor;
                h = if clipped { h.max(proposal) } else { proposal };
            } else {
                h = h_try * factor;
                if h < ctl.h_min {
                    return Err(Error::Stiffness { r });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // u'' = -w^2 u, u(0)=1, u'(0)=0
        let w = 3.0;
        let ctl = StepControl::new(1e-11, w);
        let nodes: Vec<f64> = (1..=40).map(|i| i as f64 * 0.25).collect();
        let sol = integrate_to_nodes(
            |_, y| [y[1], -y[0] * (w * w)],
            0.0,
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            &nodes,
            &ctl,
        )
        .unwrap();
        for (t, s) in nodes.iter().zip(&sol) {
            assert!((s[0].re - (w * t).cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_exponential_growth_rate() {
        let mu = Complex64::new(-0.5, 2.0);
        let ctl = StepControl::new(1e-11, 1.0);
        let sol = integrate_to_nodes(
            |_, y| [y[0] * mu, Complex64::new(0.0, 0.0)],
            0.0,
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            &[1.0, 2.0],
            &ctl,
        )
        .unwrap();
        let exact = (mu * 2.0).exp();
        assert!((sol[1][0] - exact).norm() < 1e-9 * exact.norm());
    }

    #[test]
    fn nonfinite_rhs_is_reported() {
        let ctl = StepControl::new(1e-8, 1.0);
        let res = integrate_to_nodes(
            |_, _| [Complex64::new(f64::NAN, 0.0), Complex64::new(0.0, 0.0)],
            0.0,
            [Complex64::new(1.0, 0.0); 2],
            &[1.0],
            &ctl,
        );
        assert!(matches!(res, Err(Error::Propagation { .. })));
    }
}
