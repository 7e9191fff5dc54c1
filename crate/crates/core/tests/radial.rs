mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use radlab::convolution::random_bumps;
use radlab::grid::{RadialGrid, RadialSpace};
use radlab::radial::RadialGridFunction;
use radlab::{Complex64, DensityProfile, Error};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn h3_space(panels: usize) -> Arc<RadialSpace> {
    let p = Arc::new(DensityProfile::hyperbolic(3).unwrap());
    RadialSpace::new(p, RadialGrid::graded(25.0, panels, 16).unwrap()).unwrap()
}

#[test]
fn zero_has_zero_norms() {
    let f = RadialGridFunction::zero(common::h3().space());
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        assert_eq!(f.lp_norm(p).unwrap(), 0.0);
    }
}

#[test]
fn exponential_l1_norm() {
    // 4π ∫ e^{-3r} sinh²r dr = 4π (1 − 2/3 + 1/5)/4
    let exact = 8.0 * PI / 15.0;
    let coarse = RadialGridFunction::from_real_fn(&h3_space(128), |r| (-3.0 * r).exp()).unwrap();
    let fine = RadialGridFunction::from_real_fn(&h3_space(256), |r| (-3.0 * r).exp()).unwrap();
    let (a, b) = (coarse.lp_norm(1.0).unwrap(), fine.lp_norm(1.0).unwrap());
    assert!((a - exact).abs() < 1e-9 * exact, "{a} vs {exact}");
    assert!((a - b).abs() < 1e-6 * exact);
}

#[test]
fn divergent_tail_flagged() {
    let f = RadialGridFunction::from_real_fn(&h3_space(128), |r| (-2.0 * r).exp()).unwrap();
    assert!(matches!(f.lp_norm(1.0), Err(Error::Truncation(_))));
    assert!(f.lp_norm(2.0).is_ok());
}

#[test]
fn norms_stable_under_refinement() {
    // |u|^p has a kink where u changes sign, so odd p is only compared on
    // non-negative bumps
    for spec in random_bumps(31, 6) {
        let a = spec.build(&h3_space(128)).unwrap();
        let b = spec.build(&h3_space(256)).unwrap();
        let signed = spec.rings.iter().any(|r| r.2 < 0.0);
        let ps: &[f64] = if signed { &[2.0, 4.0] } else { &[1.0, 2.0, 3.5] };
        for &p in ps {
            let (x, y) = (a.lp_norm(p).unwrap(), b.lp_norm(p).unwrap());
            assert!((x - y).abs() < 1e-7 * x, "p={p}: {x} vs {y}");
        }
    }
}

#[test]
fn transform_at_i_rho_is_total_integral() {
    let b = common::h3();
    let f = random_bumps(5, 1)[0].build(b.space()).unwrap();
    let at = b.fourier(&f, Complex64::new(0.0, 1.0)).unwrap();
    assert!((at - f.integral()).norm() < 1e-10 * f.integral().norm());
}

#[test]
fn inverse_of_zero_is_zero() {
    let b = common::h3();
    let f = b.inverse(&b.spectral_fn(|_| re(0.0))).unwrap();
    assert!(f.values().iter().all(|v| *v == re(0.0)));
}

#[test]
fn heat_symbol_round_trip() {
    let b = common::h3();
    let big_f = b.spectral_fn(|l| re((-(l * l + 1.0)).exp()));
    let h = b.inverse(&big_f).unwrap();
    let back = b.forward(&h).unwrap();
    let err: f64 = back.values().iter().zip(big_f.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(err < 1e-6, "{err:e}");
    let rt = b.inverse(&back).unwrap();
    assert!(rt.rel_l2_distance(&h).unwrap() < 1e-3);
}

#[test]
fn tail_error_when_cutoff_too_low() {
    let b = common::h3();
    let narrow = RadialGridFunction::gaussian(b.space(), 0.0, 0.05, 1.0).unwrap();
    let err = b.inverse(&b.forward(&narrow).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Tail { deficit } if deficit > 1e-9), "{err}");
}

#[test]
fn plancherel_gaussian() {
    let b = common::h3();
    let f = RadialGridFunction::from_real_fn(b.space(), |r| (-r * r).exp()).unwrap().with_support(6.0);
    let rep = b.plancherel_check(&f, &f).unwrap();
    assert!(rep.residual < 1e-4, "{rep:?}");
    let zero = RadialGridFunction::zero(b.space());
    assert_eq!(b.plancherel_check(&zero, &f).unwrap().residual, 0.0);
}

#[test]
fn plancherel_disjoint_bands() {
    let b = common::h3();
    let band = |c: f64| b.spectral_fn(move |l| re((-((l - c) / 0.4).powi(2)).exp()));
    let f = b.inverse(&band(2.0)).unwrap();
    let g = b.inverse(&band(6.0)).unwrap();
    let rep = b.plancherel_check(&f, &g).unwrap();
    let scale = f.lp_norm_truncated(2.0) * g.lp_norm_truncated(2.0);
    assert!(rep.spatial.norm() < 1e-6 * scale && rep.spectral.norm() < 1e-6 * scale, "{rep:?}");
}

#[test]
fn strip_bound_reports() {
    let b = common::h3();
    let f = random_bumps(12, 1)[0].build(b.space()).unwrap();
    let r43 = b.strip_bound_check(&f, 4.0 / 3.0, 40).unwrap();
    assert!((r43.halfwidth - 0.5).abs() < 1e-15);
    assert!((r43.gamma_q - 0.5).abs() < 1e-15);
    let r1 = b.strip_bound_check(&f, 1.0, 40).unwrap();
    assert_eq!(r1.halfwidth, 1.0);
    assert!(r1.ratio.is_finite() && r1.ratio > 0.0);
    let doubled = b.strip_bound_check(&f.scale(re(2.0)), 1.0, 40).unwrap();
    assert!((doubled.ratio - r1.ratio).abs() < 1e-12 * r1.ratio);
    assert!(b.strip_bound_check(&f, 2.0, 10).is_err());
}

#[test]
fn holomorphy_contour() {
    let b = common::h3();
    let f = random_bumps(13, 1)[0].build(b.space()).unwrap();
    let res = b.holomorphy_check(&f, 1.0, [1.0, 2.0, -0.2, 0.2]).unwrap();
    assert!(res < 1e-6, "{res:e}");
    let zero = RadialGridFunction::zero(b.space());
    assert_eq!(b.holomorphy_check(&zero, 1.0, [1.0, 2.0, -0.2, 0.2]).unwrap(), 0.0);
    assert!(b.holomorphy_check(&f, 4.0 / 3.0, [1.0, 2.0, -0.5, 0.2]).is_err());
}

#[test]
fn strip_violation_for_slow_decay() {
    let b = common::h3();
    // e^{-1.2r} sits in L^p only for p close to 2; its transform blows up off the real line
    let f = RadialGridFunction::from_real_fn(b.space(), |r| (-1.2 * r).exp()).unwrap();
    assert!(matches!(b.fourier(&f, Complex64::new(1.0, 0.9)), Err(Error::StripViolation { .. })));
}

fn coefficient() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_homogeneous(seed in 0u64..1000, a in 0.1f64..5.0) {
        let f = random_bumps(seed, 1)[0].build(common::h3().space()).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let x = f.scale(re(a)).lp_norm(p).unwrap();
            let y = a * f.lp_norm(p).unwrap();
            prop_assert!((x - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn transform_linear(seed in 0u64..1000, a in coefficient(), c in coefficient()) {
        let b = common::h3();
        let specs = random_bumps(seed, 2);
        let f = specs[0].build(b.space()).unwrap();
        let g = specs[1].build(b.space()).unwrap();
        let lhs = b.forward(&f.combine(a, &g, c).unwrap()).unwrap();
        let (ff, gg) = (b.forward(&f).unwrap(), b.forward(&g).unwrap());
        let scale = ff.sup_abs() + gg.sup_abs();
        for ((x, y), z) in lhs.values().iter().zip(ff.values()).zip(gg.values()) {
            prop_assert!((x - (a * y + c * z)).norm() <= 1e-12 * scale * (a.norm() + c.norm()));
        }
    }

    #[test]
    fn transform_even(seed in 0u64..1000, l in 0.0f64..10.0) {
        let b = common::h3();
        let f = random_bumps(seed, 1)[0].build(b.space()).unwrap();
        let (x, y) = (b.fourier(&f, re(l)).unwrap(), b.fourier(&f, re(-l)).unwrap());
        prop_assert!((x - y).norm() <= 1e-10 * x.norm().max(1e-3));
    }

    #[test]
    fn positive_transform_bounded_by_integral(centre in 0.0f64..1.5, width in 0.45f64..0.8, l in 0.0f64..20.0) {
        let b = common::h3();
        let f = RadialGridFunction::gaussian(b.space(), centre, width, 1.0).unwrap();
        prop_assert!(b.fourier(&f, re(l)).unwrap().norm() <= f.integral().re * (1.0 + 1e-12));
    }

    #[test]
    fn parseval_side_non_negative(seed in 0u64..1000) {
        let b = common::h3();
        let f = random_bumps(seed, 1)[0].build(b.space()).unwrap();
        let rep = b.plancherel_check(&f, &f).unwrap();
        prop_assert!(rep.spectral.re >= 0.0);
        prop_assert!(rep.spectral.im.abs() <= 1e-14 * rep.spectral.re);
        prop_assert!(rep.residual < 1e-4);
    }
}
