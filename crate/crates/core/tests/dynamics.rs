mod common;

use std::sync::Arc;

use proptest::prelude::*;
use radlab::convolution::random_bumps;
use radlab::dynamics::*;
use radlab::radial::{default_basis, Tolerances};
use radlab::{Complex64, DensityProfile, Error};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn c(a: f64, b: f64) -> Complex64 {
    Complex64::new(a, b)
}

fn grid() -> WitnessGrid {
    WitnessGrid::default()
}

#[test]
fn symbol_formulas() {
    let l = c(1.3, 0.2);
    let mu = l * l + 1.0;
    assert_eq!(Symbol::heat(1.0, 0.7).unwrap().eval(l), (-mu * 0.7).exp());
    let sh = Symbol::shifted_heat(1.0, c(0.4, 2.0), 0.7).unwrap().eval(l);
    assert!((sh - (c(0.4, 2.0) * 0.7).exp() * (-mu * 0.7).exp()).norm() < 1e-15);
    let z = c(0.5, -1.0);
    assert!((Symbol::resolvent(1.0, z).eval(l) + 1.0 / (mu + z)).norm() < 1e-15);
    assert!(Symbol::heat(1.0, 0.0).is_err());
    assert!(Symbol::heat(1.0, -1.0).is_err());
}

#[test]
fn thresholds() {
    assert_eq!(c_threshold(1.0, 4.0).unwrap().value, 0.75);
    assert_eq!(c_threshold(1.0, 2.0).unwrap().value, 1.0);
    assert!((c_threshold(1.0, 3.0).unwrap().value - 8.0 / 9.0).abs() < 1e-15);
    let end = c_threshold(1.0, 1.0).unwrap();
    assert!(end.endpoint && end.value == 0.0);
    assert!(c_threshold(1.0, f64::INFINITY).unwrap().endpoint);
    assert!(c_threshold(1.0, 0.5).is_err());
}

#[test]
fn strip_widths() {
    assert_eq!(StripSpec::new(2.0, 1.0).unwrap().halfwidth, 0.0);
    assert_eq!(StripSpec::new(4.0, 1.0).unwrap().halfwidth, 0.5);
    assert_eq!(StripSpec::new(4.0 / 3.0, 1.0).unwrap().halfwidth, 0.5);
    assert_eq!(StripSpec::new(1.0, 2.0).unwrap().halfwidth, 2.0);
}

#[test]
fn opnorm_bound() {
    let b = heat_opnorm_bound(1.0, 4.0, 1.0).unwrap();
    assert_eq!(b.bound, (-0.75f64).exp());
    assert!((b.bound - 0.472_366_552_741_014_7).abs() < 1e-15);
    assert!((b.symbol_value - b.bound).abs() < 1e-14);
    assert!((heat_opnorm_bound(1.0, 4.0, 1e-12).unwrap().bound - 1.0).abs() < 1e-11);
    let (p, q) = (3.0, 1.5);
    assert!((heat_opnorm_bound(1.0, p, 2.0).unwrap().bound - heat_opnorm_bound(1.0, q, 2.0).unwrap().bound).abs() < 1e-15);
    assert!(heat_opnorm_bound(1.0, 2.0, 1.0).is_err());
}

#[test]
fn heat_kernel_values() {
    let b = common::h3();
    let h = heat_kernel(b, 1.0).unwrap();
    let at0 = b.fourier(&h, re(0.0)).unwrap();
    assert!((at0.re - 0.367_879_441_171_442_3).abs() < 1e-6, "{at0}");
    assert!((h.integral().re - 1.0).abs() < 1e-3);
    assert_eq!(Symbol::heat(1.0, 3.0).unwrap().eval(c(0.0, 1.0)), re(1.0));
}

#[test]
fn heat_kernel_positive() {
    let dr = default_basis(DensityProfile::damek_ricci(2, 1).unwrap(), 24.0, Tolerances::default()).unwrap();
    for b in [common::h3(), &dr] {
        for t in [0.1, 1.0, 5.0] {
            let h = heat_kernel(b, t).unwrap();
            let min = h.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
            assert!(min > -1e-8, "{} t={t}: {min:e}", b.space().profile().name());
        }
    }
}

#[test]
fn heat_semigroup_on_functions() {
    let b = common::h3();
    let f = random_bumps(41, 1)[0].build(b.space()).unwrap();
    let (s, t) = (0.3, 0.45);
    let twice = apply_multiplier(b, &Symbol::heat(1.0, s).unwrap(), &apply_multiplier(b, &Symbol::heat(1.0, t).unwrap(), &f).unwrap()).unwrap();
    let once = apply_multiplier(b, &Symbol::heat(1.0, s + t).unwrap(), &f).unwrap();
    assert!(twice.rel_l2_distance(&once).unwrap() < 1e-6);
}

#[test]
fn identity_multiplier() {
    let b = common::h3();
    let f = random_bumps(42, 1)[0].build(b.space()).unwrap();
    let one = Symbol::custom(1.0, "one", 1.0, Arc::new(|_| re(1.0)));
    let g = apply_multiplier(b, &one, &f).unwrap();
    assert!(g.rel_l2_distance(&f).unwrap() < 1e-3);
    let tr = orbit_simulate(b, &one, &f, 4.0, 5).unwrap();
    for n in &tr.norms {
        assert!((n / tr.norms[0] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn resolvent_pole_on_grid() {
    let b = common::h3();
    let f = random_bumps(43, 1)[0].build(b.space()).unwrap();
    // pole at λ² = −z − ρ²; pick a grid node exactly
    let l = b.lambdas()[100];
    let m = Symbol::resolvent(1.0, re(-(l * l + 1.0)));
    assert!(matches!(apply_multiplier(b, &m, &f), Err(Error::Pole { .. })));
}

#[test]
fn resolvent_algebra() {
    let m = Symbol::resolvent(1.0, re(1.0));
    for i in 0..50 {
        let l = re(0.3 * i as f64);
        let mu = l * l + 1.0;
        assert!(((-mu - 1.0) * m.eval(l) - 1.0).norm() < 1e-15);
    }
}

#[test]
fn classification_examples() {
    let v = classify_chaos(&Symbol::shifted_heat(1.0, re(1.0), 1.0).unwrap(), 4.0, 1.0, &grid()).unwrap();
    assert_eq!(v.classification, Classification::Chaotic);
    assert_eq!(v.reason, Reason::WitnessPairFound);
    let w = v.witnesses.unwrap();
    assert!(w.l1.re > 4.0, "λ₁ at large real part: {}", w.l1);
    assert!(w.l2.im.abs() > 0.9 * v.strip_halfwidth, "λ₂ near the edge: {}", w.l2);

    let v = classify_chaos(&Symbol::heat(1.0, 1.0).unwrap(), 4.0, 1.0, &grid()).unwrap();
    assert_eq!((v.classification, v.reason), (Classification::NotChaotic, Reason::Contraction));
    assert!(v.sup_abs.unwrap() <= (-0.75f64).exp() + 1e-12);

    for m in [Symbol::heat(1.0, 1.0).unwrap(), Symbol::step(1.0, 1.0), Symbol::resolvent(1.0, c(-0.9, 0.0))] {
        let v = classify_chaos(&m, 2.0, 1.0, &grid()).unwrap();
        assert_eq!((v.classification, v.reason), (Classification::NotChaotic, Reason::PLeq2));
    }

    let v = classify_chaos(&Symbol::constant(1.0, c(0.0, 2.0)), 4.0, 1.0, &grid()).unwrap();
    assert_eq!(v.reason, Reason::ConstantSymbol);
}

#[test]
fn classification_after_scaling() {
    let m = Symbol::shifted_heat(1.0, re(70.0), 1.0).unwrap();
    let v = classify_chaos(&m, 4.0, 1.0, &grid()).unwrap();
    assert_eq!(v.classification, Classification::ChaoticAfterScaling);
    assert!(v.inf_abs.unwrap() > 1.0);
    let nu = v.nu.unwrap();
    let w = v.witnesses.unwrap();
    assert!(w.m1_abs < 1.0 && 1.0 < w.m2_abs);
    assert!((m.eval(w.l1).norm() / nu.norm() - w.m1_abs).abs() < 1e-12 * w.m1_abs);
}

#[test]
fn classification_errors() {
    assert!(matches!(classify_chaos(&Symbol::step(1.0, 1.0), 4.0, 1.0, &grid()), Err(Error::Usage(_))));
    assert!(matches!(classify_chaos(&Symbol::step(1.0, 1.0), 1.5, 1.0, &grid()), Err(Error::Usage(_))));
    // pole at λ = 0.3i, inside S_4
    let z = -(c(0.0, 0.3) * c(0.0, 0.3) + 1.0);
    assert!(matches!(classify_chaos(&Symbol::resolvent(1.0, z), 4.0, 1.0, &grid()), Err(Error::Pole { .. })));
}

#[test]
fn custom_symbols_carry_assumption() {
    let m = Symbol::custom(1.0, "gauss", 1.0, Arc::new(|l: Complex64| (-(l * l) * 0.2).exp() * 1.5));
    let v = classify_chaos(&m, 4.0, 1.0, &grid()).unwrap();
    assert!(v.holomorphy_assumed);
    assert_eq!(v.classification, Classification::Chaotic);
}

#[test]
fn contraction_orbits_decay_at_rate() {
    let b = common::h3();
    let cp = 0.75;
    for (re_c, t) in [(0.25, 1.0), (0.5, 0.5)] {
        let m = Symbol::shifted_heat(1.0, re(re_c), t).unwrap();
        let rate = ((re_c - cp) * t).exp();
        for spec in random_bumps(44, 5) {
            let tr = orbit_simulate(b, &m, &spec.build(b.space()).unwrap(), 4.0, 30).unwrap();
            assert!(!tr.truncated);
            assert!(tr.growth.iter().all(|g| *g < 1.0 && *g <= rate + 1e-6), "{:?}", tr.growth);
        }
    }
}

#[test]
fn orbits_bounded_below_two() {
    let b = common::h3();
    for p in [1.0, 4.0 / 3.0, 2.0] {
        let cp = c_threshold(1.0, p).unwrap().value;
        let m = Symbol::shifted_heat(1.0, re(cp), 0.05).unwrap();
        for spec in random_bumps(45, 4) {
            let tr = orbit_simulate(b, &m, &spec.build(b.space()).unwrap(), p, 20).unwrap();
            assert!(!tr.truncated, "p={p}: {:?}", tr.flag);
            assert!(tr.norms.iter().all(|n| *n <= tr.norms[0] * (1.0 + 1e-6)), "p={p}: {:?}", tr.norms);
        }
    }
}

#[test]
fn orbit_truncation_is_flagged() {
    let b = common::h3();
    let f = random_bumps(46, 1)[0].build(b.space()).unwrap();
    let m = Symbol::heat(1.0, 1.0).unwrap();
    let tr = orbit_simulate(b, &m, &f, 1.0, 50).unwrap();
    assert!(tr.truncated && tr.flag.is_some());
    assert!(tr.norms.len() < 51);
    assert!(orbit_simulate(b, &m, &f, 1.0, 0).is_err());
}

#[test]
fn expanding_orbit_keeps_log_scale() {
    let b = common::h3();
    let f = random_bumps(47, 1)[0].build(b.space()).unwrap();
    let m = Symbol::constant(1.0, re(1e30));
    let tr = orbit_simulate(b, &m, &f, 2.0, 20).unwrap();
    assert_eq!(tr.log_norms.len(), 21);
    let slope = (tr.log_norms[20] - tr.log_norms[0]) / 20.0;
    assert!((slope - 1e30f64.ln()).abs() < 1e-9 * slope);
    assert!(tr.flag.is_some());
}

#[test]
fn mode_growth_tracks_witness() {
    let b = common::h3();
    let m = Symbol::shifted_heat(1.0, re(1.0), 1.0).unwrap();
    let w = classify_chaos(&m, 4.0, 1.0, &grid()).unwrap().witnesses.unwrap();
    let g = mode_growth(b, &m, w.l2, 4.0, 10, 0.05).unwrap();
    assert!(g.m_abs > 1.0);
    assert!(g.max_deviation < 0.2, "{g:?}");
}

#[test]
fn periodic_points() {
    let step = periodic_point_search(&Symbol::step(1.0, 1.0), 5.0, 51, 4);
    assert_eq!(step.len(), 51);
    for pt in &step {
        assert_eq!(pt.n, if pt.lambda < 1.0 { 2 } else { 1 });
    }
    assert!(periodic_point_search(&Symbol::heat(1.0, 1.0).unwrap(), 8.0, 200, 6).is_empty());
    // e^{c t} e^{-t(λ₀² + 1)} = 1 at λ₀ = 1.5
    let t = 0.8;
    let m = Symbol::shifted_heat(1.0, re(1.5f64.powi(2) + 1.0), t).unwrap();
    let pts = periodic_point_search(&m, 8.0, 200, 6);
    assert_eq!(pts.len(), 1);
    assert!((pts[0].lambda - 1.5).abs() < 1e-10 && pts[0].n == 1);
}

#[test]
fn dual_examples() {
    let heat = Symbol::heat(1.0, 0.6).unwrap();
    let d = dual_symbol(&heat);
    for i in 0..20 {
        let l = re(0.4 * i as f64);
        assert_eq!(d.eval(l), heat.eval(l));
    }
    let m = Symbol::shifted_heat(1.0, c(0.0, 1.0), 1.0).unwrap();
    let d = dual_symbol(&m);
    assert!(matches!(d.kind(), SymbolKind::ShiftedHeat { c, .. } if *c == Complex64::new(0.0, -1.0)));
    for i in 0..20 {
        let l = re(0.4 * i as f64);
        assert!((d.eval(l).norm() - m.eval(l).norm()).abs() < 1e-15);
    }
}

#[test]
fn pole_region_examples() {
    let r = resolvent_pole_region(1.0, 1.0, c(-0.5, 1.5)).unwrap();
    assert!(r.bounded && r.a == 1.0 && r.c_p == 0.0);
    let r = resolvent_pole_region(1.0, 1.0, c(-0.5, 1.4)).unwrap();
    assert!(!r.bounded);
    let r = resolvent_pole_region(1.0, 2.0, c(-3.0, 0.5)).unwrap();
    assert!(r.degenerate);
    assert!(resolvent_pole_region(1.0, 3.0, c(0.0, 0.0)).is_err());
}

#[test]
fn pole_region_distance_against_sampled_curve() {
    for (p, z) in [(1.0, c(-0.5, 1.5)), (4.0 / 3.0, c(-2.0, 0.3)), (1.5, c(0.4, -0.8))] {
        let r = resolvent_pole_region(1.0, p, z).unwrap();
        let k = 1.0 / (4.0 * r.a * r.a);
        let brute = (-200_000..=200_000)
            .map(|i| i as f64 * 5e-5)
            .map(|s| ((z.re + r.c_p + k * s * s).powi(2) + (z.im - s).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!((r.boundary_distance - brute).abs() < 1e-8, "p={p}: {} vs {brute}", r.boundary_distance);
    }
}

#[test]
fn resolvent_search() {
    let s = resolvent_chaotic_z(1.0, 4.0, &grid()).unwrap();
    assert!(s.found);
    let w = s.verdict.unwrap().witnesses.unwrap();
    assert!(w.m1_abs < 1.0 && 1.0 < w.m2_abs);
    assert!(resolvent_chaotic_z(1.0, 2.0, &grid()).is_err());
    let far = classify_chaos(&Symbol::resolvent(1.0, re(10.0)), 4.0, 1.0, &grid()).unwrap();
    assert_eq!(far.reason, Reason::Contraction);
}

fn any_symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (0.01f64..3.0).prop_map(|t| Symbol::heat(1.0, t).unwrap()),
        (-2.0f64..4.0, -3.0f64..3.0, 0.01f64..3.0).prop_map(|(a, b, t)| Symbol::shifted_heat(1.0, c(a, b), t).unwrap()),
        (0.5f64..5.0, -3.0f64..3.0).prop_map(|(a, b)| Symbol::resolvent(1.0, c(a, b))),
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Symbol::constant(1.0, c(a, b))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbols_even(m in any_symbol(), x in -8.0f64..8.0, y in -0.9f64..0.9) {
        let l = c(x, y);
        let (a, b) = (m.eval(l), m.eval(-l));
        prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
    }

    #[test]
    fn dual_is_involution(m in any_symbol(), x in -8.0f64..8.0, y in -0.9f64..0.9) {
        let l = c(x, y);
        let (a, b) = (dual_symbol(&dual_symbol(&m)).eval(l), m.eval(l));
        prop_assert!((a - b).norm() <= 1e-14 * b.norm().max(1.0));
    }

    #[test]
    fn strip_duality(p in 1.0f64..50.0, rho in 0.1f64..5.0) {
        let s = StripSpec::new(p, rho).unwrap();
        let d = StripSpec::new(conjugate_exponent(p), rho).unwrap();
        prop_assert!((s.halfwidth - d.halfwidth).abs() <= 1e-12 * rho);
        prop_assert!(s.halfwidth >= 0.0 && s.halfwidth <= rho);
        prop_assert!((s.gamma_q + s.gamma_p).abs() < 1e-12);
        if p > 1.0 {
            let (a, b) = (c_threshold(rho, p).unwrap().value, c_threshold(rho, conjugate_exponent(p)).unwrap().value);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            prop_assert!(a <= rho * rho * (1.0 + 1e-12));
        }
    }

    #[test]
    fn classifier_sound(re_c in -1.0f64..3.0, im_c in -2.0f64..2.0, t in 0.1f64..2.0, p in 2.05f64..10.0) {
        let m = Symbol::shifted_heat(1.0, c(re_c, im_c), t).unwrap();
        let g = WitnessGrid { n_re: 60, n_im: 12, lambda_max: 8.0 };
        let v = classify_chaos(&m, p, 1.0, &g).unwrap();
        match v.classification {
            Classification::Chaotic => {
                let w = v.witnesses.unwrap();
                prop_assert!(w.m1_abs < 1.0 && 1.0 < w.m2_abs);
                prop_assert!(w.l1.im.abs() < v.strip_halfwidth && w.l2.im.abs() < v.strip_halfwidth);
                prop_assert!((m.eval(w.l1).norm() - w.m1_abs).abs() <= 1e-12 * w.m1_abs.max(1.0));
                prop_assert!((m.eval(w.l2).norm() - w.m2_abs).abs() <= 1e-12 * w.m2_abs);
            }
            Classification::NotChaotic => {
                prop_assert!(v.witnesses.is_none());
                prop_assert!(v.sup_abs.unwrap() <= 1.0);
                // sub-threshold shifts never expand: sup over S_p is e^{(Re c − c_p) t}
                let cp = c_threshold(1.0, p).unwrap().value;
                prop_assert!(re_c > cp || v.reason == Reason::Contraction || v.reason == Reason::NoExpandingWitness);
            }
            Classification::ChaoticAfterScaling => prop_assert!(v.nu.is_some() && v.witnesses.is_some()),
        }
        if re_c <= c_threshold(1.0, p).unwrap().value {
            prop_assert_eq!(v.classification, Classification::NotChaotic);
        }
    }

    #[test]
    fn low_p_never_chaotic(m in any_symbol(), p in 1.0f64..=2.0) {
        let v = classify_chaos(&m, p, 1.0, &grid()).unwrap();
        prop_assert_eq!(v.classification, Classification::NotChaotic);
        prop_assert_eq!(v.reason, Reason::PLeq2);
    }

    #[test]
    fn real_axis_pole_region(sigma in -5.0f64..5.0, p in 1.0f64..1.95) {
        let r = resolvent_pole_region(1.0, p, re(sigma)).unwrap();
        prop_assert_eq!(r.bounded, sigma > -r.c_p);
    }
}
