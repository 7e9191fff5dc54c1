use std::fs;
use std::sync::Arc;

use radlab::convolution::random_bumps;
use radlab::export::*;
use radlab::grid::{RadialGrid, RadialSpace, SpectralGrid};
use radlab::radial::{RadialGridFunction, SpectralBasis, Tolerances};
use radlab::report::to_json_string;
use radlab::{Complex64, DensityProfile, Error};

fn space(panels: usize) -> Arc<RadialSpace> {
    RadialSpace::new(Arc::new(DensityProfile::hyperbolic(3).unwrap()), RadialGrid::graded(20.0, panels, 16).unwrap()).unwrap()
}

#[test]
fn radial_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = space(64);
    let f = random_bumps(7, 1)[0].build(&s).unwrap();
    let f = f.combine(Complex64::new(0.0, 0.5), &f, Complex64::new(1.0, 0.0)).unwrap();
    let csv = dir.path().join("out/f.csv");
    write_radial(&csv, &f, vec!["note".into()]).unwrap();
    let side: Sidecar = serde_json::from_slice(&fs::read(sidecar_path(&csv)).unwrap()).unwrap();
    assert_eq!(side.layout, "radial");
    assert_eq!(side.flags, vec!["note".to_string()]);
    let back = read_radial(&csv, &s).unwrap();
    assert_eq!(back.values(), f.values());
    assert_eq!(back.support(), f.support());
}

#[test]
fn read_rejects_other_grid() {
    let dir = tempfile::tempdir().unwrap();
    let f = random_bumps(8, 1)[0].build(&space(64)).unwrap();
    let csv = dir.path().join("f.csv");
    write_radial(&csv, &f, vec![]).unwrap();
    assert!(matches!(read_radial(&csv, &space(32)), Err(Error::GridMismatch(_))));
    let dr = RadialSpace::new(Arc::new(DensityProfile::damek_ricci(2, 1).unwrap()), RadialGrid::graded(20.0, 64, 16).unwrap()).unwrap();
    assert!(matches!(read_radial(&csv, &dr), Err(Error::GridMismatch(_))));
}

#[test]
fn read_without_sidecar_and_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let s = space(64);
    let f = RadialGridFunction::from_real_fn(&s, |r| (-r * r).exp()).unwrap();
    let csv = dir.path().join("plain.csv");
    fs::write(&csv, radial_csv(&f)).unwrap();
    assert_eq!(read_radial(&csv, &s).unwrap().values(), f.values());
    fs::write(&csv, "r,re,im\n0,1\n").unwrap();
    assert!(matches!(read_radial(&csv, &s), Err(Error::Parse(_))));
    fs::write(&csv, "r,re,im\n0,x,0\n").unwrap();
    assert!(matches!(read_radial(&csv, &s), Err(Error::Parse(_))));
}

#[test]
fn spectral_and_series_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = space(64);
    let b = SpectralBasis::build(Arc::clone(&s), SpectralGrid::up_to(8.0).unwrap(), Tolerances::default()).unwrap();
    let big_f = b.spectral_fn(|l| Complex64::new((-l * l).exp(), 0.0));
    let csv = dir.path().join("spec.csv");
    write_spectral(&csv, &big_f, &s.profile().hash(), vec![]).unwrap();
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + b.lambdas().len());
    assert!(text.starts_with("lambda,re,im\n"));
    let series = dir.path().join("norms.csv");
    write_series(&series, "norm", &[1.0, 0.5, 0.25], vec![]).unwrap();
    assert_eq!(fs::read_to_string(&series).unwrap(), "n,norm\n0,1\n1,0.5\n2,0.25\n");
    let side: Sidecar = serde_json::from_slice(&fs::read(sidecar_path(&series)).unwrap()).unwrap();
    assert_eq!(side.columns, ["n", "norm"]);
}

#[test]
fn json_is_deterministic() {
    let s = space(64);
    let f = random_bumps(9, 1)[0].build(&s).unwrap();
    let side = Sidecar {
        layout: "radial".into(),
        columns: vec![],
        profile_hash: Some(s.profile().hash()),
        radial_grid: Some(s.grid().clone()),
        support: Some(f.support()),
        flags: vec![],
    };
    let a = to_json_string(&side).unwrap();
    assert_eq!(a, to_json_string(&side.clone()).unwrap());
    let back: Sidecar = serde_json::from_str(&a).unwrap();
    assert_eq!(back.support, side.support);
    assert_eq!(to_json_string(&back).unwrap(), a);
}
