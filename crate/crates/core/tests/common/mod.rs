#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use radlab::radial::{default_basis, SpectralBasis, Tolerances};
use radlab::DensityProfile;

/// Shared H³ basis on the default grids, `Λ = 24`.
pub fn h3() -> &'static Arc<SpectralBasis> {
    static BASIS: OnceLock<Arc<SpectralBasis>> = OnceLock::new();
    BASIS.get_or_init(|| default_basis(DensityProfile::hyperbolic(3).unwrap(), 24.0, Tolerances::default()).unwrap())
}

pub fn hyperbolic(n: i64) -> Arc<SpectralBasis> {
    default_basis(DensityProfile::hyperbolic(n).unwrap(), 24.0, Tolerances::default()).unwrap()
}
