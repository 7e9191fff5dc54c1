//! Radial harmonic analysis on rank-one harmonic manifolds, driven entirely
//! by the volume density `A(r)` in geodesic polar coordinates.

pub mod cache;
pub mod convolution;
pub mod density;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod export;
pub mod grid;
pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod radial;
pub mod report;

pub use density::{DensityProfile, ProfileSpec};
pub use error::{Error, Result};
pub use num_complex::Complex64;
