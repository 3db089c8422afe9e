//! Heat semigroups, Riesz transform kernels, and atomic Hardy-space machinery
//! for the Laguerre and Bessel operators on X = ((0,∞), x^α dx).
//!
//! The crate is organized along the pipeline:
//!
//! * [`specfun`] — log-gamma, modified Bessel `I_ν`/`U_ν`, Laguerre functions;
//! * [`measure`] — intervals, the localization scale ρ, covers, partitions of unity;
//! * [`quadrature`] — adaptive μ-weighted quadrature, dt/√t integrals, principal values;
//! * [`kernels`] — stabilized heat kernels, Riesz kernels, singular parts and remainders;
//! * [`transforms`] — spectral analysis/synthesis, semigroup, maximal function, Riesz paths;
//! * [`atoms`] — atom validation/generation, telescoping expansion, atomic decomposition;
//! * [`verify`] — the numerical verification suites driven by the CLI and the
//!   acceptance tests.

pub mod atoms;
pub mod config;
pub mod error;
pub mod io;
pub mod kernels;
pub mod measure;
pub mod quadrature;
pub mod specfun;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use measure::{Alpha, Interval};
pub use quadrature::{Estimate, Grid, PvConfig};
pub use transforms::GridFunction;
