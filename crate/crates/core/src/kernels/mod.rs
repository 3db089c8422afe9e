//! Heat kernels, Riesz transform kernels, singular parts, and remainders.

mod heat;
mod riesz;

pub use heat::{
    bessel_heat, bessel_heat_dx, bessel_heat_dx_far, bessel_heat_dx_near, laguerre_heat,
    laguerre_heat_dx, laguerre_heat_dx_far, laguerre_heat_dx_near,
};
pub use riesz::{
    cutoff_local, cutoff_phi, gamma_kernel, riesz_bessel_direct, singular_constants, singular_part,
    BesselRieszCache, LaguerreRiesz, SingularConstants,
};
