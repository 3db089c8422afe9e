//! Self-contained special functions: log-gamma, the modified Bessel function
//! `I_ν` with its scaled form `U_ν`, and the Laguerre polynomials/functions
//! with analytic derivatives.
//!
//! Everything here is a pure function of its arguments; no global state.

mod bessel;
mod gamma;
mod laguerre;

pub use bessel::{bessel_i, bessel_u, Order};
pub(crate) use bessel::{bessel_u_unchecked, series_tail, u_succ_diff, Z_SWITCH};
pub(crate) use gamma::log_gamma_unchecked;
pub use gamma::{gamma_ratio, log_gamma};
pub use laguerre::{
    apply_operator, eigenvalue, laguerre_fn, laguerre_fn_all, laguerre_fn_dx, laguerre_fn_dxx,
    laguerre_fn_type, laguerre_poly, LaguerreIndex,
};
