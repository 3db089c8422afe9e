//! Stabilized evaluation of the Laguerre and Bessel heat kernels and their
//! x-derivatives.
//!
//! Both kernels have the shape  c(t) (xy)^{−ν} exp(−quadratic) I_ν(z)  with
//! ν = (α−1)/2. Whenever the Bessel argument z is large the exponentially
//! scaled form U_ν is substituted, which turns the exponent into a function
//! of (x−y)² and removes the catastrophic cancellation between the Gaussian
//! factor and the growth of I_ν. The derivative kernels come in two
//! algebraically equal splits; the second one carries an explicit (x−y)
//! factor and is used near the diagonal, where the first would difference
//! two large terms.

use crate::error::{Error, Result};
use crate::measure::{rho_unchecked, Alpha};
use crate::specfun::{bessel_u_unchecked, log_gamma_unchecked, series_tail, u_succ_diff, Z_SWITCH};

/// t-dependent coefficients of the Laguerre kernel, all derived from
/// q = e^{−2t} with 1−q computed via expm1.
#[derive(Debug, Clone, Copy)]
struct LaguerreParams {
    /// 2q/(1−q²): Bessel-argument coefficient (z = θxy).
    theta: f64,
    /// (1+q²)/(1−q²): Gaussian coefficient.
    w: f64,
    /// (1−q)/(1+q): drift coefficient in the stabilized exponent.
    kappa: f64,
}

impl LaguerreParams {
    fn new(t: f64) -> Self {
        // q and 1−q are computed independently so each keeps full relative
        // precision (deriving one from the other loses digits at either end
        // of the t range).
        let q = (-2.0 * t).exp();
        let em = -(-2.0 * t).exp_m1(); // 1 − e^{−2t}
        let one_plus = 1.0 + q;
        let den = em * one_plus; // 1 − q²
        LaguerreParams {
            theta: 2.0 * q / den,
            w: (1.0 + q * q) / den,
            kappa: em / one_plus,
        }
    }
}

fn check_txy(t: f64, x: f64, y: f64) -> Result<()> {
    if !(t > 0.0 && x > 0.0 && y > 0.0) {
        return Err(Error::domain(format!(
            "heat kernel requires t, x, y > 0, got t={t}, x={x}, y={y}"
        )));
    }
    Ok(())
}

/// The Laguerre heat kernel T_t(x, y).
pub fn laguerre_heat(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    check_txy(t, x, y)?;
    let nu = (alpha.get() - 1.0) / 2.0;
    let p = LaguerreParams::new(t);
    let z = p.theta * x * y;
    if !(z > 0.0) {
        return Ok(0.0); // θ underflowed: the kernel is far below f64 range
    }
    if z <= Z_SWITCH {
        let ln_pre = p.theta.ln() + nu * (0.5 * p.theta).ln()
            - log_gamma_unchecked(nu + 1.0)
            - 0.5 * p.w * (x * x + y * y);
        Ok(ln_pre.exp() * series_tail(nu, z))
    } else {
        let d = x - y;
        let ln_pre =
            p.theta.ln() - nu * (x * y).ln() - 0.5 * z.ln() - 0.5 * p.w * d * d - p.kappa * x * y;
        Ok(ln_pre.exp() * bessel_u_unchecked(nu, z))
    }
}

/// The Bessel heat kernel T̃_t(x, y) = (2t)^{−1} e^{−(x²+y²)/4t} I_ν(xy/2t) (xy)^{−ν}.
pub fn bessel_heat(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    check_txy(t, x, y)?;
    let nu = (alpha.get() - 1.0) / 2.0;
    let z = x * y / (2.0 * t);
    if z <= Z_SWITCH {
        let ln_pre = -(2.0 * t).ln()
            - nu * (4.0 * t).ln()
            - log_gamma_unchecked(nu + 1.0)
            - (x * x + y * y) / (4.0 * t);
        Ok(ln_pre.exp() * series_tail(nu, z))
    } else {
        let d = x - y;
        let ln_pre = -(2.0 * t).ln() - nu * (x * y).ln() - 0.5 * z.ln() - d * d / (4.0 * t);
        Ok(ln_pre.exp() * bessel_u_unchecked(nu, z))
    }
}

/// (xy)^{−ν} e^{−w(x²+y²)/2} I_μ(z) for μ = ν and μ = ν+1, the two scaled
/// Bessel factors every Laguerre split term is built from.
fn laguerre_scaled_pair(p: &LaguerreParams, x: f64, y: f64, nu: f64) -> (f64, f64) {
    let z = p.theta * x * y;
    if !(z > 0.0) {
        return (0.0, 0.0);
    }
    if z <= Z_SWITCH {
        let base = nu * (0.5 * p.theta).ln() - 0.5 * p.w * (x * x + y * y);
        let g0 = (base - log_gamma_unchecked(nu + 1.0)).exp() * series_tail(nu, z);
        let g1 = (base + (0.5 * z).ln() - log_gamma_unchecked(nu + 2.0)).exp()
            * series_tail(nu + 1.0, z);
        (g0, g1)
    } else {
        let d = x - y;
        let common =
            (-nu * (x * y).ln() - 0.5 * z.ln() - 0.5 * p.w * d * d - p.kappa * x * y).exp();
        (
            common * bessel_u_unchecked(nu, z),
            common * bessel_u_unchecked(nu + 1.0, z),
        )
    }
}

/// ∂T_t/∂x via the far-from-diagonal split (two plain terms).
pub fn laguerre_heat_dx_far(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    check_txy(t, x, y)?;
    let nu = (alpha.get() - 1.0) / 2.0;
    let p = LaguerreParams::new(t);
    let (g0, g1) = laguerre_scaled_pair(&p, x, y, nu);
    Ok(p.theta * p.theta * y * g1 - p.theta * p.w * x * g0)
}

/// ∂T_t/∂x via the near-diagonal split: an (x−y)-factored term plus a term
/// whose Bessel difference is evaluated without cancellation.
pub fn laguerre_heat_dx_near(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    check_txy(t, x, y)?;
    let nu = (alpha.get() - 1.0) / 2.0;
    let p = LaguerreParams::new(t);
    let z = p.theta * x * y;
    if !(z > 0.0) {
        return Ok(0.0);
    }
    let t3;
    let t4;
    if z <= Z_SWITCH {
        let (g0, g1) = laguerre_scaled_pair(&p, x, y, nu);
        t3 = -p.theta * p.w * (x - y) * g0;
        t4 = p.theta * y * (p.theta * g1 - p.w * g0);
    } else {
        let d = x - y;
        let common =
            (-nu * (x * y).ln() - 0.5 * z.ln() - 0.5 * p.w * d * d - p.kappa * x * y).exp();
        let u0 = bessel_u_unchecked(nu, z);
        t3 = -p.theta * p.w * d * common * u0;
        // θU_{ν+1} − wU_ν = θ(U_{ν+1} − U_ν) − κU_ν, both factors small together.
        t4 = p.theta * y * common * (p.theta * u_succ_diff(nu, z) - p.kappa * u0);
    }
    Ok(t3 + t4)
}

/// ∂T_t/∂x with the split chosen by the localization scale: the (x−y)-factored
/// form inside |x−y| < ρ(y)/4, the plain form outside.
pub fn laguerre_heat_dx(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    if (x - y).abs() < 0.25 * rho_unchecked(y.max(f64::MIN_POSITIVE)) {
        laguerre_heat_dx_near(t, x, y, alpha)
    } else {
        laguerre_heat_dx_far(t, x, y, alpha)
    }
}

fn bessel_scaled_pair(t: f64, x: f64, y: f64, nu: f64) -> (f64, f64) {
    let z = x * y / (2.0 * t);
    if z <= Z_SWITCH {
        let base = -nu * (4.0 * t).ln() - (x * x + y * y) / (4.0 * t);
        let g0 = (base - log_gamma_unchecked(nu + 1.0)).exp() * series_tail(nu, z);
        let g1 = (base + (0.5 * z).ln() - log_gamma_unchecked(nu + 2.0)).exp()
            * series_tail(nu + 1.0, z);
        (g0, g1)
    } else {
        let d = x - y;
        let common = (-nu * (x * y).ln() - 0.5 * z.ln() - d * d / (4.0 * t)).exp();
        (
            common * bessel_u_unchecked(nu, z),
            common * bessel_u_unchecked(nu + 1.0, z),
        )
    }
}

/// ∂T̃_t/∂x, far-from-diagonal split.
pub fn bessel_heat_dx_far(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    check_txy(t, x, y)?;
    let nu = (alpha.get() - 1.0) / 2.0;
    let (g0, g1) = bessel_scaled_pair(t, x, y, nu);
    let c = 1.0 / (4.0 * t * t);
    Ok(c * (y * g1 - x * g0))
}

/// ∂T̃_t/∂x, near-diagonal split with the (x−y) factor explicit.
pub fn bessel_heat_dx_near(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    check_txy(t, x, y)?;
    let nu = (alpha.get() - 1.0) / 2.0;
    let z = x * y / (2.0 * t);
    let c = 1.0 / (4.0 * t * t);
    if z <= Z_SWITCH {
        let (g0, g1) = bessel_scaled_pair(t, x, y, nu);
        Ok(c * (-(x - y) * g0 + y * (g1 - g0)))
    } else {
        let d = x - y;
        let common = (-nu * (x * y).ln() - 0.5 * z.ln() - d * d / (4.0 * t)).exp();
        let u0 = bessel_u_unchecked(nu, z);
        Ok(c * common * (-d * u0 + y * u_succ_diff(nu, z)))
    }
}

/// ∂T̃_t/∂x with the split chosen as in [`laguerre_heat_dx`].
pub fn bessel_heat_dx(t: f64, x: f64, y: f64, alpha: Alpha) -> Result<f64> {
    if (x - y).abs() < 0.25 * rho_unchecked(y.max(f64::MIN_POSITIVE)) {
        bessel_heat_dx_near(t, x, y, alpha)
    } else {
        bessel_heat_dx_far(t, x, y, alpha)
    }
}
