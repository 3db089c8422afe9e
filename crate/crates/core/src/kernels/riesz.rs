//! Riesz transform kernels for both operators, their explicit singular parts,
//! and the integrable remainders h (Bessel, global) and g (Laguerre, local).
//!
//! The Bessel kernel is dilation-homogeneous, R̃(x, y) = y^{−α−1} R̃(x/y, 1),
//! so all its values reduce to the profile at y = 1. That profile, minus the
//! closed-form singular part, is a function with a mild |r−1|^{−1/2}
//! singularity which is cached on a log grid in r = x/y and interpolated;
//! inside a band around r = 1 the t-integral is evaluated directly instead.

use super::heat::{
    bessel_heat_dx_far, bessel_heat_dx_near, laguerre_heat_dx_far, laguerre_heat_dx_near,
};
use crate::error::{Error, Result};
use crate::measure::{rho_unchecked, smoothstep, Alpha};
use crate::quadrature::{integrate_t, Estimate, TailDecay};
use crate::specfun::log_gamma_unchecked;
use serde::{Deserialize, Serialize};

/// The constants of the explicit singular part:
/// A = −2Γ(1+α/2)/Γ((1+α)/2), B = −(α+1)/√π, both negative for α > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularConstants {
    pub a: f64,
    pub b: f64,
    pub alpha: Alpha,
}

/// Computes A(α), B(α) in log space.
pub fn singular_constants(alpha: Alpha) -> SingularConstants {
    let al = alpha.get();
    let a =
        -2.0 * (log_gamma_unchecked(1.0 + al / 2.0) - log_gamma_unchecked((1.0 + al) / 2.0)).exp();
    let b = -(al + 1.0) / std::f64::consts::PI.sqrt();
    SingularConstants { a, b, alpha }
}

/// The fixed even cutoff: 1 on |s| ≤ 3/2, supported in (−2, 2), C^∞.
pub fn cutoff_phi(s: f64) -> f64 {
    let s = s.abs();
    if s <= 1.5 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        smoothstep(2.0 * (2.0 - s))
    }
}

/// The two-term singular expression (A−B)/(x^{α+1}+y^{α+1}) + B/(x^{α+1}−y^{α+1}).
pub fn singular_part(x: f64, y: f64, c: &SingularConstants) -> Result<f64> {
    if x == y {
        return Err(Error::domain("singular part undefined on the diagonal"));
    }
    let p = c.alpha.get() + 1.0;
    let (xp, yp) = (x.powf(p), y.powf(p));
    Ok((c.a - c.b) / (xp + yp) + c.b / (xp - yp))
}

/// Large-t decay exponent of |∂ₓT̃_t|: the integrand behaves like t^{−(α+3)/2}.
fn bessel_tail(alpha: Alpha) -> TailDecay {
    TailDecay::Power {
        exponent: (alpha.get() + 3.0) / 2.0,
    }
}

/// R̃(x, y) by direct quadrature of the t-integral (no homogeneity reduction,
/// no cache). `tol` is absolute.
pub fn riesz_bessel_direct(x: f64, y: f64, alpha: Alpha, tol: f64) -> Result<Estimate> {
    if x == y {
        return Err(Error::domain("Riesz kernel undefined on the diagonal"));
    }
    let near = (x - y).abs() < 0.25 * y;
    // The integrand peaks near t ≈ (x²+y²)/(4(ν+2)); integrate past it before
    // trusting the empirical tail bound. Close to the diagonal there is a
    // second sharp peak at s ≈ |x−y| that the initial panels must resolve.
    let extent = (x * x + y * y).sqrt();
    let d = (x - y).abs();
    let breaks = [d / 2.0, 2.0 * d];
    integrate_t(
        |t| {
            if near {
                bessel_heat_dx_near(t, x, y, alpha).unwrap_or(0.0)
            } else {
                bessel_heat_dx_far(t, x, y, alpha).unwrap_or(0.0)
            }
        },
        bessel_tail(alpha),
        tol,
        extent,
        &breaks,
    )
}

/// Number of cache abscissae for the reduced Bessel profile.
const CACHE_SIZE: usize = 4096;
/// Cached ratio range [1/RANGE, RANGE] in r = x/y.
const CACHE_RANGE: f64 = 1e4;
/// Half-width of the diagonal band (in |r − 1|) evaluated directly.
const DIRECT_BAND: f64 = 0.1;

/// Frozen reference table of h(r) = R̃(r, 1) − singular(r, 1) on a log grid.
/// Built once per (α, tolerance); concurrent reads are free afterwards.
#[derive(Debug, Clone)]
pub struct BesselRieszCache {
    pub constants: SingularConstants,
    tol: f64,
    ln_lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl BesselRieszCache {
    /// Builds the table. `tol` is the relative target for kernel values at
    /// unit scale; the per-point absolute tolerance follows the local kernel
    /// magnitude.
    pub fn build(alpha: Alpha, tol: f64) -> Result<Self> {
        let constants = singular_constants(alpha);
        let ln_lo = -CACHE_RANGE.ln();
        let ln_hi = CACHE_RANGE.ln();
        let step = (ln_hi - ln_lo) / (CACHE_SIZE - 1) as f64;
        let mut values = vec![f64::NAN; CACHE_SIZE];
        for (i, v) in values.iter_mut().enumerate() {
            let r = (ln_lo + step * i as f64).exp();
            if (r - 1.0).abs() < DIRECT_BAND {
                continue; // band entries are evaluated directly on demand
            }
            *v = h_direct(r, alpha, &constants, tol)?;
        }
        Ok(BesselRieszCache {
            constants,
            tol,
            ln_lo,
            step,
            values,
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.constants.alpha
    }

    /// h(r) = R̃(r, 1) − singular(r, 1): interpolated where the table is
    /// smooth, direct quadrature in the diagonal band and outside the table.
    pub fn h_profile(&self, r: f64) -> Result<f64> {
        if r == 1.0 {
            return Err(Error::domain("h profile undefined at r = 1"));
        }
        let w = r.ln();
        let pos = (w - self.ln_lo) / self.step;
        let i = pos.floor() as isize;
        // Catmull-Rom needs i−1..i+2 inside the table and outside the band.
        if i < 1 || (i + 2) as usize >= CACHE_SIZE {
            return h_direct(r, self.alpha(), &self.constants, self.tol);
        }
        let idx = [i - 1, i, i + 1, i + 2].map(|j| j as usize);
        let f: Vec<f64> = idx.iter().map(|&j| self.values[j]).collect();
        if f.iter().any(|v| v.is_nan()) {
            return h_direct(r, self.alpha(), &self.constants, self.tol);
        }
        let s = pos - i as f64;
        Ok(catmull_rom(f[0], f[1], f[2], f[3], s))
    }

    /// R̃(x, y) = y^{−α−1}(singular(r,1) + h(r)) with r = x/y.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Err(Error::domain("Riesz kernel undefined on the diagonal"));
        }
        let r = x / y;
        let scale = y.powf(-self.alpha().get() - 1.0);
        let s = singular_part(r, 1.0, &self.constants)?;
        Ok(scale * (s + self.h_profile(r)?))
    }

    /// h_y(x) = y^{−α−1} h(x/y), the remainder of the Bessel kernel.
    pub fn h_remainder(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Err(Error::domain("h remainder undefined on the diagonal"));
        }
        Ok(y.powf(-self.alpha().get() - 1.0) * self.h_profile(x / y)?)
    }
}

fn catmull_rom(f0: f64, f1: f64, f2: f64, f3: f64, s: f64) -> f64 {
    let a = -0.5 * f0 + 1.5 * f1 - 1.5 * f2 + 0.5 * f3;
    let b = f0 - 2.5 * f1 + 2.0 * f2 - 0.5 * f3;
    let c = -0.5 * f0 + 0.5 * f2;
    ((a * s + b) * s + c) * s + f1
}

/// h(r) by direct quadrature: R̃(r, 1) − singular(r, 1). The t-integral runs
/// at an absolute tolerance tied to the local singular-part magnitude, so the
/// difference keeps absolute accuracy across the diagonal blow-up.
fn h_direct(r: f64, alpha: Alpha, c: &SingularConstants, tol: f64) -> Result<f64> {
    let s = singular_part(r, 1.0, c)?;
    let scale = 1.0 + s.abs();
    let est = riesz_bessel_direct(r, 1.0, alpha, tol * scale)?;
    Ok(est.value - s)
}

/// Laguerre Riesz kernel R(x, y) = ∫ ∂ₓT_t(x, y) dt/√t by direct quadrature.
/// There is no homogeneity shortcut; `tol` is relative to the local
/// singular-part scale.
#[derive(Debug, Clone, Copy)]
pub struct LaguerreRiesz {
    pub alpha: Alpha,
    pub constants: SingularConstants,
    pub tol: f64,
}

impl LaguerreRiesz {
    pub fn new(alpha: Alpha, tol: f64) -> Self {
        LaguerreRiesz {
            alpha,
            constants: singular_constants(alpha),
            tol,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.eval_estimate(x, y)?.value)
    }

    /// Kernel value together with the quadrature error estimate.
    pub fn eval_estimate(&self, x: f64, y: f64) -> Result<Estimate> {
        if x == y {
            return Err(Error::domain("Riesz kernel undefined on the diagonal"));
        }
        let near = (x - y).abs() < 0.25 * rho_unchecked(y);
        let d = (x - y).abs();
        let alpha = self.alpha;
        // Absolute tolerance follows the diagonal blow-up of the kernel.
        let scale = 1.0 + singular_part(x, y, &self.constants)?.abs() * cutoff_local(x, y);
        let est = integrate_t(
            |t| {
                if near {
                    laguerre_heat_dx_near(t, x, y, alpha).unwrap_or(0.0)
                } else {
                    laguerre_heat_dx_far(t, x, y, alpha).unwrap_or(0.0)
                }
            },
            TailDecay::Exponential {
                rate: alpha.get() + 1.0,
            },
            self.tol * scale,
            (x - y).abs().max(1.0),
            &[d / 2.0, 2.0 * d],
        )?;
        Ok(est)
    }

    /// g(x, y) = R(x, y) − φ((x−y)/ρ(y)) · singular(x, y), the locally
    /// corrected remainder. Outside the cutoff support g(x, y) = R(x, y).
    pub fn g_remainder(&self, x: f64, y: f64) -> Result<f64> {
        let phi = cutoff_local(x, y);
        let r = self.eval(x, y)?;
        if phi == 0.0 {
            Ok(r)
        } else {
            Ok(r - phi * singular_part(x, y, &self.constants)?)
        }
    }
}

/// φ((x−y)/ρ(y)), the localized cutoff factor.
pub fn cutoff_local(x: f64, y: f64) -> f64 {
    cutoff_phi((x - y) / rho_unchecked(y))
}

/// Γ(x, y) = √π x Σ_k β_k^{−1/2} ψ_k(x) ψ_k(y): the spectral form of the
/// correction kernel between the two Riesz transform normalizations.
pub fn gamma_kernel(x: f64, y: f64, alpha: Alpha, kmax: usize) -> f64 {
    let a = (alpha.get() - 1.0) / 2.0;
    let px = crate::specfun::laguerre_fn_all(kmax, a, x);
    let py = crate::specfun::laguerre_fn_all(kmax, a, y);
    let mut sum = 0.0;
    for k in 0..=kmax {
        let beta = 4.0 * k as f64 + alpha.get() + 1.0;
        sum += px[k] * py[k] / beta.sqrt();
    }
    std::f64::consts::PI.sqrt() * x * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn constants_closed_forms() {
        let c = singular_constants(alpha(1.0));
        assert_relative_eq!(c.a, -std::f64::consts::PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(c.a, -1.772_453_9, max_relative = 1e-7);
        assert_relative_eq!(
            c.b,
            -2.0 / std::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(c.b, -1.128_379_2, max_relative = 1e-7);
        let c2 = singular_constants(alpha(2.0));
        assert_relative_eq!(c2.b, -1.692_568_8, max_relative = 1e-7);
        for &al in &[0.3, 0.5, 1.0, 2.0, 3.5, 7.0] {
            let c = singular_constants(alpha(al));
            assert!(
                c.a < 0.0 && c.b < 0.0,
                "A, B must be negative at alpha = {al}"
            );
        }
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff_phi(0.0), 1.0);
        assert_eq!(cutoff_phi(1.5), 1.0);
        assert_eq!(cutoff_phi(-1.2), 1.0);
        assert_eq!(cutoff_phi(2.5), 0.0);
        assert_eq!(cutoff_phi(2.0), 0.0);
        let v = cutoff_phi(1.75);
        assert!(v > 0.0 && v < 1.0, "transition value {v}");
        // even, monotone on the transition
        assert_eq!(cutoff_phi(1.75), cutoff_phi(-1.75));
        assert!(cutoff_phi(1.6) > cutoff_phi(1.9));
    }

    #[test]
    fn singular_part_values() {
        let c = singular_constants(alpha(1.0));
        let v = singular_part(2.0, 1.0, &c).unwrap();
        let sp = std::f64::consts::PI.sqrt();
        let expect = (-2.0 / sp) / 3.0 + (-sp + 2.0 / sp) / 5.0;
        assert_relative_eq!(v, expect, max_relative = 1e-13);
        assert_relative_eq!(v, -0.504_941_3, max_relative = 1e-6);
        // The B-term is odd under x ↔ y.
        let b_part = |x: f64, y: f64| {
            let p = 2.0;
            c.b / (x.powf(p) - y.powf(p))
        };
        assert_relative_eq!(b_part(2.0, 1.0), -b_part(1.0, 2.0), max_relative = 1e-13);
        assert!(singular_part(1.0, 1.0, &c).is_err());
    }

    #[test]
    fn singular_part_far_field() {
        // x → ∞, y = 1: the expression approaches A/x^{α+1}.
        let c = singular_constants(alpha(1.5));
        let x = 1e5;
        let v = singular_part(x, 1.0, &c).unwrap();
        assert_relative_eq!(v, c.a / x.powf(2.5), max_relative = 1e-10);
    }

    #[test]
    fn bessel_direct_homogeneity() {
        // R̃(λx, λy) = λ^{−α−1} R̃(x, y) for independent direct quadratures.
        let a = alpha(1.0);
        let (x, y) = (1.3, 1.0);
        let base = riesz_bessel_direct(x, y, a, 1e-11).unwrap().value;
        for &lam in &[0.5, 3.0] {
            let got = riesz_bessel_direct(lam * x, lam * y, a, 1e-11 * lam.powf(-2.0))
                .unwrap()
                .value;
            assert_relative_eq!(got, lam.powf(-a.get() - 1.0) * base, max_relative = 1e-8);
        }
    }

    #[test]
    fn cache_matches_direct() {
        let a = alpha(1.0);
        let cache = BesselRieszCache::build(a, 1e-9).unwrap();
        for &(x, y) in &[(2.0, 1.0), (0.4, 1.0), (3.0, 2.0), (0.97, 1.0), (1.2, 0.3)] {
            let direct = riesz_bessel_direct(x, y, a, 1e-12).unwrap().value;
            let cached = cache.eval(x, y).unwrap();
            assert_relative_eq!(cached, direct, max_relative = 1e-6, epsilon = 1e-10);
        }
        assert!(cache.eval(1.0, 1.0).is_err());
    }

    #[test]
    fn bessel_kernel_sign_near_diagonal() {
        // B < 0 makes R̃(x, 1)(x−1) negative close to the diagonal.
        let a = alpha(1.0);
        let cache = BesselRieszCache::build(a, 1e-9).unwrap();
        for &dx in &[1e-2, -1e-2, 5e-3] {
            let x = 1.0 + dx;
            let v = cache.eval(x, 1.0).unwrap();
            assert!(v * dx < 0.0, "sign check failed at x = {x}: {v}");
        }
    }

    #[test]
    fn h_remainder_near_zero_law() {
        // h(r) + A − 2B → 0 as r → 0, with |h + A − 2B|/r bounded.
        let a = alpha(1.0);
        let cache = BesselRieszCache::build(a, 1e-9).unwrap();
        let c = cache.constants;
        let mut worst = 0.0f64;
        for i in 0..12 {
            let r = 0.01 + (0.4 - 0.01) * i as f64 / 11.0;
            let h = cache.h_profile(r).unwrap();
            let ratio = (h + c.a - 2.0 * c.b).abs() / r;
            worst = worst.max(ratio);
        }
        assert!(worst < 5.0, "|h + A − 2B|/r reached {worst}");
    }

    #[test]
    fn h_bounded_across_diagonal() {
        let a = alpha(1.0);
        let cache = BesselRieszCache::build(a, 1e-9).unwrap();
        for i in 0..21 {
            let r = 0.9 + 0.2 * i as f64 / 20.0;
            if (r - 1.0).abs() < 1e-4 {
                continue;
            }
            let h = cache.h_profile(r).unwrap();
            assert!(h.abs() <= 1e3, "h({r}) = {h}");
        }
    }

    #[test]
    fn laguerre_riesz_far_field_smallness() {
        let lr = LaguerreRiesz::new(alpha(1.0), 1e-9);
        let v = lr.eval(1.0, 10.0).unwrap();
        assert!(v.abs() <= 1e-6, "R(1, 10) = {v}");
    }

    #[test]
    fn laguerre_riesz_near_diagonal_blowup() {
        // |R(1+δ, 1)|·δ bounded and bounded away from 0; the limit is
        // B/((α+1)·1^α) by the Cauchy-type singular term.
        let lr = LaguerreRiesz::new(alpha(1.0), 1e-9);
        let target = lr.constants.b / 2.0;
        for &delta in &[1e-2, 1e-3, 1e-4] {
            let v = lr.eval(1.0 + delta, 1.0).unwrap();
            let prod = v * delta;
            assert!(
                prod.abs() > 0.1 * target.abs() && prod.abs() < 10.0 * target.abs(),
                "δ = {delta}: R·δ = {prod}, target {target}"
            );
        }
        let v = lr.eval(1.0 + 1e-4, 1.0).unwrap();
        assert_relative_eq!(v * 1e-4, target, max_relative = 2e-2);
    }

    #[test]
    fn g_equals_r_outside_cutoff() {
        let lr = LaguerreRiesz::new(alpha(1.0), 1e-9);
        // |x − y| ≥ 2ρ(y) puts φ at 0.
        let (x, y) = (5.0, 1.0);
        assert_eq!(cutoff_local(x, y), 0.0);
        let g = lr.g_remainder(x, y).unwrap();
        let r = lr.eval(x, y).unwrap();
        assert_eq!(g, r);
    }

    #[test]
    fn g_integrable_at_fixed_y() {
        // ∫ |g(x, 1)| dμ(x) finite for α = 1 (coarse tolerance keeps it fast).
        let a = alpha(1.0);
        let lr = LaguerreRiesz::new(a, 1e-7);
        let est = crate::quadrature::integrate_mu_with_breaks(
            &mut |x| lr.g_remainder(x, 1.0).map(f64::abs).unwrap_or(0.0),
            1e-3,
            8.0,
            a,
            &[1.0 - 1e-4, 1.0 + 1e-4],
            1e-4,
        )
        .unwrap();
        assert!(
            est.value.is_finite() && est.value > 0.0 && est.value < 50.0,
            "∫|g| = {}",
            est.value
        );
    }

    #[test]
    fn gamma_kernel_spectral_consistency() {
        // Γ(x,y) must be symmetric in (x,y) up to the explicit x factor:
        // Γ(x,y)/x = Γ(y,x)/y.
        let a = alpha(1.0);
        let g1 = gamma_kernel(0.7, 1.9, a, 80);
        let g2 = gamma_kernel(1.9, 0.7, a, 80);
        assert_relative_eq!(g1 / 0.7, g2 / 1.9, max_relative = 1e-10);
    }

    #[test]
    fn h_far_field_decay_slope() {
        // log-log slope of |h| on [3, 50] should be ≤ −(α+2) + 0.3.
        let a = alpha(1.0);
        let cache = BesselRieszCache::build(a, 1e-9).unwrap();
        let n = 14;
        let mut pts = Vec::new();
        for i in 0..n {
            let r = 3.0 * (50.0f64 / 3.0).powf(i as f64 / (n - 1) as f64);
            let h = cache.h_profile(r).unwrap().abs();
            pts.push((r.ln(), h.max(1e-300).ln()));
        }
        let slope = least_squares_slope(&pts);
        assert!(slope <= -(a.get() + 2.0) + 0.3, "far-field slope {slope}");
    }

    fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}
