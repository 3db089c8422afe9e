//! Laguerre polynomials `L_k^a` and the orthonormal Laguerre functions
//! `ψ_k^a(x) = (2 k!/Γ(k+a+1))^{1/2} L_k^a(x²) e^{−x²/2}`.
//!
//! With a = (α−1)/2 the functions ψ_k are orthonormal in L²((0,∞), x^α dx)
//! and satisfy the lowering identity (d/dx + x) ψ_k^a = −2√k x ψ_{k−1}^{a+1},
//! from which first and second derivatives are assembled analytically.

use super::gamma::log_gamma_unchecked;
use crate::error::{Error, Result};
use crate::measure::Alpha;

/// Index (degree k, type parameter a > −1) of a Laguerre polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreIndex {
    pub k: usize,
    pub a: f64,
}

impl LaguerreIndex {
    pub fn new(k: usize, a: f64) -> Result<Self> {
        if !(a > -1.0) {
            return Err(Error::domain(format!(
                "Laguerre type parameter must be > -1, got {a}"
            )));
        }
        Ok(LaguerreIndex { k, a })
    }
}

/// `L_k^a(x)` by the ascending three-term recurrence.
pub fn laguerre_poly(idx: LaguerreIndex, x: f64) -> f64 {
    let LaguerreIndex { k, a } = idx;
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for m in 1..k {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + a - x) * cur - (mf + a) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Eigenvalue of the Laguerre operator on ψ_k: β_k = 4k + α + 1.
pub fn eigenvalue(k: usize, alpha: Alpha) -> f64 {
    4.0 * k as f64 + alpha.get() + 1.0
}

/// All of ψ_0^a(x), …, ψ_kmax^a(x) in one recurrence pass.
///
/// The recurrence is run on the normalized functions directly, so the values
/// stay O(1) in the oscillatory region and underflow harmlessly beyond the
/// turning point.
pub fn laguerre_fn_all(kmax: usize, a: f64, x: f64) -> Vec<f64> {
    let u = x * x;
    let psi0 = (0.5 * (std::f64::consts::LN_2 - log_gamma_unchecked(a + 1.0)) - 0.5 * u).exp();
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(psi0);
    if kmax == 0 {
        return out;
    }
    let mut prev = 0.0f64; // ψ_{−1}
    let mut cur = psi0;
    for k in 0..kmax {
        let kf = k as f64;
        let denom = ((kf + 1.0) * (kf + 1.0 + a)).sqrt();
        let next = ((2.0 * kf + 1.0 + a - u) * cur - (kf * (kf + a)).sqrt() * prev) / denom;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// ψ_k with explicit type parameter a.
pub fn laguerre_fn_type(k: usize, a: f64, x: f64) -> f64 {
    *laguerre_fn_all(k, a, x).last().unwrap()
}

/// The orthonormal Laguerre function ψ_k^{(α−1)/2}(x).
pub fn laguerre_fn(k: usize, alpha: Alpha, x: f64) -> f64 {
    laguerre_fn_type(k, (alpha.get() - 1.0) / 2.0, x)
}

/// d/dx ψ_k^{(α−1)/2}(x) = −2√k x ψ_{k−1}^{(α+1)/2}(x) − x ψ_k^{(α−1)/2}(x).
pub fn laguerre_fn_dx(k: usize, alpha: Alpha, x: f64) -> f64 {
    laguerre_fn_dx_type(k, (alpha.get() - 1.0) / 2.0, x)
}

fn laguerre_fn_dx_type(k: usize, a: f64, x: f64) -> f64 {
    let lowering = if k == 0 {
        0.0
    } else {
        -2.0 * (k as f64).sqrt() * x * laguerre_fn_type(k - 1, a + 1.0, x)
    };
    lowering - x * laguerre_fn_type(k, a, x)
}

/// d²/dx² ψ_k^{(α−1)/2}(x), assembled from the same lowering identities:
/// ψ_k'' = 4√(k(k−1)) x² ψ_{k−2}^{a+2} + (4x² − 2)√k ψ_{k−1}^{a+1} + (x² − 1) ψ_k^a.
pub fn laguerre_fn_dxx(k: usize, alpha: Alpha, x: f64) -> f64 {
    let a = (alpha.get() - 1.0) / 2.0;
    let kf = k as f64;
    let mut acc = (x * x - 1.0) * laguerre_fn_type(k, a, x);
    if k >= 1 {
        acc += (4.0 * x * x - 2.0) * kf.sqrt() * laguerre_fn_type(k - 1, a + 1.0, x);
    }
    if k >= 2 {
        acc += 4.0 * (kf * (kf - 1.0)).sqrt() * x * x * laguerre_fn_type(k - 2, a + 2.0, x);
    }
    acc
}

/// Lψ = −ψ'' − (α/x)ψ' + x²ψ evaluated from the analytic derivatives.
pub fn apply_operator(k: usize, alpha: Alpha, x: f64) -> f64 {
    -laguerre_fn_dxx(k, alpha, x) - alpha.get() / x * laguerre_fn_dx(k, alpha, x)
        + x * x * laguerre_fn(k, alpha, x)
}
