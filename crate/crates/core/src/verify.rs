//! Numerical verification suites: each one sweeps a kernel- or atom-level
//! statement at desk scale, records every measured constant, and grades the
//! run against thresholds pinned here. The CLI's `verify` command and the
//! acceptance tests both drive these functions.

use crate::atoms::{
    decompose, random_atom, telescope_expand, validate_atom, Atom, AtomKind, DecomposeParams,
    LocalizerBump, Rng64,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::kernels::cutoff_phi;
use crate::measure::{rho_unchecked, Alpha, Interval};
use crate::quadrature::{integrate_mu_with_breaks, Grid};
use crate::transforms::{analyze, g_op, riesz_pv, riesz_spectral_eval, GridFunction, TransformCtx};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Machine-readable result of one suite at one α.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub alpha: f64,
    pub thresholds: BTreeMap<String, f64>,
    pub measured: BTreeMap<String, f64>,
    pub pass: bool,
    pub raw: serde_json::Value,
    /// Wall-clock seconds; excluded from serialization so that repeated runs
    /// with one configuration emit byte-identical reports.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl SuiteReport {
    fn new(suite: &str, alpha: f64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            alpha,
            thresholds: BTreeMap::new(),
            measured: BTreeMap::new(),
            pass: true,
            raw: serde_json::Value::Null,
            runtime_seconds: 0.0,
        }
    }

    fn finish_runtime(&mut self, start: Instant, budget: f64) {
        self.runtime_seconds = start.elapsed().as_secs_f64();
        if self.runtime_seconds >= budget {
            self.pass = false;
        }
    }

    fn check(&mut self, name: &str, measured: f64, threshold: f64, ok: bool) {
        self.thresholds.insert(name.to_string(), threshold);
        self.measured.insert(name.to_string(), measured);
        if !ok {
            self.pass = false;
        }
    }

    /// Finiteness-only criterion: no numeric threshold, the value just has to
    /// be a finite number.
    fn check_finite(&mut self, name: &str, measured: f64) {
        self.measured.insert(name.to_string(), measured);
        if !measured.is_finite() {
            self.pass = false;
        }
    }

    fn record(&mut self, name: &str, measured: f64) {
        self.measured.insert(name.to_string(), measured);
    }
}

/// The suite names accepted by the CLI.
pub const SUITES: [&str; 5] = ["prop23", "prop31", "lemma41", "thm15-forward", "thm211"];

/// Dispatches a suite by name.
pub fn run_suite(name: &str, alpha: f64, cfg: &RunConfig) -> Result<SuiteReport> {
    match name {
        "prop23" => bessel_remainder_suite(alpha, cfg),
        "prop31" => laguerre_remainder_suite(alpha, cfg),
        "lemma41" => localization_suite(alpha, cfg),
        "thm15-forward" => atom_forward_suite(alpha, cfg),
        "thm211" => telescoping_suite(alpha, cfg),
        other => Err(Error::InvalidInput(format!(
            "unknown suite {other}; expected one of {SUITES:?}"
        ))),
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Bessel-side remainder: h = R̃(·,1) − singular part. Near-zero slope law,
/// boundedness across the diagonal, far-field decay, and L¹ convergence.
pub fn bessel_remainder_suite(alpha: f64, cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let al = Alpha::new(alpha)?;
    let mut report = SuiteReport::new("prop23", alpha);
    let cache = crate::kernels::BesselRieszCache::build(al, cfg.kernel_tol)?;
    let consts = cache.constants;

    // (a) |h(x) + A − 2B| ≤ C·x on (0.01, 0.4): fitted C reported, must be finite.
    let mut near_ratio: f64 = 0.0;
    let mut near_pts = Vec::new();
    for i in 0..24 {
        let x = 0.01 + (0.4 - 0.01) * i as f64 / 23.0;
        let h = cache.h_profile(x)?;
        let ratio = (h + consts.a - 2.0 * consts.b).abs() / x;
        near_pts.push(serde_json::json!([x, h, ratio]));
        near_ratio = near_ratio.max(ratio);
    }
    report.check_finite("near_zero_slope_c", near_ratio);

    // (b) h bounded across the diagonal window (0.9, 1.1).
    let mut diag_max: f64 = 0.0;
    for i in 0..41 {
        let x = 0.9 + 0.2 * i as f64 / 40.0;
        if (x - 1.0).abs() < 1e-5 {
            continue;
        }
        diag_max = diag_max.max(cache.h_profile(x)?.abs());
    }
    report.check(
        "diagonal_window_max",
        diag_max,
        1e4,
        diag_max.is_finite() && diag_max <= 1e4,
    );

    // (c) far-field log-log slope on [3, 50] ≤ −(α+2) + 0.3.
    let n = 16;
    let mut far = Vec::with_capacity(n);
    for i in 0..n {
        let x = 3.0 * (50.0f64 / 3.0).powf(i as f64 / (n - 1) as f64);
        let h = cache.h_profile(x)?.abs().max(1e-300);
        far.push((x.ln(), h.ln()));
    }
    let slope = least_squares_slope(&far);
    let slope_bound = -(alpha + 2.0) + 0.3;
    report.check("far_field_slope", slope, slope_bound, slope <= slope_bound);

    // (d) ∫_{0.01}^{50} |h| dμ converges under refinement (two band/tolerance
    // levels within 1%).
    let integral_at = |band: f64, tol: f64| -> Result<f64> {
        let est = integrate_mu_with_breaks(
            &mut |x: f64| {
                if (x - 1.0).abs() <= band {
                    0.0
                } else {
                    cache.h_profile(x).map(f64::abs).unwrap_or(0.0)
                }
            },
            0.01,
            50.0,
            al,
            &[1.0 - band, 1.0, 1.0 + band],
            tol,
        )?;
        Ok(est.value)
    };
    let coarse = integral_at(4e-4, 1e-5)?;
    let fine = integral_at(1e-4, 1e-6)?;
    let rel_change = (fine - coarse).abs() / fine.abs().max(1e-300);
    report.record("h_l1_integral", fine);
    report.check(
        "h_l1_refinement_change",
        rel_change,
        0.01,
        rel_change < 0.01,
    );

    report.finish_runtime(start, 300.0);
    report.raw = serde_json::json!({ "near_points": near_pts, "far_points": far });
    Ok(report)
}

/// Laguerre-side remainder integrability: max over a y-sweep of ∫|g(x,y)|dμ(x)
/// finite with max/median < 10.
pub fn laguerre_remainder_suite(alpha: f64, cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let al = Alpha::new(alpha)?;
    let mut report = SuiteReport::new("prop31", alpha);
    let lag = crate::kernels::LaguerreRiesz::new(al, cfg.kernel_tol);
    let s = cfg.sweeps;
    let ys: Vec<f64> = (0..s.remainder_y_count)
        .map(|i| {
            s.remainder_y_lo
                * (s.remainder_y_hi / s.remainder_y_lo)
                    .powf(i as f64 / (s.remainder_y_count.max(2) - 1) as f64)
        })
        .collect();
    let integrals: Vec<Result<f64>> = ys
        .par_iter()
        .map(|&y| {
            let band = 1e-6 * rho_unchecked(y);
            let hi = (3.0 * y).max(8.0) + 4.0;
            let est = integrate_mu_with_breaks(
                &mut |x: f64| {
                    if (x - y).abs() <= band {
                        0.0
                    } else {
                        lag.g_remainder(x, y).map(f64::abs).unwrap_or(0.0)
                    }
                },
                0.0,
                hi,
                al,
                &[
                    y - band,
                    y,
                    y + band,
                    y - 2.0 * rho_unchecked(y),
                    y + 2.0 * rho_unchecked(y),
                ],
                2e-4,
            )?;
            Ok(est.value)
        })
        .collect();
    let mut values = Vec::with_capacity(ys.len());
    for r in integrals {
        values.push(r?);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().unwrap();
    let med = median(&sorted);
    report.check_finite("sweep_max", max);
    report.check("max_over_median", max / med, 10.0, max / med < 10.0);
    report.finish_runtime(start, 1200.0);
    report.raw = serde_json::json!({
        "y": ys,
        "g_l1": values,
    });
    Ok(report)
}

/// Kernel-difference localization: sup over y near y₀ of
/// ∫ |R(x,y) − R̃(x,y)φ((x−y)/ρ(y₀))| dμ(x), swept over y₀.
pub fn localization_suite(alpha: f64, cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let al = Alpha::new(alpha)?;
    let mut report = SuiteReport::new("lemma41", alpha);
    let lag = crate::kernels::LaguerreRiesz::new(al, cfg.kernel_tol);
    let cache = crate::kernels::BesselRieszCache::build(al, cfg.kernel_tol)?;
    let s = cfg.sweeps;
    let y0s: Vec<f64> = (0..s.localization_count)
        .map(|i| {
            s.localization_lo
                * (s.localization_hi / s.localization_lo)
                    .powf(i as f64 / (s.localization_count.max(2) - 1) as f64)
        })
        .collect();
    let sups: Vec<Result<f64>> = y0s
        .par_iter()
        .map(|&y0| {
            let rho0 = rho_unchecked(y0);
            let mut sup: f64 = 0.0;
            for frac in [-0.9, -0.45, 0.0, 0.45, 0.9] {
                let y = y0 + frac * rho0;
                if y <= 0.0 {
                    continue;
                }
                let band = 1e-6 * rho_unchecked(y);
                let hi = (3.0 * y0).max(8.0) + 4.0;
                let est = integrate_mu_with_breaks(
                    &mut |x: f64| {
                        if (x - y).abs() <= band {
                            return 0.0;
                        }
                        let r = lag.eval(x, y).unwrap_or(0.0);
                        let loc = cutoff_phi((x - y) / rho0);
                        let rb = if loc == 0.0 {
                            0.0
                        } else {
                            cache.eval(x, y).unwrap_or(0.0)
                        };
                        (r - rb * loc).abs()
                    },
                    0.0,
                    hi,
                    al,
                    &[y - band, y, y + band, y - 2.0 * rho0, y + 2.0 * rho0],
                    2e-4,
                )?;
                sup = sup.max(est.value);
            }
            Ok(sup)
        })
        .collect();
    let mut values = Vec::with_capacity(y0s.len());
    for r in sups {
        values.push(r?);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().unwrap();
    let med = median(&sorted);
    report.check_finite("sweep_max", max);
    report.check("max_over_median", max / med, 10.0, max / med < 10.0);
    report.finish_runtime(start, 1200.0);
    report.raw = serde_json::json!({ "y0": y0s, "difference_l1": values });
    Ok(report)
}

/// ‖Ra‖_{L¹} for one atom on a fixed composite panel layout: geometric
/// grading into the support edges (where the transform has its integrable
/// edge structure), a few panels across the support, geometric growth
/// outward. Nested adaptivity at every x would make the sweep quadratic in
/// cost; the layout below delivers percent-level accuracy, which the ratio
/// and trend thresholds leave ample room for (validated against the fully
/// adaptive route in the unit tests).
pub fn riesz_atom_l1(atom: &Atom, ctx: &TransformCtx) -> Result<f64> {
    let iv = atom.interval;
    let (lo_s, hi_s) = (iv.left().max(1e-12), iv.right());
    let hi_domain = (3.0 * iv.center).max(12.0);
    let alpha = ctx.alpha.get();
    // Near block: the support plus a geometric collar; 8-point panels since
    // every node there costs a full principal-value evaluation.
    let mut near_cuts: Vec<f64> = Vec::new();
    for i in 0..=4 {
        near_cuts.push(lo_s + (hi_s - lo_s) * i as f64 / 4.0);
    }
    let mut step = iv.radius;
    for _ in 0..6 {
        near_cuts.push((lo_s - step).max(1e-6));
        near_cuts.push((hi_s + step).min(hi_domain));
        step *= 0.4;
    }
    near_cuts.sort_by(f64::total_cmp);
    near_cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + hi_domain));
    let mut total = 0.0;
    for w in near_cuts.windows(2) {
        total += gl8_abs_mu(atom, w[0], w[1], alpha, ctx)?;
    }
    let (near_lo, near_hi) = (near_cuts[0], *near_cuts.last().unwrap());
    // Far blocks: geometric panels outward; the transform is a smooth small
    // kernel integral there.
    let mut p = near_hi;
    while p < hi_domain {
        let q = (p * 1.8).min(hi_domain);
        total += gl8_abs_mu(atom, p, q, alpha, ctx)?;
        p = q;
    }
    let mut q = near_lo;
    while q > 1e-5 {
        let p = (q * 0.45).max(1e-5 * 0.999);
        total += gl8_abs_mu(atom, p, q, alpha, ctx)?;
        q = p;
    }
    Ok(total)
}

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_805,
    0.525_532_409_916_328_986,
    0.796_666_477_413_626_740,
    0.960_289_856_497_536_232,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_361_983,
    0.313_706_645_877_887_287,
    0.222_381_034_453_374_471,
    0.101_228_536_290_376_259,
];

/// ∫_a^b |Ra(x)| dμ(x) by a single 8-point Gauss panel.
fn gl8_abs_mu(atom: &Atom, a: f64, b: f64, alpha: f64, ctx: &TransformCtx) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..4 {
        for sgn in [-1.0, 1.0] {
            let x = mid + sgn * half * GL8_X[i];
            acc += GL8_W[i] * riesz_apply_at(atom, x, ctx)?.abs() * x.powf(alpha);
        }
    }
    Ok(acc * half)
}

/// Ra(x): the full principal-value route when x is near the atom's support,
/// plain kernel quadrature when the kernel is regular there.
pub fn riesz_apply_at(atom: &Atom, x: f64, ctx: &TransformCtx) -> Result<f64> {
    let iv = atom.interval;
    let margin = 0.05 * rho_unchecked(x.max(1e-12));
    if x > iv.left() - margin && x < iv.right() + margin {
        return riesz_pv(&atom.profile, x, ctx);
    }
    // Regular region: R(x,·) is smooth on the support.
    let lag = &ctx.laguerre;
    let est = integrate_mu_with_breaks(
        &mut |y: f64| lag.eval(x, y).unwrap_or(0.0) * atom.value_at(y),
        iv.left(),
        iv.right(),
        ctx.alpha,
        &[],
        ctx.quad_tol * 10.0,
    )?;
    Ok(est.value)
}

/// Forward direction at the atom level: 100 random atoms per α, every ‖Ra‖₁
/// finite, bounded max/median, and no monotone trend of ‖Ra‖₁ against the
/// atom's center across three decades.
pub fn atom_forward_suite(alpha: f64, cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let al = Alpha::new(alpha)?;
    let mut report = SuiteReport::new("thm15-forward", alpha);
    let s = cfg.sweeps;
    if s.atom_count == 0 {
        return Err(Error::InvalidInput(
            "thm15-forward: zero atoms configured".into(),
        ));
    }
    // A dedicated coarse context: percent-level kernel tolerances keep the
    // two-level nested quadrature affordable across 100 atoms.
    let ctx = TransformCtx::new(
        al,
        (cfg.kernel_tol * 1000.0).min(1e-6),
        1e-4,
        crate::quadrature::PvConfig {
            quad_tol: 1e-6,
            ..cfg.pv
        },
    )?;
    let lo = s.atom_center_lo;
    let hi = s.atom_center_hi;
    let region = Interval::new(0.5 * (lo + hi), 0.5 * (hi - lo))?;
    let mut rng = Rng64::new(cfg.seed);
    let atoms: Vec<Atom> = (0..s.atom_count)
        .map(|_| random_atom(AtomKind::H1, region, al, &mut rng))
        .collect::<Result<_>>()?;
    let norms: Vec<Result<f64>> = atoms.par_iter().map(|a| riesz_atom_l1(a, &ctx)).collect();
    let mut pts = Vec::with_capacity(atoms.len());
    let mut values = Vec::with_capacity(atoms.len());
    for (atom, n) in atoms.iter().zip(norms) {
        let n = n?;
        values.push(n);
        pts.push((atom.interval.center.ln(), n.max(1e-300).ln()));
    }
    let finite = values.iter().all(|v| v.is_finite());
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().unwrap();
    let med = median(&sorted);
    let slope = least_squares_slope(&pts);
    report.check("all_finite", if finite { 1.0 } else { 0.0 }, 1.0, finite);
    report.check("max_over_median", max / med, 20.0, max / med <= 20.0);
    report.check("center_trend_slope", slope.abs(), 0.2, slope.abs() <= 0.2);
    report.record("sweep_max", max);
    report.record("sweep_median", med);
    report.finish_runtime(start, 1800.0);
    report.raw = serde_json::json!({
        "centers": atoms.iter().map(|a| a.interval.center).collect::<Vec<_>>(),
        "radii": atoms.iter().map(|a| a.interval.radius).collect::<Vec<_>>(),
        "riesz_l1": values,
    });
    Ok(report)
}

/// Telescoping machinery plus the decomposition round trip: reconstruction to
/// 1e−9, |σ| ≤ C₁·r, Σ|κ| bounded over the sweep; then 20 battery functions
/// decompose, reconstruct in L¹ to 1e−6, and Σ|λ| ≤ C(‖f‖₁ + ‖Rf‖₁) with a
/// single reported C.
pub fn telescoping_suite(alpha: f64, cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let al = Alpha::new(alpha)?;
    let mut report = SuiteReport::new("thm211", alpha);
    let mut rng = Rng64::new(cfg.seed ^ 0x7e1e_5c09);

    // Telescoping sweep.
    let mut worst_recon: f64 = 0.0;
    let mut worst_sigma_ratio: f64 = 0.0;
    let mut worst_kappa: f64 = 0.0;
    let m = 1.0;
    for case in 0..cfg.sweeps.telescope_cases {
        let i_iv = Interval::new(3.0, m)?;
        let bump = LocalizerBump { interval: i_iv };
        let z0 = rng.range(3.7, 4.3);
        let r = rng.range(0.02, 0.24) * m / 4.0;
        let j_iv = Interval::new(z0, r)?;
        let atom = if case % 2 == 0 {
            Atom::two_block(j_iv, AtomKind::H1Tilde, al)?
        } else {
            Atom::smooth_wavelet(j_iv, AtomKind::H1Tilde, al)?
        };
        let expansion = telescope_expand(&atom, &bump, m)?;
        for (_, b) in &expansion {
            if !validate_atom(b).is_empty() {
                return Err(Error::DecompositionInternal(format!(
                    "telescope output failed validation in case {case}"
                )));
            }
        }
        // Pointwise reconstruction against ψ_I·a.
        let sup_scale = atom.sup_norm().max(1.0);
        for i in 0..120 {
            let x = z0 - 30.0 * r + 60.0 * r * i as f64 / 119.0;
            if x <= 0.0 {
                continue;
            }
            let got: f64 = expansion.iter().map(|(k, b)| k * b.value_at(x)).sum();
            let expect = bump.eval(x) * atom.value_at(x);
            worst_recon = worst_recon.max((got - expect).abs() / sup_scale);
        }
        let sigma = atom.profile.inner_with(|z| bump.eval(z) - bump.eval(z0));
        let c1 = bump.lipschitz() + 1.0;
        worst_sigma_ratio = worst_sigma_ratio.max(sigma.abs() / (c1 * r));
        let kappa_sum: f64 = expansion.iter().map(|(k, _)| k.abs()).sum();
        worst_kappa = worst_kappa.max(kappa_sum);
    }
    report.check(
        "telescope_reconstruction",
        worst_recon,
        1e-9,
        worst_recon < 1e-9,
    );
    report.check(
        "sigma_over_c1r",
        worst_sigma_ratio,
        1.0,
        worst_sigma_ratio <= 1.0,
    );
    report.check_finite("kappa_sum_max", worst_kappa);

    // Decomposition battery.
    let ctx = cfg.ctx(alpha)?;
    let battery = battery_functions(al, cfg.sweeps.battery_size);
    let results: Vec<Result<(f64, f64, f64, f64)>> = battery
        .par_iter()
        .map(|f| {
            let dec = decompose(
                f,
                DecomposeParams {
                    haar_depth: cfg.haar_depth,
                },
            )?;
            for (_, atom) in &dec.terms {
                if !validate_atom(atom).is_empty() {
                    return Err(Error::DecompositionInternal(
                        "decomposition output failed validation".into(),
                    ));
                }
            }
            let recon = dec.reconstruction_l1_error(f)? / f.lp_norm(1);
            let coeff = dec.coefficient_l1();
            // Spectral estimate of ‖Rf‖₁ over a wide grid.
            let coeffs = analyze(f, cfg.kmax)?;
            let rf_l1 = integrate_mu_with_breaks(
                &mut |x: f64| riesz_spectral_eval(&coeffs, x).abs(),
                0.0,
                cfg.x_max.max(f.grid.x_max() + 4.0),
                al,
                &[],
                1e-8,
            )?
            .value;
            let _ = &ctx;
            Ok((recon, coeff, f.lp_norm(1), rf_l1))
        })
        .collect();
    let mut worst_battery_recon: f64 = 0.0;
    let mut c_norm: f64 = 0.0;
    let mut raw_battery = Vec::new();
    for r in results {
        let (recon, coeff, f1, rf1) = r?;
        worst_battery_recon = worst_battery_recon.max(recon);
        c_norm = c_norm.max(coeff / (f1 + rf1));
        raw_battery.push(serde_json::json!({
            "recon_rel_l1": recon,
            "coefficient_l1": coeff,
            "f_l1": f1,
            "rf_l1_spectral": rf1,
        }));
    }
    report.check(
        "battery_reconstruction",
        worst_battery_recon,
        1e-6,
        worst_battery_recon < 1e-6,
    );
    report.check_finite("norm_control_c", c_norm);
    report.finish_runtime(start, 1800.0);
    report.raw = serde_json::json!({ "battery": raw_battery });
    Ok(report)
}

/// The decomposition battery: smooth bumps across centers and widths plus
/// low-order eigenfunction combinations, all compactly supported.
pub fn battery_functions(alpha: Alpha, count: usize) -> Vec<GridFunction> {
    let mut out = Vec::new();
    let centers = [0.3f64, 0.8, 1.5, 2.5, 4.0];
    let widths = [0.15f64, 0.35];
    for &c in &centers {
        for &w in &widths {
            let grid = Grid::standard(alpha, (c + 8.0 * w).min(8.0f64).max(2.0)).unwrap();
            out.push(GridFunction::from_fn(grid, move |x| {
                (-(x - c) * (x - c) / (w * w)).exp()
            }));
        }
    }
    // Eigenfunction combinations, numerically compactly supported on [0, 8].
    let combos: [&[(usize, f64)]; 10] = [
        &[(0, 1.0)],
        &[(1, 1.0)],
        &[(2, 0.7), (5, 0.3)],
        &[(0, 0.5), (3, -0.5)],
        &[(4, 1.0)],
        &[(1, 0.4), (2, 0.3), (6, 0.3)],
        &[(7, 1.0)],
        &[(0, 1.0), (8, -0.2)],
        &[(3, 0.8), (4, 0.2)],
        &[(5, 0.6), (6, -0.4)],
    ];
    for combo in combos {
        let grid = Grid::standard(alpha, 8.0).unwrap();
        let combo: Vec<(usize, f64)> = combo.to_vec();
        out.push(GridFunction::from_fn(grid, move |x| {
            combo
                .iter()
                .map(|&(k, c)| c * crate::specfun::laguerre_fn(k, alpha, x))
                .sum()
        }));
    }
    out.truncate(count.max(1));
    out
}

/// The ten-function battery of the cross-route consistency gate: both Riesz
/// paths evaluated on a probe grid, relative L² discrepancy reported.
pub fn riesz_cross_oracle(alpha: f64, cfg: &RunConfig) -> Result<(f64, Vec<f64>)> {
    let al = Alpha::new(alpha)?;
    let ctx = cfg.ctx(alpha)?;
    let battery = cross_oracle_battery(al);
    let discrepancies: Vec<Result<f64>> = battery
        .par_iter()
        .map(|f| {
            let coeffs = analyze(f, cfg.kmax)?;
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..24 {
                let x = 0.2 + 3.4 * i as f64 / 23.0;
                let spectral = riesz_spectral_eval(&coeffs, x);
                let pv = riesz_pv(f, x, &ctx)?;
                num += (spectral - pv) * (spectral - pv);
                den += spectral * spectral;
            }
            Ok((num / den.max(1e-300)).sqrt())
        })
        .collect();
    let mut values = Vec::new();
    for d in discrepancies {
        values.push(d?);
    }
    let worst = values.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok((worst, values))
}

/// Eigenfunction combinations and bumps at three centers: resolvable at the
/// default spectral truncation so the spectral route is trustworthy.
pub fn cross_oracle_battery(alpha: Alpha) -> Vec<GridFunction> {
    let mut out = Vec::new();
    let combos: [&[(usize, f64)]; 7] = [
        &[(0, 1.0)],
        &[(1, 1.0)],
        &[(2, 1.0)],
        &[(1, 0.5), (3, 0.5)],
        &[(0, 0.3), (4, 0.7)],
        &[(2, 0.6), (5, -0.4)],
        &[(1, 0.25), (2, 0.25), (3, 0.5)],
    ];
    for combo in combos {
        let grid = Grid::standard(alpha, 10.0).unwrap();
        let combo: Vec<(usize, f64)> = combo.to_vec();
        out.push(GridFunction::from_fn(grid, move |x| {
            combo
                .iter()
                .map(|&(k, c)| c * crate::specfun::laguerre_fn(k, alpha, x))
                .sum()
        }));
    }
    // The bumps are symmetrized about the origin: the basis consists of
    // polynomials in x², so the expansion of a function with a nonzero odd
    // part at 0 converges only algebraically and the spectral route would
    // not be trustworthy at the default truncation.
    for &(c, w) in &[(0.3f64, 0.28f64), (1.0, 0.3), (5.0, 0.45)] {
        let grid = Grid::standard(alpha, 10.0).unwrap();
        out.push(GridFunction::from_fn(grid, move |x| {
            (-(x - c) * (x - c) / (w * w)).exp() + (-(x + c) * (x + c) / (w * w)).exp()
        }));
    }
    out
}

/// G-operator boundedness probe: ‖Gf‖₁/‖f‖₁ over a few localized functions.
pub fn g_operator_ratio(alpha: f64, cfg: &RunConfig) -> Result<f64> {
    let al = Alpha::new(alpha)?;
    let ctx = cfg.ctx(alpha)?;
    let mut worst: f64 = 0.0;
    for &(c, w) in &[(0.5f64, 0.2f64), (1.0, 0.1), (3.0, 0.3)] {
        let iv = Interval::new(c, 4.0 * w)?;
        let grid = Grid::over_interval(al, iv, 8)?;
        let f = GridFunction::from_fn(grid, move |x| (-(x - c) * (x - c) / (w * w)).exp());
        let hi = (3.0 * c).max(10.0);
        let gf_l1 = integrate_mu_with_breaks(
            &mut |x: f64| g_op(&f, x, &ctx).map(f64::abs).unwrap_or(0.0),
            0.0,
            hi,
            al,
            &[iv.left(), iv.right()],
            2e-4,
        )?
        .value;
        worst = worst.max(gf_l1 / f.lp_norm(1));
    }
    Ok(worst)
}
