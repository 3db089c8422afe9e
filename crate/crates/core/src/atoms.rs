//! Atoms for the three Hardy-space flavours, their validation and random
//! generation, the telescoping expansion that repairs cancellation after a
//! smooth localization, and the constructive atomic decomposition.
//!
//! An atom is a function supported in an interval I = B(y₀, r), bounded by
//! μ(I)^{−1}, with a mean-zero condition that switches on below a quarter of
//! the kind's critical radius: ρ(y₀) for the global space, the scale m for
//! the local ones, and always for the Bessel-global flavour.

use crate::error::{Error, Result};
use crate::measure::{build_cover, partition_of_unity, rho_unchecked, smoothstep, Alpha, Interval};
use crate::quadrature::{Grid, NODES_PER_PANEL};
use crate::transforms::{GridFunction, Tail};
use serde::{Deserialize, Serialize};

/// Which atom axioms apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AtomKind {
    /// r ≤ ρ(y₀); cancellation required when r ≤ ρ(y₀)/4.
    H1,
    /// No radius bound; cancellation always required.
    H1Tilde,
    /// r ≤ m; cancellation required when r ≤ m/4.
    Local(f64),
}

/// An interval, a kind tag, and a sampled profile supported in the interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Atom {
    pub interval: Interval,
    pub kind: AtomKind,
    pub profile: GridFunction,
}

/// One failed axiom, with the amount by which it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AtomViolation {
    SupportOutside { excess: f64 },
    SupNorm { bound: f64, actual: f64 },
    RadiusBound { bound: f64, actual: f64 },
    Cancellation { tolerance: f64, defect: f64 },
}

/// Relative cancellation tolerance: |∫a dμ| ≤ tol · ‖a‖_∞ μ(I).
pub const CANCELLATION_RTOL: f64 = 1e-9;

impl Atom {
    pub fn alpha(&self) -> Alpha {
        self.profile.alpha()
    }

    pub fn sup_norm(&self) -> f64 {
        self.profile
            .values
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn integral(&self) -> f64 {
        self.profile.integrate()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.profile.value_at(x)
    }

    /// μ(I)^{−1} χ_I: legal whenever cancellation is not required.
    pub fn indicator(
        interval: Interval,
        kind: AtomKind,
        alpha: Alpha,
        panels: usize,
    ) -> Result<Atom> {
        let inv = 1.0 / interval.mu(alpha);
        let grid = Grid::over_interval(alpha, interval, panels)?;
        Ok(Atom {
            interval,
            kind,
            profile: GridFunction::from_fn(grid, |_| inv),
        })
    }

    /// Two-block profile: +t/μ(left half) on the left, −t/μ(right half) on
    /// the right, scaled so the sup norm is exactly μ(I)^{−1}; μ-mean zero in
    /// closed form.
    pub fn two_block(interval: Interval, kind: AtomKind, alpha: Alpha) -> Result<Atom> {
        let mid = 0.5 * (interval.left() + interval.right());
        let left = Interval {
            center: 0.5 * (interval.left() + mid),
            radius: 0.5 * (mid - interval.left()),
        };
        let right = Interval {
            center: 0.5 * (mid + interval.right()),
            radius: 0.5 * (interval.right() - mid),
        };
        let (mu_l, mu_r) = (left.mu(alpha), right.mu(alpha));
        let t = mu_l.min(mu_r) / interval.mu(alpha);
        let (c_l, c_r) = (t / mu_l, -t / mu_r);
        let grid = Grid::over_interval(alpha, interval, 8)?;
        let profile = GridFunction::from_fn(grid, |x| if x < mid { c_l } else { c_r });
        Ok(Atom {
            interval,
            kind,
            profile,
        })
    }

    /// Smooth mean-zero profile: bump(s)·(s − c) with c solving the μ-mean
    /// equation on the atom's own grid, rescaled to sup norm μ(I)^{−1}.
    pub fn smooth_wavelet(interval: Interval, kind: AtomKind, alpha: Alpha) -> Result<Atom> {
        let (y0, r) = (interval.center, interval.radius);
        let bump = |x: f64| {
            let s = (x - y0) / r;
            if s.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - s * s)).exp()
            }
        };
        let grid = Grid::over_interval(alpha, interval, 8)?;
        let b = GridFunction::from_fn(grid.clone(), bump);
        let bs = GridFunction::from_fn(grid.clone(), |x| bump(x) * (x - y0) / r);
        let c = bs.integrate() / b.integrate();
        let raw = GridFunction::from_fn(grid, |x| bump(x) * ((x - y0) / r - c));
        let sup = raw.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = 1.0 / (interval.mu(alpha) * sup);
        let mut profile = raw;
        profile.scale(scale);
        Ok(Atom {
            interval,
            kind,
            profile,
        })
    }
}

/// Checks every axiom numerically; violations are data, not errors.
pub fn validate_atom(atom: &Atom) -> Vec<AtomViolation> {
    let mut out = Vec::new();
    let iv = atom.interval;
    let alpha = atom.alpha();
    let slack = 1e-12 * (1.0 + iv.right());
    let excess = (iv.left() - atom.profile.grid.x_min())
        .max(atom.profile.grid.x_max() - iv.right())
        .max(0.0);
    if excess > slack {
        out.push(AtomViolation::SupportOutside { excess });
    }
    let bound = 1.0 / iv.mu(alpha);
    let sup = atom.sup_norm();
    if sup > bound * (1.0 + 1e-9) {
        out.push(AtomViolation::SupNorm { bound, actual: sup });
    }
    let radius_bound = match atom.kind {
        AtomKind::H1 => Some(rho_unchecked(iv.center)),
        AtomKind::Local(m) => Some(m),
        AtomKind::H1Tilde => None,
    };
    if let Some(b) = radius_bound {
        if iv.radius > b * (1.0 + 1e-12) {
            out.push(AtomViolation::RadiusBound {
                bound: b,
                actual: iv.radius,
            });
        }
    }
    let needs_cancellation = match atom.kind {
        AtomKind::H1 => iv.radius <= rho_unchecked(iv.center) / 4.0,
        AtomKind::H1Tilde => true,
        AtomKind::Local(m) => iv.radius <= m / 4.0,
    };
    if needs_cancellation {
        let tolerance = CANCELLATION_RTOL * sup * iv.mu(alpha) + 1e-300;
        let defect = atom.integral().abs();
        if defect > tolerance {
            out.push(AtomViolation::Cancellation { tolerance, defect });
        }
    }
    out
}

/// Deterministic 64-bit generator (splitmix64); fixed seeds reproduce atoms
/// byte for byte on every platform.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

/// Draws an atom of the requested kind with center in `region`, radius
/// respecting the kind's constraint, and a profile from the fixed family
/// {indicator (only when cancellation is not required), two-block, smooth
/// wavelet}. The result always passes [`validate_atom`].
pub fn random_atom(
    kind: AtomKind,
    region: Interval,
    alpha: Alpha,
    rng: &mut Rng64,
) -> Result<Atom> {
    let lo = region.left().max(1e-6);
    let hi = region.right();
    if hi <= lo {
        return Err(Error::domain("empty atom region"));
    }
    // Log-uniform center.
    let y0 = (rng.range(lo.ln(), hi.ln())).exp();
    let r_cap = match kind {
        AtomKind::H1 => rho_unchecked(y0),
        AtomKind::Local(m) => m,
        AtomKind::H1Tilde => rho_unchecked(y0),
    };
    // Keep the interval inside (0, ∞) with a representable margin.
    let r_cap = r_cap.min(0.95 * y0);
    let threshold = match kind {
        AtomKind::H1 => rho_unchecked(y0),
        AtomKind::Local(m) => m,
        AtomKind::H1Tilde => f64::INFINITY,
    };
    // An uncancelled draw needs radii strictly above threshold/4, which the
    // 0.95·y₀ clipping can rule out near the origin.
    let uncancelled_possible = r_cap > 0.3 * threshold;
    let cancelled = !uncancelled_possible || rng.uniform() < 0.5;
    let r = if cancelled {
        rng.range(0.08, 0.24) * r_cap
    } else {
        rng.range((0.26 * threshold).max(0.3 * r_cap), 0.99 * r_cap)
    };
    let interval = Interval::new(y0, r)?;
    let atom = if cancelled {
        if rng.uniform() < 0.5 {
            Atom::two_block(interval, kind, alpha)?
        } else {
            Atom::smooth_wavelet(interval, kind, alpha)?
        }
    } else {
        match rng.next_u64() % 3 {
            0 => Atom::indicator(interval, kind, alpha, 8)?,
            1 => Atom::two_block(interval, kind, alpha)?,
            _ => Atom::smooth_wavelet(interval, kind, alpha)?,
        }
    };
    debug_assert!(validate_atom(&atom).is_empty());
    Ok(atom)
}

/// Smooth localizer ψ_I: identically 1 on I, supported in (4/3)I.
#[derive(Debug, Clone, Copy)]
pub struct LocalizerBump {
    pub interval: Interval,
}

impl LocalizerBump {
    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.interval.center).abs() / self.interval.radius;
        if s <= 1.0 {
            1.0
        } else if s >= 4.0 / 3.0 {
            0.0
        } else {
            smoothstep(3.0 * (4.0 / 3.0 - s))
        }
    }

    /// sup |ψ'| by dense finite differences over the transition zone.
    pub fn lipschitz(&self) -> f64 {
        let r = self.interval.radius;
        let h = r * 1e-6;
        let mut worst = 0.0f64;
        for i in 0..400 {
            let s = 1.0 + (i as f64 + 0.5) / 1200.0;
            let x = self.interval.center + s * r;
            let d = (self.eval(x + h) - self.eval(x - h)) / (2.0 * h);
            worst = worst.max(d.abs());
        }
        worst
    }
}

/// Dyadic grid over an interval whose boundaries also include the supplied
/// extra cuts (so indicator edges land on panel boundaries).
fn grid_with_cuts(alpha: Alpha, iv: Interval, panels: usize, extra: &[f64]) -> Result<Grid> {
    let (lo, hi) = (iv.left(), iv.right());
    let mut cuts: Vec<f64> = (0..=panels)
        .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
        .collect();
    for &c in extra {
        if c > lo + 1e-14 && c < hi - 1e-14 {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + hi));
    Grid::from_boundaries(alpha, cuts)
}

fn sup_of(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// The atom's own panel boundaries, to be reused as cuts so that sampling a
/// profile onto a new grid keeps its jumps on panel edges.
fn atom_cuts(atom: &Atom) -> Vec<f64> {
    atom.profile.grid.boundaries.clone()
}

/// The telescoping expansion: writes ψ_I·a as a finite sum Σ κ_i b_i of valid
/// local atoms, where a lives on J = B(z₀, r) with r < m/4 and ψ_I is a
/// localizer overlapping J. The chain runs through the dyadic dilations 2^i J
/// and stops at radius in [m/2, m), where cancellation is no longer required.
pub fn telescope_expand(atom: &Atom, bump: &LocalizerBump, m: f64) -> Result<Vec<(f64, Atom)>> {
    let alpha = atom.alpha();
    let j_iv = atom.interval;
    let (z0, r) = (j_iv.center, j_iv.radius);
    if !(r < m / 4.0) {
        return Err(Error::domain(format!(
            "telescoping needs r < m/4 (r = {r}, m = {m})"
        )));
    }
    let big = bump.interval.dilate(4.0 / 3.0);
    if j_iv.left() >= big.right() || j_iv.right() <= big.left() {
        return Err(Error::domain("localizer and atom supports are disjoint"));
    }
    // σ = ∫ a(z)(ψ_I(z) − ψ_I(z₀)) dμ(z)
    let psi_z0 = bump.eval(z0);
    let sigma = atom.profile.inner_with(|z| bump.eval(z) - psi_z0);
    let mut out = Vec::new();

    if sigma == 0.0 {
        // ψ_I a is already mean-zero (the common case ψ_I ≡ 1 on supp a):
        // re-normalize on J itself.
        let mut cuts = atom_cuts(atom);
        cuts.extend_from_slice(&[
            bump.interval.left(),
            bump.interval.right(),
            big.left(),
            big.right(),
        ]);
        // The localizer's transition has large high-order derivatives; 24
        // panels keep the in-panel interpolation of ψ_I·a below 1e-10.
        let grid = grid_with_cuts(alpha, j_iv, 24, &cuts)?;
        let lead = GridFunction::from_fn(grid, |x| bump.eval(x) * atom.value_at(x));
        let sup = sup_of(&lead.values);
        if sup > 0.0 {
            let kappa = sup * j_iv.mu(alpha);
            let mut profile = lead;
            profile.scale(1.0 / kappa);
            out.push((
                kappa,
                Atom {
                    interval: j_iv,
                    kind: AtomKind::Local(m),
                    profile,
                },
            ));
        }
        return Ok(out);
    }

    // N with 2^{−N−1} m ≤ r < 2^{−N} m
    let mut n_levels = 0usize;
    while m / 2.0f64.powi(n_levels as i32 + 1) > r {
        n_levels += 1;
    }

    // Leading term: ψ_I a − σ μ(2J)^{−1} χ_{2J}, mean-zero by construction.
    let two_j = j_iv.dilate(2.0);
    let mu_2j = two_j.mu(alpha);
    let mut lead_cuts = atom_cuts(atom);
    lead_cuts.extend_from_slice(&[
        j_iv.left(),
        j_iv.right(),
        bump.interval.left(),
        bump.interval.right(),
        big.left(),
        big.right(),
    ]);
    let lead_grid = grid_with_cuts(alpha, two_j, 24, &lead_cuts)?;
    let lead = GridFunction::from_fn(lead_grid, |x| {
        bump.eval(x) * atom.value_at(x) - sigma / mu_2j
    });
    let sup = sup_of(&lead.values);
    if sup > 0.0 {
        let kappa = sup * mu_2j;
        let mut profile = lead;
        profile.scale(1.0 / kappa);
        out.push((
            kappa,
            Atom {
                interval: two_j,
                kind: AtomKind::Local(m),
                profile,
            },
        ));
    }

    // Dyadic chain: σ(μ(2^i J)^{−1} χ_{2^i J} − μ(2^{i+1} J)^{−1} χ_{2^{i+1} J}).
    for i in 1..n_levels {
        let inner = j_iv.dilate(2.0f64.powi(i as i32));
        let outer = j_iv.dilate(2.0f64.powi(i as i32 + 1));
        let (mu_in, mu_out) = (inner.mu(alpha), outer.mu(alpha));
        let grid = grid_with_cuts(alpha, outer, 8, &[inner.left(), inner.right()])?;
        let d = GridFunction::from_fn(grid, |x| {
            let inside = if inner.contains(x) { 1.0 / mu_in } else { 0.0 };
            inside - 1.0 / mu_out
        });
        let sup = sup_of(&d.values);
        let kappa = sigma * sup * mu_out;
        if kappa != 0.0 {
            let mut profile = d;
            profile.scale(1.0 / (sup * mu_out));
            out.push((
                kappa,
                Atom {
                    interval: outer,
                    kind: AtomKind::Local(m),
                    profile,
                },
            ));
        }
    }
    // Final uncancelled block at radius 2^N r ∈ [m/2, m).
    let last = j_iv.dilate(2.0f64.powi(n_levels as i32));
    out.push((sigma, Atom::indicator(last, AtomKind::Local(m), alpha, 8)?));
    Ok(out)
}

/// A finite atomic decomposition Σ λ_j a_j of a target function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomicDecomposition {
    pub alpha: Alpha,
    pub terms: Vec<(f64, Atom)>,
}

impl AtomicDecomposition {
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(l, _)| l.abs()).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ λ_j a_j sampled on a grid, accumulating each atom over its own
    /// support only.
    pub fn synthesize_on(&self, grid: &Grid) -> GridFunction {
        let nodes = grid.nodes();
        let mut values = vec![0.0f64; nodes.len()];
        for (lambda, atom) in &self.terms {
            let lo = atom.profile.grid.x_min();
            let hi = atom.profile.grid.x_max();
            let start = nodes.partition_point(|&x| x < lo);
            let stop = nodes.partition_point(|&x| x <= hi);
            for i in start..stop {
                values[i] += lambda * atom.value_at(nodes[i]);
            }
        }
        GridFunction {
            grid: grid.clone(),
            values,
            tail: Tail::CompactSupport,
        }
    }

    /// Grid whose boundaries include every panel edge of every atom (plus the
    /// target's own edges), so synthesis is exact panel by panel.
    pub fn union_grid(&self, extra: &Grid) -> Result<Grid> {
        let mut cuts: Vec<f64> = extra.boundaries.clone();
        for (_, atom) in &self.terms {
            cuts.extend_from_slice(&atom.profile.grid.boundaries);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + b.abs()));
        Grid::from_boundaries(self.alpha, cuts)
    }

    /// ‖Σ λ_j a_j − f‖_{L¹} on the union grid.
    pub fn reconstruction_l1_error(&self, f: &GridFunction) -> Result<f64> {
        let grid = self.union_grid(&f.grid)?;
        let recon = self.synthesize_on(&grid);
        let err: f64 = grid
            .nodes()
            .iter()
            .zip(grid.mu_weights())
            .zip(&recon.values)
            .map(|((&x, &w), &v)| w * (v - f.value_at(x)).abs())
            .sum();
        Ok(err)
    }
}

/// Tuning knobs of the constructive decomposition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecomposeParams {
    /// Dyadic depth of the per-piece expansion (2^depth cells per piece).
    pub haar_depth: usize,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        DecomposeParams { haar_depth: 4 }
    }
}

/// Constructive atomic decomposition: cover by critical-scale intervals,
/// smooth partition of unity, per piece a mean term plus a dyadic mean-zero
/// cascade and per-cell remainders, a telescoping pass over the small atoms,
/// and a final conversion into the global flavour. Every output atom passes
/// [`validate_atom`].
pub fn decompose(f: &GridFunction, params: DecomposeParams) -> Result<AtomicDecomposition> {
    let alpha = f.alpha();
    if f.tail != Tail::CompactSupport {
        return Err(Error::domain(
            "decompose requires a compactly supported function",
        ));
    }
    let x_max = (f.grid.x_max() * 1.05).max(1.5);
    let cover = build_cover(x_max)?;
    let pou = partition_of_unity(&cover)?;
    let f_sup = sup_of(&f.values);
    if f_sup == 0.0 {
        return Ok(AtomicDecomposition {
            alpha,
            terms: Vec::new(),
        });
    }

    let mut terms: Vec<(f64, Atom)> = Vec::new();
    for (n, iv) in cover.intervals.iter().enumerate() {
        if iv.left() >= f.grid.x_max() || iv.right() <= f.grid.x_min() {
            continue;
        }
        let m_scale = iv.radius; // = ρ(z_n) by construction
        let localizer = LocalizerBump { interval: *iv };
        let cells = 1usize << params.haar_depth;
        // The piece grid carries the dyadic cell edges plus f's own panel
        // boundaries so that sampling η_n·f loses nothing to interpolation.
        let grid = grid_with_cuts(alpha, *iv, cells, &f.grid.boundaries)?;
        let piece = GridFunction::from_fn(grid.clone(), |x| pou.eta(n, x) * f.value_at(x));
        let piece_sup = sup_of(&piece.values);
        if piece_sup <= 1e-15 * f_sup {
            continue;
        }
        let scale_floor = 1e-14 * piece_sup;

        // Mean term: one uncancelled atom at the critical radius.
        let mean = piece.integrate();
        let mut residue = piece;
        if mean.abs() > scale_floor * iv.mu(alpha) {
            let inv = 1.0 / iv.mu(alpha);
            let a0 = Atom {
                interval: *iv,
                kind: AtomKind::Local(m_scale),
                profile: GridFunction::from_fn(grid.clone(), |_| inv),
            };
            for v in &mut residue.values {
                *v -= mean * inv;
            }
            terms.extend(promote_to_h1(mean, a0, &localizer, m_scale)?);
        }

        // Dyadic mean-zero cascade on the piece's cells. Each grid panel lies
        // inside exactly one finest cell; map panels to cells by midpoint.
        let boundaries: Vec<f64> = (0..=cells)
            .map(|i| iv.left() + (iv.right() - iv.left()) * i as f64 / cells as f64)
            .collect();
        let cell_width = (iv.right() - iv.left()) / cells as f64;
        let mut cell_ints = vec![0.0f64; cells];
        let mut cell_mus = vec![0.0f64; cells];
        let n_panels = grid.panel_count();
        for p in 0..n_panels {
            let mid = 0.5 * (grid.boundaries[p] + grid.boundaries[p + 1]);
            let c = (((mid - iv.left()) / cell_width) as usize).min(cells - 1);
            for k in (p * NODES_PER_PANEL)..((p + 1) * NODES_PER_PANEL) {
                cell_ints[c] += grid.mu_weights()[k] * residue.values[k];
            }
        }
        for c in 0..cells {
            cell_mus[c] = cell_interval(&boundaries, c, 1).mu(alpha);
        }
        for level in 0..params.haar_depth {
            let span = cells >> level;
            let blocks = 1usize << level;
            for b in 0..blocks {
                let lo_cell = b * span;
                let half = span / 2;
                let int_l: f64 = cell_ints[lo_cell..lo_cell + half].iter().sum();
                let int_r: f64 = cell_ints[lo_cell + half..lo_cell + span].iter().sum();
                let mu_l: f64 = cell_mus[lo_cell..lo_cell + half].iter().sum();
                let mu_r: f64 = cell_mus[lo_cell + half..lo_cell + span].iter().sum();
                let (m_l, m_r) = (int_l / mu_l, int_r / mu_r);
                let m_c = (int_l + int_r) / (mu_l + mu_r);
                let block_iv = cell_interval(&boundaries, lo_cell, span);
                let sup = (m_l - m_c).abs().max((m_r - m_c).abs());
                if sup <= scale_floor {
                    continue;
                }
                let mid = boundaries[lo_cell + half];
                let (vl, vr) = (m_l - m_c, m_r - m_c);
                let sub = grid_with_cuts(alpha, block_iv, 2, &[mid])?;
                let profile = GridFunction::from_fn(sub, |x| if x < mid { vl } else { vr });
                let kappa = sup * block_iv.mu(alpha);
                let mut p = profile;
                p.scale(1.0 / kappa);
                let atom = Atom {
                    interval: block_iv,
                    kind: AtomKind::Local(m_scale),
                    profile: p,
                };
                terms.extend(promote_to_h1(kappa, atom, &localizer, m_scale)?);
            }
        }
        // Remainder per finest cell: the residue minus its cell mean, on a
        // subgrid aligned with the piece grid's panels.
        for c in 0..cells {
            let cell_iv = cell_interval(&boundaries, c, 1);
            let mean_c = cell_ints[c] / cell_mus[c];
            let sub = grid_with_cuts(alpha, cell_iv, 2, &grid.boundaries)?;
            let vals = residue.clone();
            let profile = GridFunction::from_fn(sub, |x| vals.value_at(x) - mean_c);
            let sup = sup_of(&profile.values);
            if sup <= scale_floor {
                continue;
            }
            let kappa = sup * cell_iv.mu(alpha);
            let mut p = profile;
            p.scale(1.0 / kappa);
            let atom = Atom {
                interval: cell_iv,
                kind: AtomKind::Local(m_scale),
                profile: p,
            };
            terms.extend(promote_to_h1(kappa, atom, &localizer, m_scale)?);
        }
    }
    Ok(AtomicDecomposition { alpha, terms })
}

fn cell_interval(boundaries: &[f64], cell: usize, span: usize) -> Interval {
    let (lo, hi) = (boundaries[cell], boundaries[cell + span]);
    Interval {
        center: 0.5 * (lo + hi),
        radius: 0.5 * (hi - lo),
    }
}

/// Runs a freshly produced local atom through the telescoping localization
/// when it is small enough to require one (σ = 0 whenever the atom sits where
/// the localizer is flat, and the expansion collapses to the atom itself),
/// then converts everything into the global flavour.
fn promote_to_h1(
    lambda: f64,
    atom: Atom,
    localizer: &LocalizerBump,
    m_scale: f64,
) -> Result<Vec<(f64, Atom)>> {
    let pieces: Vec<(f64, Atom)> = if atom.interval.radius < m_scale / 4.0 {
        telescope_expand(&atom, localizer, m_scale)?
            .into_iter()
            .map(|(k, a)| (lambda * k, a))
            .collect()
    } else {
        vec![(lambda, atom)]
    };
    let mut out = Vec::new();
    for (l, a) in pieces {
        if l == 0.0 {
            continue;
        }
        out.extend(split_into_h1(l, a)?);
    }
    Ok(out)
}

/// Re-tags a local atom as a global one, splitting it into finitely many
/// pieces when its radius exceeds the pointwise scale ρ(y₀).
///
/// The split walks across the interval in steps of half the local scale;
/// each piece contributes its mean-centred part (mean-zero, any radius ≤ ρ
/// is legal) while the piece means are lifted by center-preserving dyadic
/// dilation chains up to an uncancelled indicator at a radius in
/// (ρ(center)/4, ρ(center)] — dilation keeps the center fixed, so no
/// ρ-comparability slack is consumed.
pub fn split_into_h1(lambda: f64, atom: Atom) -> Result<Vec<(f64, Atom)>> {
    let mut as_h1 = atom.clone();
    as_h1.kind = AtomKind::H1;
    if validate_atom(&as_h1).is_empty() {
        return Ok(vec![(lambda, as_h1)]);
    }
    let alpha = atom.alpha();
    let iv = atom.interval;
    // Greedy pieces of width half the local ρ.
    let mut cuts = vec![iv.left().max(1e-9)];
    loop {
        let p = *cuts.last().unwrap();
        if p >= iv.right() - 1e-13 {
            break;
        }
        let w = 0.5 * rho_unchecked(p.max(1e-9));
        cuts.push((p + w).min(iv.right()));
        if cuts.len() > 10_000 {
            return Err(Error::DecompositionInternal(
                "split produced too many pieces".into(),
            ));
        }
    }
    let k = cuts.len() - 1;
    // Pure-roundoff pieces must not be normalized into fake atoms.
    let noise_floor = 1e-12 * atom.sup_norm();
    let mut out = Vec::new();
    for i in 0..k {
        let piv = Interval {
            center: 0.5 * (cuts[i] + cuts[i + 1]),
            radius: 0.5 * (cuts[i + 1] - cuts[i]),
        };
        let sub = grid_with_cuts(alpha, piv, 4, &atom_cuts(&atom))?;
        let piece = GridFunction::from_fn(sub.clone(), |x| atom.value_at(x));
        let mu_i = piv.mu(alpha);
        let mean_i = piece.integrate() / mu_i;
        // Mean-centred part: mean-zero, radius ≤ ρ(center) by construction.
        let centred = GridFunction::from_fn(sub, |x| atom.value_at(x) - mean_i);
        let sup = sup_of(&centred.values);
        if sup > noise_floor {
            let kappa = sup * mu_i;
            let mut p = centred;
            p.scale(1.0 / kappa);
            let piece_atom = Atom {
                interval: piv,
                kind: AtomKind::H1,
                profile: p,
            };
            ensure_valid(&piece_atom, "split centred piece")?;
            out.push((lambda * kappa, piece_atom));
        }
        // Mean lift: coefficient (mean_i μ_i) on the normalized indicator,
        // raised through the dilation chain until cancellation stops being
        // required.
        let mass = mean_i * mu_i;
        if mass.abs() > noise_floor * mu_i {
            out.extend(lift_indicator(lambda * mass, piv, alpha)?);
        }
    }
    Ok(out)
}

/// λ·μ(P)^{−1}χ_P written as mean-zero dilation differences plus a final
/// uncancelled indicator at a legal radius, all centred at P's center.
fn lift_indicator(lambda: f64, piv: Interval, alpha: Alpha) -> Result<Vec<(f64, Atom)>> {
    let rho_c = rho_unchecked(piv.center);
    let mut out = Vec::new();
    if piv.radius > rho_c / 4.0 {
        // Already legal without cancellation.
        let a = Atom::indicator(piv, AtomKind::H1, alpha, 4)?;
        ensure_valid(&a, "lift early indicator")?;
        out.push((lambda, a));
        return Ok(out);
    }
    let mut inner = piv;
    loop {
        let grown = inner.dilate(2.0).radius.min(rho_c * 0.6);
        let outer = Interval {
            center: piv.center,
            radius: grown,
        };
        let (mu_in, mu_out) = (inner.mu(alpha), outer.mu(alpha));
        let grid = grid_with_cuts(alpha, outer, 4, &[inner.left(), inner.right()])?;
        let d = GridFunction::from_fn(grid, |x| {
            let inside = if inner.contains(x) { 1.0 / mu_in } else { 0.0 };
            inside - 1.0 / mu_out
        });
        let sup = sup_of(&d.values);
        let kappa = lambda * sup * mu_out;
        if kappa != 0.0 {
            let mut p = d;
            p.scale(1.0 / (sup * mu_out));
            let chain = Atom {
                interval: outer,
                kind: AtomKind::H1,
                profile: p,
            };
            ensure_valid(&chain, "lift chain difference")?;
            out.push((kappa, chain));
        }
        inner = outer;
        if inner.radius > rho_c / 4.0 {
            break;
        }
    }
    let a = Atom::indicator(inner, AtomKind::H1, alpha, 4)?;
    ensure_valid(&a, "lift final indicator")?;
    out.push((lambda, a));
    Ok(out)
}

fn ensure_valid(atom: &Atom, site: &str) -> Result<()> {
    let violations = validate_atom(atom);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::DecompositionInternal(format!(
            "{site}: atom failed validation: {violations:?} ({:?}, kind {:?})",
            atom.interval, atom.kind
        )))
    }
}

/// Σ|λ| of the constructive decomposition — an upper bound for the atomic
/// norm (the infimum over all decompositions is not searched).
pub fn atomic_norm_upper(f: &GridFunction, params: DecomposeParams) -> Result<f64> {
    Ok(decompose(f, params)?.coefficient_l1())
}
