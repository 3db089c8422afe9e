//! Geometry of the space X = ((0,∞), x^α dx, |·|): intervals (balls clipped to
//! the half-line), the auxiliary localization scale ρ, covers by critical-scale
//! intervals, and smooth partitions of unity subordinate to them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The fixed parameter α > 0 of the measure dμ = x^α dx.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
        }
        Ok(Alpha(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The auxiliary scale ρ(y) = 1 for y < 1, 1/y for y ≥ 1.
pub fn rho(y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain(format!("rho requires y > 0, got {y}")));
    }
    Ok(rho_unchecked(y))
}

pub(crate) fn rho_unchecked(y: f64) -> f64 {
    debug_assert!(y > 0.0);
    if y < 1.0 {
        1.0
    } else {
        1.0 / y
    }
}

/// A ball B(y₀, r) ⊂ (0, ∞); the left endpoint clamps to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub center: f64,
    pub radius: f64,
}

impl Interval {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(center > 0.0 && radius > 0.0) {
            return Err(Error::domain(format!(
                "interval needs center > 0 and radius > 0, got B({center}, {radius})"
            )));
        }
        Ok(Interval { center, radius })
    }

    pub fn left(&self) -> f64 {
        (self.center - self.radius).max(0.0)
    }

    pub fn right(&self) -> f64 {
        self.center + self.radius
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.left() && x < self.right()
    }

    /// kI = B(y₀, kr).
    pub fn dilate(&self, k: f64) -> Interval {
        debug_assert!(k > 0.0);
        Interval {
            center: self.center,
            radius: k * self.radius,
        }
    }

    /// μ(I) = ((y₀+r)^{α+1} − max(y₀−r,0)^{α+1})/(α+1), the exact closed form.
    pub fn mu(&self, alpha: Alpha) -> f64 {
        let p = alpha.get() + 1.0;
        (self.right().powf(p) - self.left().powf(p)) / p
    }
}

/// μ-measure of an interval.
pub fn mu(interval: Interval, alpha: Alpha) -> f64 {
    interval.mu(alpha)
}

/// Smooth transition 0 → 1 on [0, 1]: S(u) = E(u)/(E(u)+E(1−u)), E(u) = e^{−1/u}.
pub(crate) fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let e0 = (-1.0 / u).exp();
        let e1 = (-1.0 / (1.0 - u)).exp();
        e0 / (e0 + e1)
    }
}

/// C^∞ bump in normalized coordinates: 1 on |s| ≤ 0.65, 0 outside |s| ≥ 1,
/// smooth in between. The core width is tuned jointly with the marching
/// spacing of [`build_cover`]: wide enough cores keep the certified
/// derivative bound of the normalized partition within its budget of 16.
pub(crate) fn core_bump(s: f64) -> f64 {
    smoothstep((1.0 - s.abs()) / 0.35)
}

/// A cover of (0, X_max] by intervals I_n = B(z_n, ρ(z_n)), built by a marching
/// rule and verified constructively: the I_n cover, and the dilated family
/// {4 I_n} has overlap at most `overlap_bound` on a fine probe grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cover {
    pub intervals: Vec<Interval>,
    pub overlap_bound: usize,
    pub x_max: f64,
}

/// Marching step: 1.6 times the mean of ρ at the current center and at one
/// ρ-step ahead. Consecutive intervals still overlap by a fifth of a radius
/// (coverage, and room for the partition-of-unity transition zones), while
/// centers are spaced widely enough that the 4-fold dilations stay within the
/// overlap budget of 8 — the binding case is x ∈ (3, 5), where the dilations
/// of every unit-scale interval still reach.
fn marching_step(z: f64) -> f64 {
    let r = rho_unchecked(z);
    1.6 * 0.5 * (r + rho_unchecked(z + r))
}

/// Builds the marching cover of (0, X_max] and certifies its invariants.
pub fn build_cover(x_max: f64) -> Result<Cover> {
    if !(x_max > 1.0) {
        return Err(Error::domain(format!(
            "build_cover requires X_max > 1, got {x_max}"
        )));
    }
    let mut centers = vec![0.5f64];
    loop {
        let z = *centers.last().unwrap();
        if z > x_max {
            break;
        }
        centers.push(z + marching_step(z));
        if centers.len() > 4_000_000 {
            return Err(Error::CoverConstruction(
                "marching rule failed to terminate".to_string(),
            ));
        }
    }
    let intervals: Vec<Interval> = centers
        .iter()
        .map(|&z| Interval {
            center: z,
            radius: rho_unchecked(z),
        })
        .collect();
    let cover = Cover {
        intervals,
        overlap_bound: 8,
        x_max,
    };
    cover.verify()?;
    Ok(cover)
}

impl Cover {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Indices of intervals whose center lies within `slack` of x. Centers are
    /// increasing by construction, so a binary search bounds the scan.
    pub(crate) fn range_near(&self, x: f64, slack: f64) -> std::ops::Range<usize> {
        let lo = self.intervals.partition_point(|iv| iv.center < x - slack);
        let hi = self.intervals.partition_point(|iv| iv.center <= x + slack);
        lo..hi
    }

    /// Probe grid used by the constructive checks: log-spaced near 0 plus a
    /// uniform sweep up to just past X_max.
    fn probe_grid(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(6000);
        for i in 0..1000 {
            pts.push(1e-6 * (1e6f64).powf(i as f64 / 999.0).min(1e6));
        }
        let n = 5000;
        for i in 1..=n {
            pts.push(self.x_max * i as f64 / n as f64);
        }
        pts
    }

    fn verify(&self) -> Result<()> {
        for &x in &self.probe_grid() {
            if x > self.x_max {
                continue;
            }
            let mut covered = false;
            let mut dilated_hits = 0usize;
            // Radii are at most 1, so supports of I_n and 4I_n reach at most 4
            // from the center.
            for n in self.range_near(x, 4.0 + 1e-9) {
                let iv = &self.intervals[n];
                if iv.contains(x) {
                    covered = true;
                }
                if iv.dilate(4.0).contains(x) {
                    dilated_hits += 1;
                }
            }
            if !covered {
                return Err(Error::CoverConstruction(format!("point {x} not covered")));
            }
            if dilated_hits > self.overlap_bound {
                return Err(Error::CoverConstruction(format!(
                    "overlap {dilated_hits} of dilated intervals at {x} exceeds bound {}",
                    self.overlap_bound
                )));
            }
        }
        Ok(())
    }
}

/// Smooth partition of unity subordinate to a cover: η_n = b_n / Σ_m b_m with
/// b_n the standard bump scaled to I_n (identically 1 on the half-radius core).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub cover: Cover,
    /// Certified bound: max_n sup |η_n'| · ρ(z_n).
    pub derivative_bound: f64,
}

const POU_DERIVATIVE_BUDGET: f64 = 16.0;

/// Builds the normalized bumps and certifies Ση = 1, 0 ≤ η ≤ 1, support, and
/// the scaled derivative bound on a dense probe grid.
pub fn partition_of_unity(cover: &Cover) -> Result<PartitionOfUnity> {
    let mut worst = 0.0f64;
    // Derivative bound by dense finite differences, panelized per interval.
    for (n, iv) in cover.intervals.iter().enumerate() {
        let h = iv.radius * 1e-6;
        let samples = 600;
        for i in 0..=samples {
            let x = iv.left() + (iv.right() - iv.left()) * i as f64 / samples as f64;
            if x <= h || x > cover.x_max {
                continue;
            }
            let d = (eta_at(cover, n, x + h) - eta_at(cover, n, x - h)) / (2.0 * h);
            worst = worst.max(d.abs() * iv.radius);
        }
    }
    // Σ η_n = 1 wherever some bump is positive; verify on the probe grid.
    for &x in &cover.probe_grid() {
        if x > cover.x_max || x <= 0.0 {
            continue;
        }
        let total: f64 = (0..cover.intervals.len())
            .map(|n| eta_at(cover, n, x))
            .sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::PartitionConstruction(format!(
                "partition sums to {total} at x = {x}"
            )));
        }
    }
    if worst > POU_DERIVATIVE_BUDGET {
        return Err(Error::PartitionConstruction(format!(
            "scaled derivative bound {worst:.3} exceeds budget {POU_DERIVATIVE_BUDGET}"
        )));
    }
    Ok(PartitionOfUnity {
        cover: cover.clone(),
        derivative_bound: worst,
    })
}

fn raw_bump(iv: &Interval, x: f64) -> f64 {
    core_bump((x - iv.center) / iv.radius)
}

/// η_n(x) with the normalization Σ_m b_m computed on the fly.
pub fn eta_at(cover: &Cover, n: usize, x: f64) -> f64 {
    let b = raw_bump(&cover.intervals[n], x);
    if b == 0.0 {
        return 0.0;
    }
    let total: f64 = cover
        .range_near(x, 1.0 + 1e-12)
        .map(|m| raw_bump(&cover.intervals[m], x))
        .sum();
    b / total
}

impl PartitionOfUnity {
    pub fn eta(&self, n: usize, x: f64) -> f64 {
        eta_at(&self.cover, n, x)
    }

    pub fn len(&self) -> usize {
        self.cover.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.is_empty()
    }
}
