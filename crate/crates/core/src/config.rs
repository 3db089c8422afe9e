//! Run configuration: one JSON document drives the CLI and the verification
//! suites. Environment variables override nothing.

use crate::error::{Error, Result};
use crate::measure::Alpha;
use crate::quadrature::PvConfig;
use crate::transforms::TransformCtx;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Values of α the run sweeps over.
    pub alphas: Vec<f64>,
    /// Relative tolerance of the kernel t-integrals.
    pub kernel_tol: f64,
    /// Absolute tolerance of the function-level quadratures.
    pub quad_tol: f64,
    /// Principal-value excision/extrapolation parameters.
    pub pv: PvConfig,
    /// Right edge of the working grids.
    pub x_max: f64,
    /// Spectral truncation.
    pub kmax: usize,
    /// Maximal-function t-grid: count, t_min, t_max.
    pub t_grid: TGrid,
    /// Sweep sizes of the verification suites.
    pub sweeps: Sweeps,
    /// Seed of the deterministic atom generator.
    pub seed: u64,
    /// Dyadic depth of the decomposition cascade.
    pub haar_depth: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TGrid {
    pub count: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid {
            count: 60,
            t_min: 1e-4,
            t_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweeps {
    /// Number of y-samples of the remainder-integrability sweep.
    pub remainder_y_count: usize,
    /// y-range of that sweep.
    pub remainder_y_lo: f64,
    pub remainder_y_hi: f64,
    /// Number of y₀ samples of the kernel-difference sweep.
    pub localization_count: usize,
    pub localization_lo: f64,
    pub localization_hi: f64,
    /// Atoms per α in the forward-direction sweep.
    pub atom_count: usize,
    pub atom_center_lo: f64,
    pub atom_center_hi: f64,
    /// Cases in the telescoping sweep.
    pub telescope_cases: usize,
    /// Functions in the decomposition battery.
    pub battery_size: usize,
}

impl Default for Sweeps {
    fn default() -> Self {
        Sweeps {
            remainder_y_count: 50,
            remainder_y_lo: 0.02,
            remainder_y_hi: 50.0,
            localization_count: 20,
            localization_lo: 0.05,
            localization_hi: 20.0,
            atom_count: 100,
            atom_center_lo: 0.02,
            atom_center_hi: 20.0,
            telescope_cases: 100,
            battery_size: 20,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alphas: vec![1.0],
            kernel_tol: 1e-9,
            quad_tol: 1e-7,
            pv: PvConfig {
                quad_tol: 1e-9,
                ..PvConfig::default()
            },
            x_max: 30.0,
            kmax: 120,
            t_grid: TGrid::default(),
            sweeps: Sweeps::default(),
            seed: 7,
            haar_depth: 4,
        }
    }
}

impl RunConfig {
    /// Parses and schema-validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::InvalidInput(
                "config: alphas must be nonempty".into(),
            ));
        }
        for &a in &self.alphas {
            Alpha::new(a)?;
        }
        let positive = [
            ("kernel_tol", self.kernel_tol),
            ("quad_tol", self.quad_tol),
            ("x_max", self.x_max),
            ("t_grid.t_min", self.t_grid.t_min),
            ("t_grid.t_max", self.t_grid.t_max),
            ("sweeps.remainder_y_lo", self.sweeps.remainder_y_lo),
            ("sweeps.localization_lo", self.sweeps.localization_lo),
            ("sweeps.atom_center_lo", self.sweeps.atom_center_lo),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "config: {name} must be positive"
                )));
            }
        }
        if self.kmax == 0 || self.kmax > 200 {
            return Err(Error::InvalidInput(
                "config: kmax must be in 1..=200".into(),
            ));
        }
        if self.t_grid.count == 0 || self.haar_depth == 0 || self.haar_depth > 10 {
            return Err(Error::InvalidInput(
                "config: grid counts out of range".into(),
            ));
        }
        Ok(())
    }

    /// Log-spaced maximal-function t-grid.
    pub fn maximal_t_grid(&self) -> Vec<f64> {
        let TGrid {
            count,
            t_min,
            t_max,
        } = self.t_grid;
        (0..count)
            .map(|i| t_min * (t_max / t_min).powf(i as f64 / (count.max(2) - 1) as f64))
            .collect()
    }

    /// Builds the kernel-operator context for one α.
    pub fn ctx(&self, alpha: f64) -> Result<TransformCtx> {
        let alpha = Alpha::new(alpha)?;
        let mut pv = self.pv;
        if pv.quad_tol <= 0.0 {
            pv.quad_tol = self.quad_tol;
        }
        TransformCtx::new(alpha, self.kernel_tol, self.quad_tol, pv)
    }
}
