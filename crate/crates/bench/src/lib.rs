//! Benchmark-only crate; see `benches/kernels.rs`.
//!
//! Shared fixtures for the benchmarks live here so the bench target stays a
//! thin harness.

use laguerre_hardy::measure::Alpha;
use laguerre_hardy::quadrature::Grid;
use laguerre_hardy::transforms::GridFunction;

/// A smooth compactly supported test function on the standard grid.
pub fn bump_fixture(alpha: f64, x_max: f64) -> GridFunction {
    let alpha = Alpha::new(alpha).unwrap();
    let grid = Grid::standard(alpha, x_max).unwrap();
    GridFunction::from_fn(grid, |x| (-(x - 1.2) * (x - 1.2) / 0.3).exp())
}
