//! Criterion benchmarks for the `d2d-mimo` evaluators; see `benches/`.

use d2d_mimo::SystemParams;

/// Reference parameters at the given antenna count and density.
pub fn params(t_c: u32, lambda_d: f64) -> SystemParams {
    SystemParams { t_c, lambda_d, ..Default::default() }
}
