//! Per-user average rate, average sum rate, power consumption and energy
//! efficiency.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::UserType;
use crate::params::{PowerModel, SystemParams};

/// Coverage probability sampled on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    pub user_type: UserType,
    pub betas: Vec<f64>,
    pub coverage: Vec<f64>,
    /// 95% confidence half-widths for empirical curves.
    pub half_width: Option<Vec<f64>>,
}

impl CoverageCurve {
    pub fn analytic(user_type: UserType, betas: Vec<f64>, coverage: Vec<f64>) -> Result<Self> {
        Self::check(&betas, &coverage)?;
        Ok(Self { user_type, betas, coverage, half_width: None })
    }

    pub fn empirical(user_type: UserType, estimates: &[crate::montecarlo::CoverageEstimate]) -> Result<Self> {
        let betas: Vec<f64> = estimates.iter().map(|e| e.beta).collect();
        let coverage: Vec<f64> = estimates.iter().map(|e| e.p_hat).collect();
        Self::check(&betas, &coverage)?;
        let half_width = estimates.iter().map(|e| 1.96 * e.std_err).collect();
        Ok(Self { user_type, betas, coverage, half_width: Some(half_width) })
    }

    fn check(betas: &[f64], coverage: &[f64]) -> Result<()> {
        if betas.len() != coverage.len() || betas.is_empty() {
            return Err(Error::InvalidArgument("coverage curve needs equally many betas and values".into()));
        }
        if betas.windows(2).any(|w| !(w[0] < w[1])) || !(betas[0] >= 0.0) {
            return Err(Error::InvalidArgument("curve thresholds must be nonnegative and increasing".into()));
        }
        if coverage.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument("coverage values must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Step interpolation: the value at the smallest grid threshold ≥ `beta`,
    /// which never overstates coverage of a nonincreasing curve. Zero beyond
    /// the last threshold.
    pub fn at(&self, beta: f64) -> f64 {
        let i = self.betas.partition_point(|&b| b < beta);
        self.coverage.get(i).copied().unwrap_or(0.0)
    }
}

/// Grid-then-refine settings for the rate supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub beta_min_db: f64,
    pub beta_max_db: f64,
    pub grid_points: usize,
    /// Relative tolerance on beta for the golden-section refinement.
    pub rel_tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self { beta_min_db: -30.0, beta_max_db: 40.0, grid_points: 200, rel_tol: 1e-4 }
    }
}

impl SearchSettings {
    pub fn grid(&self) -> Vec<f64> {
        log_grid_db(self.beta_min_db, self.beta_max_db, self.grid_points)
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta_min_db < self.beta_max_db) || !self.beta_min_db.is_finite() || !self.beta_max_db.is_finite() {
            return Err(Error::InvalidArgument("search window must satisfy lo < hi".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::InvalidArgument("search grid needs at least 3 points".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("search tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// `n` thresholds evenly spaced in dB from `lo_db` to `hi_db` inclusive.
pub fn log_grid_db(lo_db: f64, hi_db: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![10f64.powf(lo_db / 10.0)];
    }
    (0..n)
        .map(|i| 10f64.powf((lo_db + (hi_db - lo_db) * i as f64 / (n - 1) as f64) / 10.0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateResult {
    pub beta_star: f64,
    /// bits per second
    pub rate: f64,
    pub coverage_at_star: f64,
    /// The objective was still increasing at the top of the search window.
    pub boundary_warning: bool,
}

/// Shannon-style rate at a threshold, `bandwidth * log2(1 + beta) * coverage`.
pub fn rate_objective(bandwidth: f64, beta: f64, coverage: f64) -> f64 {
    bandwidth * beta.ln_1p() / std::f64::consts::LN_2 * coverage
}

/// Maximizes `bandwidth * log2(1 + beta) * coverage(beta)` over the search
/// window: a log-spaced grid scan followed by golden-section refinement
/// around the best grid point.
pub fn average_rate<F>(mut coverage: F, bandwidth: f64, settings: &SearchSettings) -> Result<RateResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidArgument("bandwidth must be positive".into()));
    }
    settings.validate()?;
    let mut eval = |beta: f64| -> Result<(f64, f64)> {
        let p = coverage(beta)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("coverage {p} at beta={beta} is outside [0, 1]")));
        }
        Ok((rate_objective(bandwidth, beta, p), p))
    };

    let grid = settings.grid();
    let mut values = Vec::with_capacity(grid.len());
    for &b in &grid {
        values.push(eval(b)?);
    }
    let best = (0..grid.len()).fold(0, |best, i| if values[i].0 > values[best].0 { i } else { best });
    let last = grid.len() - 1;
    let boundary_warning = best == last && values[last].0 > 0.0;
    let mut result = RateResult {
        beta_star: grid[best],
        rate: values[best].0,
        coverage_at_star: values[best].1,
        boundary_warning,
    };
    if values[best].0 <= 0.0 {
        return Ok(result);
    }

    // golden section on ln(beta) over the neighbouring cells
    let mut lo = grid[best.saturating_sub(1)].ln();
    let mut hi = grid[(best + 1).min(last)].ln();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1.exp())?;
    let mut f2 = eval(x2.exp())?;
    let ln_tol = settings.rel_tol.ln_1p();
    while hi - lo > ln_tol {
        if f1.0 >= f2.0 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1.exp())?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2.exp())?;
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f.0 > result.rate {
                result.beta_star = x.exp();
                result.rate = f.0;
                result.coverage_at_star = f.1;
            }
        }
    }
    Ok(result)
}

/// `u_c * rate_cue + pi R^2 lambda_d * rate_d2d`, in bits per second.
pub fn asr(params: &SystemParams, rate_cue: f64, rate_d2d: f64) -> Result<f64> {
    if !(rate_cue >= 0.0 && rate_d2d >= 0.0) {
        return Err(Error::InvalidArgument("rates must be nonnegative".into()));
    }
    Ok(params.u_c as f64 * rate_cue + params.mean_d2d_count() * rate_d2d)
}

/// Total consumed power in watts: amplifier-scaled transmit power plus
/// load-independent, per-antenna and per-handset circuit power.
pub fn total_power(params: &SystemParams, power: &PowerModel) -> f64 {
    let n_d2d = params.lambda_d * PI * params.cell_radius * params.cell_radius;
    (params.p_c + n_d2d * params.p_d) / power.eta
        + power.c0
        + params.t_c as f64 * power.c1
        + (params.u_c as f64 + 2.0 * n_d2d) * power.c2
}

/// Bits per joule.
pub fn energy_efficiency(asr: f64, power: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(Error::Domain(format!("power must be positive, got {power}")));
    }
    Ok(asr / power)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkMetrics {
    pub asr: f64,
    pub total_power: f64,
    pub ee: f64,
    pub rate_cue: f64,
    pub rate_d2d: f64,
    pub mean_d2d_count: f64,
}

impl NetworkMetrics {
    pub fn new(params: &SystemParams, power: &PowerModel, rate_cue: f64, rate_d2d: f64) -> Result<Self> {
        let asr = asr(params, rate_cue, rate_d2d)?;
        let total_power = total_power(params, power);
        let ee = energy_efficiency(asr, total_power)?;
        Ok(Self { asr, total_power, ee, rate_cue, rate_d2d, mean_d2d_count: params.mean_d2d_count() })
    }
}
