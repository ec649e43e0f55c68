//! Parameter sweeps over antenna count and D2D density, CSV/JSON output and
//! the analytic-versus-simulation validation report.

mod config;
mod grid;
mod output;
mod validate;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{load_config, parse_config, LoadedConfig};
pub use grid::{log_spaced, parse_beta_db, parse_lambda_grid, parse_tc_grid, Mode, SweepGrid};
pub use output::{emit_csv, emit_json, write_csv, RunMeta, Units, CSV_HEADER};
pub use validate::{validate_command, ValidateOptions, ValidationReport, ValidationRow};

use crate::analytic::{d2d_coverage, CueCoverage};
use crate::error::{Error, Result};
use crate::metrics::{average_rate, NetworkMetrics, RateResult, SearchSettings};
use crate::montecarlo::{simulate_cue_sinr, simulate_d2d_sinr, EmpiricalCcdf, SimConfig};
use crate::params::{PowerModel, SystemParams};

/// How a row's numbers were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowMode {
    #[serde(rename = "analytic")]
    Analytic,
    #[serde(rename = "mc")]
    Mc,
    /// Analytic evaluation failed and the simulator stood in.
    #[serde(rename = "mc-fallback")]
    McFallback,
}

impl RowMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowMode::Analytic => "analytic",
            RowMode::Mc => "mc",
            RowMode::McFallback => "mc-fallback",
        }
    }
}

/// Results at one grid point for one evaluation path. Metric fields are NaN
/// when `failure` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub tc: u32,
    pub lambda_d: f64,
    pub mode: RowMode,
    pub beta_star_d2d: f64,
    pub beta_star_cue: f64,
    pub rate_d2d: f64,
    pub rate_cue: f64,
    pub asr: f64,
    pub total_power: f64,
    pub ee: f64,
    pub asr_stderr: Option<f64>,
    pub ee_stderr: Option<f64>,
    /// Either rate search hit the top of its window.
    pub boundary_warning: bool,
    pub failure: Option<String>,
}

impl SweepRow {
    fn failed(tc: u32, lambda_d: f64, mode: RowMode, reason: String) -> Self {
        Self {
            tc,
            lambda_d,
            mode,
            beta_star_d2d: f64::NAN,
            beta_star_cue: f64::NAN,
            rate_d2d: f64::NAN,
            rate_cue: f64::NAN,
            asr: f64::NAN,
            total_power: f64::NAN,
            ee: f64::NAN,
            asr_stderr: None,
            ee_stderr: None,
            boundary_warning: false,
            failure: Some(reason),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// Rate-search results of both user types at one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub d2d: RateResult,
    pub cue: RateResult,
    /// Binomial standard errors of the two rates (simulation only).
    pub d2d_stderr: Option<f64>,
    pub cue_stderr: Option<f64>,
}

/// Rates from the closed-form coverage probabilities.
pub fn analytic_rates(params: &SystemParams, search: &SearchSettings) -> Result<RatePair> {
    params.ensure_valid()?;
    let d2d = average_rate(|b| d2d_coverage(params, b), params.bandwidth, search)?;
    let cov = CueCoverage::new(params)?;
    let cue = average_rate(|b| cov.at(b), params.bandwidth, search)?;
    Ok(RatePair { d2d, cue, d2d_stderr: None, cue_stderr: None })
}

/// Rates from empirical coverage curves.
pub fn mc_rates(params: &SystemParams, sim: &SimConfig, search: &SearchSettings) -> Result<RatePair> {
    let rate = |values: &[f64]| -> Result<(RateResult, f64)> {
        let ccdf = EmpiricalCcdf::new(values)?;
        let r = average_rate(|b| Ok(ccdf.coverage(b)), params.bandwidth, search)?;
        let p = r.coverage_at_star;
        let se = params.bandwidth * r.beta_star.ln_1p() / std::f64::consts::LN_2 * (p * (1.0 - p) / ccdf.len() as f64).sqrt();
        Ok((r, se))
    };
    let (d2d, d2d_se) = rate(&simulate_d2d_sinr(params, sim)?.sinr_values)?;
    let (cue, cue_se) = rate(&simulate_cue_sinr(params, sim)?.sinr_values)?;
    Ok(RatePair { d2d, cue, d2d_stderr: Some(d2d_se), cue_stderr: Some(cue_se) })
}

/// Assembles a row; standard errors propagate through the sum rate assuming
/// independent D2D and cellular batches.
pub fn build_row(params: &SystemParams, power: &PowerModel, mode: RowMode, rates: &RatePair) -> Result<SweepRow> {
    let m = NetworkMetrics::new(params, power, rates.cue.rate, rates.d2d.rate)?;
    let asr_stderr = match (rates.cue_stderr, rates.d2d_stderr) {
        (Some(c), Some(d)) => Some((params.u_c as f64 * c).hypot(m.mean_d2d_count * d)),
        _ => None,
    };
    Ok(SweepRow {
        tc: params.t_c,
        lambda_d: params.lambda_d,
        mode,
        beta_star_d2d: rates.d2d.beta_star,
        beta_star_cue: rates.cue.beta_star,
        rate_d2d: m.rate_d2d,
        rate_cue: m.rate_cue,
        asr: m.asr,
        total_power: m.total_power,
        ee: m.ee,
        asr_stderr,
        ee_stderr: asr_stderr.map(|s| s / m.total_power),
        boundary_warning: rates.d2d.boundary_warning || rates.cue.boundary_warning,
        failure: None,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Replace analytic rows that fail numerically with simulated ones.
    pub fallback_mc: bool,
    /// Test hook: treat every analytic evaluation as a numerical failure.
    #[doc(hidden)]
    pub inject_analytic_failure: bool,
}

/// Evaluates every grid point in parallel; rows come back in grid order with
/// analytic before simulated rows at each point. `progress` sees each row as
/// it completes, in completion order.
pub fn run_sweep<P>(config: &LoadedConfig, options: SweepOptions, progress: P) -> Result<Vec<SweepRow>>
where
    P: Fn(&SweepRow) + Sync,
{
    config.validate()?;
    let modes: &[RowMode] = match config.grid.mode {
        Mode::Analytic => &[RowMode::Analytic],
        Mode::Mc => &[RowMode::Mc],
        Mode::Both => &[RowMode::Analytic, RowMode::Mc],
    };
    let jobs: Vec<(u32, f64, RowMode)> = config
        .grid
        .points()
        .into_iter()
        .flat_map(|(tc, l)| modes.iter().map(move |&m| (tc, l, m)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(tc, lambda, mode)| {
            let row = sweep_point(config, tc, lambda, mode, options);
            progress(&row);
            row
        })
        .collect();
    Ok(rows)
}

fn sweep_point(config: &LoadedConfig, tc: u32, lambda: f64, mode: RowMode, options: SweepOptions) -> SweepRow {
    let params = config.params.with_tc(tc).with_lambda(lambda);
    let simulate = |mode| {
        mc_rates(&params, &config.sim, &config.search).and_then(|r| build_row(&params, &config.power, mode, &r))
    };
    let result = match mode {
        RowMode::Analytic => {
            let analytic = if options.inject_analytic_failure {
                Err(Error::NumericalFailure("injected analytic failure".into()))
            } else {
                analytic_rates(&params, &config.search).and_then(|r| build_row(&params, &config.power, mode, &r))
            };
            match analytic {
                Err(e) if e.is_numerical() && options.fallback_mc => simulate(RowMode::McFallback),
                other => other,
            }
        }
        _ => simulate(mode),
    };
    result.unwrap_or_else(|e| SweepRow::failed(tc, lambda, mode, e.to_string()))
}

/// Convenience for callers that need a hard error on the first failed row.
pub fn first_failure(rows: &[SweepRow]) -> Option<Error> {
    rows.iter().find_map(|r| {
        r.failure
            .as_ref()
            .map(|f| Error::NumericalFailure(format!("t_c={} lambda_d={:e}: {f}", r.tc, r.lambda_d)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(tc: Vec<u32>, lambda: Vec<f64>, mode: Mode, trials: u64) -> LoadedConfig {
        LoadedConfig {
            grid: SweepGrid { tc_values: tc, lambda_values: lambda, mode },
            sim: SimConfig { trials, ..Default::default() },
            search: SearchSettings { grid_points: 40, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn single_point_matches_direct_calls() {
        let c = config(vec![8], vec![1e-5], Mode::Analytic, 10);
        let rows = run_sweep(&c, SweepOptions::default(), |_| {}).unwrap();
        assert_eq!(rows.len(), 1);
        let p = c.params.with_tc(8).with_lambda(1e-5);
        let rates = analytic_rates(&p, &c.search).unwrap();
        let m = NetworkMetrics::new(&p, &c.power, rates.cue.rate, rates.d2d.rate).unwrap();
        let r = &rows[0];
        assert_eq!((r.asr, r.ee, r.total_power), (m.asr, m.ee, m.total_power));
        assert_eq!(r.beta_star_cue, rates.cue.beta_star);
        assert_eq!(r.asr_stderr, None);
        assert_eq!(r.mode, RowMode::Analytic);
    }

    #[test]
    fn zero_density_row() {
        let c = config(vec![4], vec![0.0], Mode::Analytic, 10);
        let r = &run_sweep(&c, SweepOptions::default(), |_| {}).unwrap()[0];
        assert_eq!(r.asr, 4.0 * r.rate_cue);
        let direct = analytic_rates(&c.params.with_lambda(0.0), &c.search).unwrap();
        assert_eq!(r.rate_cue, direct.cue.rate);
    }

    #[test]
    fn order_and_modes() {
        let c = config(vec![4, 6], vec![1e-6, 1e-5], Mode::Both, 2000);
        let count = std::sync::atomic::AtomicUsize::new(0);
        let rows = run_sweep(&c, SweepOptions::default(), |_| {
            count.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        })
        .unwrap();
        assert_eq!(count.into_inner(), 8);
        let keys: Vec<_> = rows.iter().map(|r| (r.tc, r.lambda_d, r.mode)).collect();
        assert_eq!(keys[0], (4, 1e-6, RowMode::Analytic));
        assert_eq!(keys[1], (4, 1e-6, RowMode::Mc));
        assert_eq!(keys[7], (6, 1e-5, RowMode::Mc));
        for r in &rows {
            assert!(!r.is_failed());
            assert_eq!(r.asr, 4.0 * r.rate_cue + std::f64::consts::PI * 250_000.0 * r.lambda_d * r.rate_d2d);
            assert_eq!(r.asr_stderr.is_some(), r.mode == RowMode::Mc);
        }
    }

    #[test]
    fn numerical_failure_falls_back() {
        let c = config(vec![4], vec![1e-6], Mode::Analytic, 2000);
        let inject = SweepOptions { inject_analytic_failure: true, ..Default::default() };
        let failed = run_sweep(&c, inject, |_| {}).unwrap();
        assert!(failed[0].is_failed() && failed[0].mode == RowMode::Analytic);
        assert!(failed[0].failure.as_ref().unwrap().contains("injected"));
        let rows = run_sweep(&c, SweepOptions { fallback_mc: true, ..inject }, |_| {}).unwrap();
        assert_eq!(rows[0].mode, RowMode::McFallback);
        assert!(!rows[0].is_failed() && rows[0].asr_stderr.is_some());
    }

    #[test]
    fn failure_marks_row() {
        let rows = vec![SweepRow::failed(4, 1e-6, RowMode::Analytic, "x".into())];
        assert!(rows[0].asr.is_nan());
        assert!(first_failure(&rows).unwrap().is_numerical());
    }
}
