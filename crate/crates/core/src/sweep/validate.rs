use std::io::Write;

use serde::Serialize;

use super::LoadedConfig;
use crate::analytic::{d2d_coverage, CueCoverage};
use crate::error::{Error, Result};
use crate::montecarlo::{empirical_coverage, simulate, SimConfig, UserType};

/// Absolute agreement floor; the tolerance is `max(3 * std_err, FLOOR)`.
pub const AGREEMENT_FLOOR: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    /// Thresholds, linear and ascending.
    pub betas: Vec<f64>,
    /// Overrides the configured trial count when set.
    pub trials: Option<u64>,
    /// Added to every analytic value. Only for exercising the detector.
    pub analytic_offset: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { betas: crate::metrics::log_grid_db(-10.0, 20.0, 13), trials: None, analytic_offset: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub user_type: UserType,
    pub beta: f64,
    /// `None` when the closed form failed numerically.
    pub analytic: Option<f64>,
    pub empirical: f64,
    pub std_err: f64,
    pub pass: bool,
    pub error: Option<String>,
}

impl ValidationRow {
    pub fn tolerance(&self) -> f64 {
        (3.0 * self.std_err).max(AGREEMENT_FLOOR)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["user_type", "beta_db", "beta", "analytic", "empirical", "std_err", "tolerance", "pass"])?;
        for r in &self.rows {
            w.write_record([
                r.user_type.to_string(),
                format!("{:e}", 10.0 * r.beta.log10()),
                format!("{:e}", r.beta),
                r.analytic.map(|a| format!("{a:e}")).unwrap_or_else(|| "failed".into()),
                format!("{:e}", r.empirical),
                format!("{:e}", r.std_err),
                format!("{:e}", r.tolerance()),
                (if r.pass { "pass" } else { "fail" }).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Compares closed-form coverage against simulation at the configured
/// parameters, for both user types.
pub fn validate_command(config: &LoadedConfig, options: &ValidateOptions) -> Result<ValidationReport> {
    let params = &config.params;
    params.ensure_valid()?;
    if options.betas.is_empty() || options.betas.windows(2).any(|w| !(w[0] < w[1])) || !(options.betas[0] > 0.0) {
        return Err(Error::InvalidArgument("validation thresholds must be positive and ascending".into()));
    }
    let sim = SimConfig { trials: options.trials.unwrap_or(config.sim.trials), ..config.sim.clone() };
    let cue = CueCoverage::new(params)?;
    let mut rows = Vec::new();
    for user_type in [UserType::D2d, UserType::Cellular] {
        let batch = simulate(params, &sim, user_type)?;
        for est in empirical_coverage(&batch, &options.betas)? {
            let analytic = match user_type {
                UserType::D2d => d2d_coverage(params, est.beta),
                UserType::Cellular => cue.at(est.beta),
            };
            let mut row = ValidationRow {
                user_type,
                beta: est.beta,
                analytic: None,
                empirical: est.p_hat,
                std_err: est.std_err,
                pass: false,
                error: None,
            };
            match analytic {
                Ok(a) => {
                    let a = a + options.analytic_offset;
                    row.pass = (a - est.p_hat).abs() <= row.tolerance();
                    row.analytic = Some(a);
                }
                Err(e) if e.is_numerical() => row.error = Some(e.to_string()),
                Err(e) => return Err(e),
            }
            rows.push(row);
        }
    }
    Ok(ValidationReport { rows })
}
