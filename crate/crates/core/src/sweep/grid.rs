use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Which evaluation paths a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    #[serde(alias = "montecarlo")]
    Mc,
    Both,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "mc" | "montecarlo" => Ok(Mode::Mc),
            "both" => Ok(Mode::Both),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}` (analytic|mc|both)"))),
        }
    }
}

/// Antenna counts and D2D densities to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub tc_values: Vec<u32>,
    pub lambda_values: Vec<f64>,
    pub mode: Mode,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            tc_values: (4..=100).collect(),
            lambda_values: log_spaced(1e-8, 1e-3, 40),
            mode: Mode::Analytic,
        }
    }
}

impl SweepGrid {
    /// Grid points in output order: antenna count outer, density inner.
    pub fn points(&self) -> Vec<(u32, f64)> {
        self.tc_values
            .iter()
            .flat_map(|&tc| self.lambda_values.iter().map(move |&l| (tc, l)))
            .collect()
    }

    pub fn validate(&self, base: &SystemParams) -> Result<()> {
        if self.tc_values.is_empty() || self.lambda_values.is_empty() {
            return Err(Error::InvalidArgument("sweep grid lists must be nonempty".into()));
        }
        if self.tc_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("t_c values must be strictly ascending".into()));
        }
        if self.lambda_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("lambda_d values must be strictly ascending".into()));
        }
        for &(tc, l) in [
            (self.tc_values[0], self.lambda_values[0]),
            (*self.tc_values.last().unwrap(), *self.lambda_values.last().unwrap()),
        ]
        .iter()
        {
            base.with_tc(tc).with_lambda(l).ensure_valid()?;
        }
        Ok(())
    }
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse `{s}` as {what}")))
}

/// Parses `4`, `4,8,70` or the inclusive range `start:stop:step`.
pub fn parse_tc_grid(spec: &str) -> Result<Vec<u32>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(|s| num(s, "antenna count")).collect(),
        [start, stop, step] => {
            let (start, stop, step): (u32, u32, u32) =
                (num(start, "antenna count")?, num(stop, "antenna count")?, num(step, "step")?);
            if step == 0 || stop < start {
                return Err(Error::InvalidArgument(format!("bad range `{spec}`: need step > 0 and start ≤ stop")));
            }
            Ok((start..=stop).step_by(step as usize).collect())
        }
        _ => Err(Error::InvalidArgument(format!("bad antenna grid `{spec}` (use N, a,b,c or start:stop:step)"))),
    }
}

/// Parses `1e-6`, `0,1e-6,1e-4`, `lo:hi:Nlog` (log-spaced count) or
/// `lo:hi:N` (linearly spaced count).
pub fn parse_lambda_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(|s| num(s, "density")).collect(),
        [lo, hi, count] => {
            let (lo, hi): (f64, f64) = (num(lo, "density")?, num(hi, "density")?);
            let (count, log) = match count.trim().strip_suffix("log") {
                Some(c) => (num::<usize>(c, "point count")?, true),
                None => (num::<usize>(count, "point count")?, false),
            };
            if count == 0 || !(lo <= hi) {
                return Err(Error::InvalidArgument(format!("bad range `{spec}`: need count ≥ 1 and lo ≤ hi")));
            }
            if log {
                if !(lo > 0.0) {
                    return Err(Error::InvalidArgument("log-spaced densities need lo > 0".into()));
                }
                Ok(log_spaced(lo, hi, count))
            } else if count == 1 {
                Ok(vec![lo])
            } else {
                Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
            }
        }
        _ => Err(Error::InvalidArgument(format!("bad density grid `{spec}` (use x, a,b,c or lo:hi:Nlog)"))),
    }
}

/// Parses `LO:HI:N` in dB into `N` thresholds (linear) evenly spaced in dB.
pub fn parse_beta_db(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(Error::InvalidArgument(format!("bad beta grid `{spec}` (use LO:HI:N in dB)")));
    };
    let (lo, hi, n): (f64, f64, usize) = (num(lo, "dB value")?, num(hi, "dB value")?, num(n, "point count")?);
    if n == 0 || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad beta grid `{spec}`")));
    }
    Ok(crate::metrics::log_grid_db(lo, hi, n))
}
