//! Monte Carlo simulator of the single-cell D2D underlay.
//!
//! Every trial draws from its own ChaCha stream keyed by the master seed, so
//! batches are bit-identical no matter how trials are split across threads.

mod empirical;
mod ppp;
mod rng;
mod sim;
mod zf;

use serde::{Deserialize, Serialize};

pub use empirical::{empirical_coverage, EmpiricalCcdf};
pub use ppp::sample_ppp;
pub use rng::{substream, StreamDomain};
pub use sim::{simulate, simulate_cue_sinr, simulate_d2d_sinr};
pub use zf::{zf_oracle_gains, ZfGainSample};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserType {
    D2d,
    Cellular,
}

impl std::fmt::Display for UserType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UserType::D2d => "d2d",
            UserType::Cellular => "cellular",
        })
    }
}

/// Where the BS sits relative to the typical D2D receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BsPlacement {
    /// Distance with density `2r/R^2` on `[0, R]`.
    UniformDisc,
    /// Fixed distance in meters.
    Fixed { distance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub trials: u64,
    pub master_seed: u64,
    /// Radius of the simulated PPP disc as a multiple of the cell radius.
    pub window_factor: f64,
    /// Trials per parallel work unit.
    pub chunk_size: u64,
    pub bs_placement: BsPlacement,
    /// Add the expected interference of the PPP beyond the window,
    /// `2 pi lambda p_d W^(2-alpha_d) / (alpha_d - 2)`, to every trial.
    pub far_field_mean: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            master_seed: 42,
            window_factor: 5.0,
            chunk_size: 4096,
            bs_placement: BsPlacement::UniformDisc,
            far_field_mean: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
        }
        if !(self.window_factor >= 1.0 && self.window_factor.is_finite()) {
            return Err(Error::InvalidArgument("window_factor must be ≥ 1".into()));
        }
        if self.chunk_size < 1 {
            return Err(Error::InvalidArgument("chunk_size must be ≥ 1".into()));
        }
        if let BsPlacement::Fixed { distance } = self.bs_placement {
            if !(distance > 0.0 && distance.is_finite()) {
                return Err(Error::InvalidArgument("fixed BS distance must be positive".into()));
            }
        }
        Ok(())
    }
}

/// SINR realizations of one user type under fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrBatch {
    pub user_type: UserType,
    pub sinr_values: Vec<f64>,
    /// Digest of the parameters and simulation settings that produced the batch.
    pub params_fingerprint: u64,
}

/// Empirical coverage at one threshold with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    pub beta: f64,
    pub p_hat: f64,
    pub std_err: f64,
}

impl CoverageEstimate {
    pub fn from_counts(beta: f64, hits: usize, n: usize) -> Self {
        let p_hat = hits as f64 / n as f64;
        let std_err = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
        Self { beta, p_hat, std_err }
    }
}
