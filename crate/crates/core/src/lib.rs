//! Coverage probability, average sum rate and energy efficiency of a
//! single-cell massive-MIMO downlink with an underlaid Poisson field of
//! device-to-device pairs.
//!
//! * [`params`] and [`units`] hold the scenario constants.
//! * [`analytic`] evaluates the closed-form coverage probabilities.
//! * [`montecarlo`] simulates the same model and serves as their oracle.
//! * [`metrics`] turns coverage curves into rates, sum rate, power and EE.
//! * [`sweep`] runs parameter grids and writes CSV/JSON results.

pub mod analytic;
pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod params;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use params::{PowerModel, SystemParams, Violation};
