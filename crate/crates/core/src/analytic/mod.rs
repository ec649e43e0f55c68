//! Closed-form coverage probabilities and the numerics behind them.

pub mod cue;
pub mod d2d;
pub mod derivatives;
pub mod logspace;
pub mod quadrature;
pub mod special;

pub use cue::{cue_coverage, CueCoverage, CueScratch};
pub use d2d::{
    bs_interference_closed_form, d2d_bs_laplace_quadrature, d2d_coverage, d2d_coverage_factors,
    laplace_ppp_interference, D2dClosedFormTerms, D2dCoverageFactors,
};
pub use derivatives::{exp_power_derivatives, DerivativeTable};
pub use special::{incomplete_beta, sinc_norm};
