//! Coverage of the typical D2D receiver.
//!
//! The success probability factors into three independent pieces evaluated at
//! `s = beta * x` with `x = d^alpha_d / p_d`: the Laplace transform of the BS
//! interference (Gamma(U_c, 1) beamforming gain, BS uniformly distributed over
//! the cell disc), the Laplace transform of the PPP interference, and the
//! noise term.

use std::f64::consts::PI;

use crate::analytic::quadrature::{integrate, Tolerance};
use crate::analytic::special::{incomplete_beta, sinc_norm};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Below this value of `kappa * R^-alpha_c` the closed form degenerates to a
/// `0 * inf` form and the quadrature is used instead.
pub const SMALL_KAPPA_SWITCH: f64 = 1e-8;

/// Beta-function form above this `y`, power series below it.
const SERIES_SWITCH: f64 = 0.5;

const OVERSHOOT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dClosedFormTerms {
    /// `d^alpha_d / p_d`.
    pub x: f64,
    /// `beta * x * (a_c / a_d) * (p_c / u_c)`.
    pub kappa: f64,
    /// `1 / (kappa * R^-alpha_c + 1)`.
    pub y: f64,
}

impl D2dClosedFormTerms {
    pub fn new(params: &SystemParams, beta: f64) -> Self {
        let x = params.d2d_distance.powf(params.alpha_d) / params.p_d;
        let kappa = kappa_at(params, beta * x);
        let y = 1.0 / (edge_ratio(params, kappa) + 1.0);
        Self { x, kappa, y }
    }
}

fn kappa_at(params: &SystemParams, s: f64) -> f64 {
    s * (params.a_c / params.a_d) * (params.p_c / params.u_c as f64)
}

fn edge_ratio(params: &SystemParams, kappa: f64) -> f64 {
    kappa * params.cell_radius.powf(-params.alpha_c)
}

/// Laplace transform of the PPP aggregate interference with unit-mean
/// exponential fading, `exp(-pi lambda (s p_d)^(2/alpha) / sinc(2/alpha))`.
pub fn laplace_ppp_interference(s: f64, lambda_d: f64, alpha_d: f64, p_d: f64) -> Result<f64> {
    if !(s >= 0.0) || !(lambda_d >= 0.0) || !(p_d > 0.0) {
        return Err(Error::Domain(format!(
            "PPP Laplace transform needs s ≥ 0, lambda ≥ 0, p_d > 0 (got {s}, {lambda_d}, {p_d})"
        )));
    }
    if !(alpha_d > 2.0) {
        return Err(Error::Domain(format!("alpha_d must exceed 2, got {alpha_d}")));
    }
    let delta = 2.0 / alpha_d;
    if s == 0.0 || lambda_d == 0.0 {
        return Ok(1.0);
    }
    Ok((-PI * lambda_d * (s * p_d).powf(delta) / sinc_norm(delta)?).exp())
}

/// Laplace transform of the BS interference at `s` by direct quadrature over
/// the BS distance (density `2r/R^2` on `[0, R]`).
pub fn d2d_bs_laplace_quadrature(params: &SystemParams, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("Laplace argument must be ≥ 0, got {s}")));
    }
    let kappa = kappa_at(params, s);
    if kappa == 0.0 {
        return Ok(1.0);
    }
    let radius = params.cell_radius;
    let users = params.u_c as f64;
    let alpha = params.alpha_c;
    let r2 = radius * radius;
    let res = integrate(
        |r: f64| {
            if r == 0.0 {
                return Ok(0.0);
            }
            // (1 + kappa r^-alpha)^-U = (r^alpha / (r^alpha + kappa))^U
            let ra = r.powf(alpha);
            Ok((ra / (ra + kappa)).powf(users) * 2.0 * r / r2)
        },
        0.0,
        radius,
        Tolerance::relative(1e-9).with_abs(1e-300),
    )?;
    Ok(res.value)
}

/// Closed-form BS-interference factor
/// `kappa^(2/a)/R^2 [y^A (1-y)^(-2/a) - A B(y; A, 1 - 2/a)]`, `A = U_c + 2/a - 1`.
///
/// Uses `kappa R^-a = (1 - y)/y`, under which the leading product reduces to
/// `y^(U_c - 1)`. For `y ≤ 1/2` the bracket is summed as the positive series
/// `y^A Σ_{n≥1} (2/a)_n / (n-1)! / (A + n) y^n`, which avoids cancelling the
/// common `y^A` leading term.
pub fn bs_interference_closed_form(params: &SystemParams, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("Laplace argument must be ≥ 0, got {s}")));
    }
    let kappa = kappa_at(params, s);
    let ratio = edge_ratio(params, kappa);
    if ratio < SMALL_KAPPA_SWITCH {
        return d2d_bs_laplace_quadrature(params, s);
    }
    let delta = 2.0 / params.alpha_c;
    let users = params.u_c as f64;
    let a = users + delta - 1.0;
    let y = 1.0 / (ratio + 1.0);
    if y > SERIES_SWITCH {
        let beta_term = incomplete_beta(y, a, 1.0 - delta)?;
        Ok(y.powf(users - 1.0) - a * ratio.powf(delta) * beta_term)
    } else {
        let series = bracket_series(y, a, delta)?;
        // kappa^delta / R^2 * y^A * series = (1-y)^delta * y^(A - delta) * series
        Ok((1.0 - y).powf(delta) * y.powf(a - delta) * series)
    }
}

/// `Σ_{n≥1} (delta)_n / (n-1)! * y^n / (A + n)`.
fn bracket_series(y: f64, a: f64, delta: f64) -> Result<f64> {
    // n = 1 term: delta * y / (A + 1)
    let mut coeff = delta * y;
    let mut sum = coeff / (a + 1.0);
    for n in 1..2000 {
        let nf = n as f64;
        coeff *= (delta + nf) / nf * y;
        let term = coeff / (a + nf + 1.0);
        sum += term;
        if term <= 1e-17 * sum {
            return Ok(sum);
        }
    }
    Err(Error::NumericalFailure(format!("bracket series did not converge at y = {y}")))
}

/// The three independent factors of the D2D success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dCoverageFactors {
    pub bs_interference: f64,
    pub ppp_interference: f64,
    pub noise: f64,
}

impl D2dCoverageFactors {
    pub fn product(&self) -> f64 {
        self.bs_interference * self.ppp_interference * self.noise
    }
}

pub fn d2d_coverage_factors(params: &SystemParams, beta_d: f64) -> Result<D2dCoverageFactors> {
    params.ensure_valid()?;
    if !(beta_d >= 0.0 && beta_d.is_finite()) {
        return Err(Error::Domain(format!("D2D threshold must be ≥ 0, got {beta_d}")));
    }
    let terms = D2dClosedFormTerms::new(params, beta_d);
    let s = beta_d * terms.x;
    Ok(D2dCoverageFactors {
        bs_interference: bs_interference_closed_form(params, s)?,
        ppp_interference: laplace_ppp_interference(s, params.lambda_d, params.alpha_d, params.p_d)?,
        noise: (-s * params.normalized_noise()).exp(),
    })
}

/// Probability that the typical D2D receiver's SINR reaches `beta_d`.
pub fn d2d_coverage(params: &SystemParams, beta_d: f64) -> Result<f64> {
    let p = d2d_coverage_factors(params, beta_d)?.product();
    clamp_probability(p)
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || p < -OVERSHOOT || p > 1.0 + OVERSHOOT {
        return Err(Error::NumericalFailure(format!("coverage evaluated to {p}, outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}
