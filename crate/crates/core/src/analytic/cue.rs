//! Coverage of the typical cellular user under ZF precoding.
//!
//! Given the BS distance `D`, the ZF gain is Gamma(T_c - U_c + 1, 1), so the
//! conditional success probability is a finite Gamma-tail series in
//! `s (I + n)` with `s = beta a_d D^alpha_c / zeta`. Averaging over the PPP
//! interference `I` turns powers of `I` into derivatives of its Laplace
//! transform `exp(-c s^b)`:
//!
//! ```text
//! e^{-s n} Σ_{k=0}^{M} s^k/k! Σ_{i=0}^{k} C(k,i) n^{k-i} (-1)^i d^i/ds^i e^{-c s^b}
//! ```
//!
//! The outer expectation over `D` (density `2D/R^2` on `[0, R]`) is done by
//! adaptive quadrature. `s` reaches ~1e9 at the cell edge, so the sum is
//! assembled from logarithms of its terms.
//!
//! Writing `u = c s^b`, the scaled derivative `(-s)^i L^(i)(s) / (L(s) i!)`
//! is a polynomial in `u` with nonnegative coefficients. The series is thus a
//! sum of positive terms and cannot cancel. The polynomials are evaluated by
//! Horner's rule while their coefficients fit in an f64; otherwise every
//! coefficient is carried as a signed logarithm.

use std::f64::consts::PI;

use crate::analytic::d2d::clamp_probability;
use crate::analytic::derivatives::DerivativeTable;
use crate::analytic::quadrature::{integrate, Tolerance};
use crate::analytic::special::sinc_norm;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Relative tolerance of the outer expectation over the BS distance.
pub const CUE_QUADRATURE_RTOL: f64 = 1e-7;

/// A series whose magnitude falls below this fraction of its largest term is
/// considered to have lost all significant digits.
pub const CANCELLATION_FLOOR: f64 = 1e-12;

/// Coefficients outside `exp(±LINEAR_LIMIT)` force the log-domain path.
const LINEAR_LIMIT: f64 = 600.0;

/// Precomputed state for evaluating the cellular coverage at many thresholds
/// under one parameter set.
#[derive(Debug, Clone)]
pub struct CueCoverage {
    params: SystemParams,
    /// Derivative table of `exp(-u)` in `s` for `c = 1`; `a[i][k]` scales as `c^k`.
    table: DerivativeTable,
    /// `|a[i][k]| / i!` as plain floats, when all of them are representable.
    poly: Option<Vec<Vec<f64>>>,
    /// `c` of the PPP Laplace transform `exp(-c s^b)`.
    ppp_c: f64,
    ln_factorial: Vec<f64>,
    order: usize,
}

/// Reusable buffers for [`CueCoverage::conditional`].
#[derive(Debug, Clone, Default)]
pub struct CueScratch {
    ln_t: Vec<f64>,
    ln_e: Vec<f64>,
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

impl CueCoverage {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.ensure_valid()?;
        let order = (params.t_c - params.u_c) as usize;
        let b = 2.0 / params.alpha_d;
        let ppp_c = PI * params.lambda_d * params.p_d.powf(b) / sinc_norm(b)?;
        let table = DerivativeTable::new(1.0, b, order)?;
        let mut ln_factorial = Vec::with_capacity(order + 1);
        let mut acc = 0.0;
        for k in 0..=order {
            if k > 0 {
                acc += (k as f64).ln();
            }
            ln_factorial.push(acc);
        }
        let fits = (0..=order).all(|i| {
            (0..=i).all(|k| {
                let a = table.log_coeff(i, k);
                a.is_zero() || (a.ln_abs - ln_factorial[i]).abs() < LINEAR_LIMIT
            })
        });
        let poly = fits.then(|| {
            (0..=order)
                .map(|i| {
                    (0..=i)
                        .map(|k| {
                            let a = table.log_coeff(i, k);
                            if a.is_zero() {
                                0.0
                            } else {
                                (a.ln_abs - ln_factorial[i]).exp()
                            }
                        })
                        .collect()
                })
                .collect()
        });
        Ok(Self { params: params.clone(), table, poly, ppp_c, ln_factorial, order })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// `s = beta * a_d * D^alpha_c / zeta`.
    pub fn laplace_argument(&self, beta: f64, distance: f64) -> f64 {
        beta / self.params.zeta() * self.params.a_d * distance.powf(self.params.alpha_c)
    }

    /// `ln[(-s)^i L^(i)(s) / (L(s) i!)]` for `i = 0..=order` by Horner's rule.
    fn scaled_derivatives_linear(poly: &[Vec<f64>], u: f64, out: &mut Vec<f64>) {
        out.clear();
        if u <= 1.0 {
            for row in poly {
                let v = row.iter().rev().fold(0.0, |acc, &p| acc * u + p);
                out.push(v.ln());
            }
        } else {
            let (v, ln_u) = (1.0 / u, u.ln());
            for (i, row) in poly.iter().enumerate() {
                let w = row.iter().fold(0.0, |acc, &p| acc * v + p);
                out.push(w.ln() + i as f64 * ln_u);
            }
        }
    }

    /// Same as [`Self::scaled_derivatives_linear`] with every coefficient in
    /// log form, checking each order for cancellation.
    fn scaled_derivatives_log(&self, u: f64, s: f64, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        // a[i][k] for c = 1 times u^k equals the c-table entry times s^(k b)
        let ln_u = u.ln();
        for i in 0..=self.order {
            let mut shift = f64::NEG_INFINITY;
            for k in 0..=i {
                let a = self.table.log_coeff(i, k);
                if !a.is_zero() {
                    shift = shift.max(a.ln_abs + k as f64 * ln_u);
                }
            }
            if shift == f64::NEG_INFINITY {
                out.push(f64::NEG_INFINITY);
                continue;
            }
            let mut signed = 0.0;
            for k in 0..=i {
                let a = self.table.log_coeff(i, k);
                if !a.is_zero() {
                    signed += a.sign * (a.ln_abs + k as f64 * ln_u - shift).exp();
                }
            }
            if signed.abs() < CANCELLATION_FLOOR {
                return Err(Error::NumericalFailure(format!(
                    "derivative order {i} cancelled at s = {s:.3e}; use the Monte Carlo path"
                )));
            }
            // (-1)^i restores a positive term
            let sign = if i % 2 == 0 { signed.signum() } else { -signed.signum() };
            if sign < 0.0 {
                return Err(Error::NumericalFailure(format!("negative series term at order {i}, s = {s:.3e}")));
            }
            out.push(signed.abs().ln() + shift - self.ln_factorial[i]);
        }
        Ok(())
    }

    /// Success probability conditioned on the Laplace argument `s`.
    pub fn conditional(&self, s: f64, scratch: &mut CueScratch) -> Result<f64> {
        self.conditional_with(s, scratch, false)
    }

    fn conditional_with(&self, s: f64, scratch: &mut CueScratch, force_log: bool) -> Result<f64> {
        if s == 0.0 {
            return Ok(1.0);
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("Laplace argument must be ≥ 0, got {s}")));
        }
        let sn = s * self.params.normalized_noise();
        let u = self.ppp_c * s.powf(self.table.b());

        let CueScratch { ln_t, ln_e } = scratch;
        if u == 0.0 {
            // no interferers: only the zeroth order survives
            ln_t.clear();
            ln_t.push(0.0);
            ln_t.resize(self.order + 1, f64::NEG_INFINITY);
        } else {
            match &self.poly {
                Some(poly) if !force_log => Self::scaled_derivatives_linear(poly, u, ln_t),
                _ => self.scaled_derivatives_log(u, s, ln_t)?,
            }
        }

        // ln of the partial exponential sums Σ_{m ≤ j} (s n)^m / m!
        let ln_sn = sn.ln();
        ln_e.clear();
        ln_e.push(0.0);
        let mut ln_term = 0.0;
        for m in 1..=self.order {
            ln_term += ln_sn - (m as f64).ln();
            let prev = ln_e[m - 1];
            ln_e.push(ln_add_exp(prev, ln_term));
        }

        let shift = (0..=self.order)
            .map(|i| ln_t[i] + ln_e[self.order - i])
            .fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::NumericalFailure(format!("cellular coverage series not finite at s = {s:.3e}")));
        }
        let sum: f64 = (0..=self.order)
            .map(|i| (ln_t[i] + ln_e[self.order - i] - shift).exp())
            .sum();
        Ok((sum.ln() + shift - sn - u).exp())
    }

    /// Success probability at threshold `beta_c`.
    pub fn at(&self, beta_c: f64) -> Result<f64> {
        if !(beta_c >= 0.0 && beta_c.is_finite()) {
            return Err(Error::Domain(format!("cellular threshold must be ≥ 0, got {beta_c}")));
        }
        if beta_c == 0.0 {
            return Ok(1.0);
        }
        if self.params.p_c == 0.0 {
            // no useful signal
            return Ok(0.0);
        }
        let radius = self.params.cell_radius;
        let r2 = radius * radius;
        let mut scratch = CueScratch::default();
        let res = integrate(
            |d: f64| {
                let s = self.laplace_argument(beta_c, d);
                Ok(self.conditional(s, &mut scratch)? * 2.0 * d / r2)
            },
            0.0,
            radius,
            Tolerance::relative(CUE_QUADRATURE_RTOL).with_abs(1e-15),
        )?;
        clamp_probability(res.value)
    }
}

/// Probability that the typical cellular user's SINR reaches `beta_c`.
pub fn cue_coverage(params: &SystemParams, beta_c: f64) -> Result<f64> {
    CueCoverage::new(params)?.at(beta_c)
}
