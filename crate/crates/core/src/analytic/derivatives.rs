//! Higher derivatives of `exp(-c * s^b)` for `0 < b < 1`.
//!
//! The n-th derivative is `exp(-c s^b) * Σ_k a[n][k] s^(k b - n)` with the
//! triangular recurrence
//!
//! ```text
//! a[0][0]   = 1
//! a[n+1][k] = (k b - n) a[n][k] - c b a[n][k-1]
//! ```
//!
//! Coefficients are held in signed log form: `|a[n][k]|` grows like `n!`
//! while `c^k` underflows for the small `c` produced by sparse D2D layers.

use crate::analytic::logspace::{LogSum, SignedLog};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DerivativeTable {
    c: f64,
    b: f64,
    rows: Vec<Vec<SignedLog>>,
}

impl DerivativeTable {
    pub fn new(c: f64, b: f64, n_max: usize) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("derivative coefficient c must be ≥ 0, got {c}")));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!("derivative exponent b must lie in (0, 1), got {b}")));
        }
        let neg_cb = SignedLog::from_f64(-c * b);
        let mut rows: Vec<Vec<SignedLog>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![SignedLog::ONE]);
        for n in 0..n_max {
            let prev = &rows[n];
            let mut next = vec![SignedLog::ZERO; n + 2];
            for (k, slot) in next.iter_mut().enumerate() {
                let keep = prev
                    .get(k)
                    .map(|a| a.mul(SignedLog::from_f64(k as f64 * b - n as f64)))
                    .unwrap_or(SignedLog::ZERO);
                let shift = if k >= 1 {
                    prev.get(k - 1).map(|a| a.mul(neg_cb)).unwrap_or(SignedLog::ZERO)
                } else {
                    SignedLog::ZERO
                };
                *slot = keep.add(shift);
            }
            rows.push(next);
        }
        Ok(Self { c, b, rows })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() - 1
    }

    /// `a[n][k]` in signed log form; zero outside the triangle.
    pub fn log_coeff(&self, n: usize, k: usize) -> SignedLog {
        self.rows.get(n).and_then(|r| r.get(k)).copied().unwrap_or(SignedLog::ZERO)
    }

    /// `a[n][k]` as a plain float (may overflow for large orders).
    pub fn coeff(&self, n: usize, k: usize) -> f64 {
        self.log_coeff(n, k).to_f64()
    }

    /// `s^n * f^(n)(s) / f(s)` where `f = exp(-c s^b)`, accumulated in log form.
    pub fn scaled(&self, n: usize, ln_s: f64) -> LogSum {
        let mut acc = LogSum::new();
        if let Some(row) = self.rows.get(n) {
            for (k, a) in row.iter().enumerate() {
                acc.push(a.scale_ln(k as f64 * self.b * ln_s));
            }
        }
        acc
    }
}

/// Values of `d^i/ds^i exp(-c s^b)` for `i = 0..=n_max`.
pub fn exp_power_derivatives(c: f64, b: f64, s: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("derivative point must be ≥ 0, got {s}")));
    }
    if s == 0.0 && n_max >= 1 {
        return Err(Error::Domain("derivatives of exp(-c s^b) are singular at s = 0".into()));
    }
    let table = DerivativeTable::new(c, b, n_max)?;
    let base = (-c * s.powf(b)).exp();
    if s == 0.0 {
        return Ok(vec![base]);
    }
    let ln_s = s.ln();
    Ok((0..=n_max)
        .map(|n| {
            let scaled = table.scaled(n, ln_s).total();
            // s^-n * f^(n)/f * f
            scaled.scale_ln(-(n as f64) * ln_s).to_f64() * base
        })
        .collect())
}
