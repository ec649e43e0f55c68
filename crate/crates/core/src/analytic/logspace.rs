//! Signed log-magnitude arithmetic for sums whose terms overflow `f64`.

/// A real number stored as `sign * exp(ln_abs)`. Zero has `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ZERO: Self = Self { ln_abs: f64::NEG_INFINITY, sign: 0.0 };
    pub const ONE: Self = Self { ln_abs: 0.0, sign: 1.0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { ln_abs: x.abs().ln(), sign: x.signum() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0 || self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self { ln_abs: self.ln_abs + other.ln_abs, sign: self.sign * other.sign }
    }

    /// Multiplies by `exp(ln_factor)`, a positive factor given by its log.
    pub fn scale_ln(self, ln_factor: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self { ln_abs: self.ln_abs + ln_factor, sign: self.sign }
    }

    pub fn add(self, other: Self) -> Self {
        let mut acc = LogSum::new();
        acc.push(self);
        acc.push(other);
        acc.total()
    }
}

/// Accumulates signed log-domain terms and sums them with a max shift.
///
/// Also records the largest term magnitude so callers can detect when the
/// result has cancelled below the working precision.
#[derive(Debug, Clone, Default)]
pub struct LogSum {
    terms: Vec<SignedLog>,
}

impl LogSum {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn push(&mut self, t: SignedLog) {
        if !t.is_zero() {
            self.terms.push(t);
        }
    }

    pub fn max_ln_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.ln_abs).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn total(&self) -> SignedLog {
        let shift = self.max_ln_abs();
        if shift == f64::NEG_INFINITY {
            return SignedLog::ZERO;
        }
        let scaled: f64 = self.terms.iter().map(|t| t.sign * (t.ln_abs - shift).exp()).sum();
        if scaled == 0.0 {
            return SignedLog::ZERO;
        }
        SignedLog { ln_abs: scaled.abs().ln() + shift, sign: scaled.signum() }
    }

    /// `|total| / max |term|`; 1 when every term has the same sign, tiny under
    /// catastrophic cancellation.
    pub fn retained_fraction(&self) -> f64 {
        let shift = self.max_ln_abs();
        if shift == f64::NEG_INFINITY {
            return 1.0;
        }
        let t = self.total();
        if t.is_zero() {
            0.0
        } else {
            (t.ln_abs - shift).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_products() {
        for x in [-3.5, -1e-200, 0.0, 2.0, 1e250] {
            let s = SignedLog::from_f64(x);
            assert!((s.to_f64() - x).abs() <= 1e-12 * x.abs());
        }
        let p = SignedLog::from_f64(-2.0).mul(SignedLog::from_f64(3.0));
        assert!((p.to_f64() + 6.0).abs() < 1e-14);
        assert!(SignedLog::ZERO.mul(SignedLog::ONE).is_zero());
    }

    #[test]
    fn sums_beyond_f64_range() {
        let mut acc = LogSum::new();
        acc.push(SignedLog { ln_abs: 1000.0, sign: 1.0 });
        acc.push(SignedLog { ln_abs: 1000.0, sign: 1.0 });
        let t = acc.total();
        assert!((t.ln_abs - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((acc.retained_fraction() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cancellation_is_visible() {
        let mut acc = LogSum::new();
        acc.push(SignedLog::from_f64(1.0));
        acc.push(SignedLog::from_f64(-1.0));
        assert!(acc.total().is_zero());
        assert_eq!(acc.retained_fraction(), 0.0);
        let mixed = SignedLog::from_f64(5.0).add(SignedLog::from_f64(-2.0));
        assert!((mixed.to_f64() - 3.0).abs() < 1e-14);
    }
}
