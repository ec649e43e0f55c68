//! Special functions used by the coverage closed forms.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Normalized sinc `sin(pi z) / (pi z)`, restricted to `0 < z < 1`.
pub fn sinc_norm(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("sinc argument must lie in (0, 1), got {z}")));
    }
    Ok((PI * z).sin() / (PI * z))
}

/// `ln B(a, b)` through log-gamma.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lower incomplete (unregularized) Beta function `∫_0^y t^(a-1) (1-t)^(b-1) dt`.
pub fn incomplete_beta(y: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("incomplete beta needs y in [0, 1], got {y}")));
    }
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("incomplete beta needs a, b > 0, got a={a}, b={b}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let complete = ln_beta(a, b).exp();
    if y == 1.0 {
        return Ok(complete);
    }
    // The continued fraction converges quickly below the mean of Beta(a, b);
    // above it, reflect. The reflection also keeps the (1 - t)^(b - 1)
    // endpoint singularity out of the fraction when b < 1.
    if y < (a + 1.0) / (a + b + 2.0) {
        lower_cf(y, a, b)
    } else {
        let upper = lower_cf(1.0 - y, b, a)?;
        Ok((complete - upper).max(0.0))
    }
}

/// `y^a (1-y)^b / a * cf(y; a, b)` with the continued fraction evaluated by
/// the modified Lentz method.
fn lower_cf(y: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * y / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    let mut converged = false;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * y / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * y / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "incomplete beta continued fraction did not converge (y={y}, a={a}, b={b})"
        )));
    }
    let log_front = a * y.ln() + b * (-y).ln_1p();
    Ok(log_front.exp() * h / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::quadrature::{integrate, Tolerance};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sinc_values() {
        assert!((sinc_norm(0.5).unwrap() - 2.0 / PI).abs() < 1e-12);
        let z = 2.0 / 3.0;
        let oracle = (2.0 * PI / 3.0).sin() / (2.0 * PI / 3.0);
        assert!((sinc_norm(z).unwrap() - oracle).abs() < 1e-15);
        assert!((sinc_norm(z).unwrap() - 0.41350).abs() < 1e-5);
        for z in [0.0, 1.0, -0.2, 1.5] {
            assert!(sinc_norm(z).is_err());
        }
        for i in 1..1000 {
            let v = sinc_norm(i as f64 / 1000.0).unwrap();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn beta_unit_integrand() {
        for y in [0.0, 0.1, 0.5, 0.93, 1.0] {
            assert!((incomplete_beta(y, 1.0, 1.0).unwrap() - y).abs() < 1e-14);
        }
    }

    #[test]
    fn beta_linear_integrand() {
        assert!((incomplete_beta(0.5, 2.0, 1.0).unwrap() - 0.125).abs() < 1e-14);
    }

    #[test]
    fn beta_complete_matches_log_gamma() {
        for (a, b) in [(0.5, 0.5), (4.545, 0.455), (2.0, 3.0), (10.0, 0.1)] {
            let oracle = (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp();
            assert!(rel(incomplete_beta(1.0, a, b).unwrap(), oracle) < 1e-13);
        }
    }

    #[test]
    fn beta_domain_errors() {
        assert!(incomplete_beta(-0.1, 1.0, 1.0).is_err());
        assert!(incomplete_beta(1.1, 1.0, 1.0).is_err());
        assert!(incomplete_beta(0.5, 0.0, 1.0).is_err());
        assert!(incomplete_beta(0.5, 1.0, -1.0).is_err());
    }

    #[test]
    fn beta_matches_regularized_reference() {
        // Reference: statrs regularized incomplete beta times the complete Beta.
        let cases = [
            (0.3, 4.545, 0.455),
            (0.984, 4.545, 0.455),
            (0.999_999, 4.545, 0.455),
            (0.01, 3.0, 0.7),
            (0.7, 0.5, 2.5),
            (0.5, 20.0, 0.3),
        ];
        for (y, a, b) in cases {
            let reference = statrs::function::beta::beta_reg(a, b, y) * ln_beta(a, b).exp();
            let got = incomplete_beta(y, a, b).unwrap();
            assert!(rel(got, reference) < 1e-10, "B({y};{a},{b}) = {got} vs {reference}");
        }
    }

    #[test]
    fn beta_matches_quadrature_away_from_singularity() {
        // Substitution t = y(1 - u^2) smooths the upper endpoint.
        let (a, b) = (4.0 + 2.0 / 3.67 - 1.0, 1.0 - 2.0 / 3.67);
        for y in [0.2, 0.5, 0.8, 0.95] {
            let quad = integrate(
                |u: f64| {
                    let t = y * (1.0 - u * u);
                    Ok(t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0) * 2.0 * y * u)
                },
                0.0,
                1.0,
                Tolerance::relative(1e-13),
            )
            .unwrap()
            .value;
            assert!(rel(incomplete_beta(y, a, b).unwrap(), quad) < 1e-11);
        }
    }

    proptest! {
        #[test]
        fn beta_monotone_in_y(a in 0.2f64..20.0, b in 0.1f64..5.0, y in 0.0f64..0.999, dy in 1e-6f64..1e-3) {
            let lo = incomplete_beta(y, a, b).unwrap();
            let hi = incomplete_beta((y + dy).min(1.0), a, b).unwrap();
            prop_assert!(hi >= lo * (1.0 - 1e-12));
        }
    }
}
