//! Conversions between logarithmic (dB/dBm) and linear SI quantities.
//!
//! Everything downstream of configuration works in watts, meters and hertz.

use crate::error::{Error, Result};

/// `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> Result<f64> {
    if !x_db.is_finite() {
        return Err(Error::InvalidArgument(format!("dB value must be finite, got {x_db}")));
    }
    Ok(10f64.powf(x_db / 10.0))
}

/// dBm to watts.
pub fn dbm_to_watt(x_dbm: f64) -> Result<f64> {
    if !x_dbm.is_finite() {
        return Err(Error::InvalidArgument(format!("dBm value must be finite, got {x_dbm}")));
    }
    Ok(10f64.powf((x_dbm - 30.0) / 10.0))
}

/// Distance-dependent gain `coeff * distance^(-exponent)`.
pub fn pathloss_gain(distance: f64, coeff: f64, exponent: f64) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::Domain(format!("pathloss distance must be positive, got {distance}")));
    }
    if !(coeff > 0.0) {
        return Err(Error::Domain(format!("pathloss coefficient must be positive, got {coeff}")));
    }
    if !(exponent > 2.0) {
        return Err(Error::Domain(format!("pathloss exponent must exceed 2, got {exponent}")));
    }
    Ok(coeff * distance.powf(-exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear_to_db(x: f64) -> f64 {
        10.0 * x.log10()
    }

    #[test]
    fn db_examples() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!((db_to_linear(10.0).unwrap() - 10.0).abs() < 1e-12);
        // 10^3.884 = 7655.966...
        assert!((db_to_linear(38.84).unwrap() - 7656.0).abs() < 0.5);
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
    }

    #[test]
    fn dbm_examples() {
        assert!((dbm_to_watt(30.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((dbm_to_watt(41.0).unwrap() - 12.589).abs() < 1e-3);
        assert!((dbm_to_watt(13.0).unwrap() - 0.019953).abs() < 1e-6);
        assert!(dbm_to_watt(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn pathloss_examples() {
        assert_eq!(pathloss_gain(1.0, 1.0, 3.0).unwrap(), 1.0);
        assert_eq!(pathloss_gain(2.0, 1.0, 3.0).unwrap(), 0.125);
        let a_d = db_to_linear(-38.84).unwrap();
        let g = pathloss_gain(50.0, a_d, 3.0).unwrap();
        let oracle = 10f64.powf(-3.884) / 125_000.0;
        assert!((g - oracle).abs() / oracle < 1e-14);
        assert!(matches!(pathloss_gain(0.0, 1.0, 3.0), Err(Error::Domain(_))));
        assert!(pathloss_gain(1.0, 1.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn db_round_trip(exp in -12.0f64..12.0) {
            let x = 10f64.powf(exp);
            let back = db_to_linear(linear_to_db(x)).unwrap();
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }

        #[test]
        fn dbm_is_shifted_db(x in -200.0f64..200.0) {
            prop_assert_eq!(dbm_to_watt(x).unwrap(), 10f64.powf((x - 30.0) / 10.0));
            let via_db = db_to_linear(x).unwrap() / 1000.0;
            prop_assert!(((dbm_to_watt(x).unwrap() - via_db) / via_db).abs() < 1e-13);
        }

        #[test]
        fn pathloss_monotone(d in 1.0f64..1e4, dd in 1e-3f64..100.0, c in 1e-6f64..10.0, dc in 1e-6f64..1.0, a in 2.01f64..6.0) {
            let g = pathloss_gain(d, c, a).unwrap();
            prop_assert!(pathloss_gain(d + dd, c, a).unwrap() < g);
            prop_assert!(pathloss_gain(d, c + dc, a).unwrap() > g);
        }
    }
}
