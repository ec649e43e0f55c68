//! System and power-consumption parameters.
//!
//! All fields are stored in linear SI units. The `Default` impls reproduce the
//! reference scenario: 41 dBm BS power, 13 dBm D2D power, four cellular users,
//! a 500 m cell, 20 MHz bandwidth, -131 dBm thermal noise with a 5 dB noise
//! figure, 50 m D2D pairs, exponents 3.67 (BS-device) and 3 (device-device),
//! and pathloss intercepts of 30.55 dB and 38.84 dB.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::units::{db_to_linear, dbm_to_watt};

/// Physical and system constants of one single-cell scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// BS total transmit power, W.
    pub p_c: f64,
    /// D2D transmit power, W.
    pub p_d: f64,
    /// Number of cellular users served by ZF.
    pub u_c: u32,
    /// Number of BS antennas.
    pub t_c: u32,
    /// D2D transmitter density, m^-2.
    pub lambda_d: f64,
    /// Cell radius, m.
    pub cell_radius: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Thermal noise power, W.
    pub noise_power: f64,
    pub noise_figure_db: f64,
    /// When set, the receiver noise figure scales `noise_power`.
    pub apply_noise_figure: bool,
    /// Fixed D2D transmitter-receiver separation, m.
    pub d2d_distance: f64,
    pub alpha_c: f64,
    pub alpha_d: f64,
    /// Linear BS-device pathloss coefficient (an attenuation, < 1 for the defaults).
    pub a_c: f64,
    /// Linear device-device pathloss coefficient.
    pub a_d: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            p_c: dbm_to_watt(41.0).unwrap(),
            p_d: dbm_to_watt(13.0).unwrap(),
            u_c: 4,
            t_c: 4,
            lambda_d: 1e-6,
            cell_radius: 500.0,
            bandwidth: 20e6,
            noise_power: dbm_to_watt(-131.0).unwrap(),
            noise_figure_db: 5.0,
            apply_noise_figure: true,
            d2d_distance: 50.0,
            alpha_c: 3.67,
            alpha_d: 3.0,
            a_c: db_to_linear(-30.55).unwrap(),
            a_d: db_to_linear(-38.84).unwrap(),
        }
    }
}

impl SystemParams {
    /// Per-user BS receive scale `a_c * p_c / u_c`.
    pub fn zeta(&self) -> f64 {
        self.a_c * self.p_c / self.u_c as f64
    }

    /// Noise power actually seen by a receiver, W.
    pub fn effective_noise(&self) -> f64 {
        if self.apply_noise_figure {
            self.noise_power * 10f64.powf(self.noise_figure_db / 10.0)
        } else {
            self.noise_power
        }
    }

    /// Noise normalized by the device-device pathloss coefficient.
    pub fn normalized_noise(&self) -> f64 {
        self.effective_noise() / self.a_d
    }

    /// Expected number of D2D transmitters inside the cell, `pi R^2 lambda_d`.
    pub fn mean_d2d_count(&self) -> f64 {
        PI * self.cell_radius * self.cell_radius * self.lambda_d
    }

    pub fn with_tc(&self, t_c: u32) -> Self {
        Self { t_c, ..self.clone() }
    }

    pub fn with_lambda(&self, lambda_d: f64) -> Self {
        Self { lambda_d, ..self.clone() }
    }

    /// Checks every invariant; an empty list means the set is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &'static str, rule: &'static str| {
            if !ok {
                out.push(Violation { field, rule });
            }
        };
        check(self.u_c >= 1, "u_c", "u_c ≥ 1");
        check(self.u_c <= self.t_c, "u_c", "u_c ≤ t_c");
        check(self.alpha_c > 2.0, "alpha_c", "alpha_c > 2");
        check(self.alpha_d > 2.0, "alpha_d", "alpha_d > 2");
        check(self.p_c >= 0.0 && self.p_c.is_finite(), "p_c", "p_c ≥ 0");
        check(positive(self.p_d), "p_d", "p_d > 0");
        check(positive(self.cell_radius), "cell_radius", "cell_radius > 0");
        check(positive(self.bandwidth), "bandwidth", "bandwidth > 0");
        check(positive(self.noise_power), "noise_power", "noise_power > 0");
        check(self.noise_figure_db.is_finite(), "noise_figure_db", "noise_figure_db finite");
        check(positive(self.d2d_distance), "d2d_distance", "d2d_distance > 0");
        check(positive(self.a_c), "a_c", "a_c > 0");
        check(positive(self.a_d), "a_d", "a_d > 0");
        check(
            self.lambda_d >= 0.0 && self.lambda_d.is_finite(),
            "lambda_d",
            "lambda_d ≥ 0",
        );
        check(
            self.d2d_distance < self.cell_radius,
            "d2d_distance",
            "d2d_distance < cell_radius",
        );
        out
    }

    pub fn ensure_valid(&self) -> crate::Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::InvalidParams(v))
        }
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// One failed invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Circuit and amplifier constants of the consumed-power model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Amplifier efficiency in (0, 1].
    pub eta: f64,
    /// Load-independent BS power, W.
    pub c0: f64,
    /// Power per BS antenna, W.
    pub c1: f64,
    /// Power per handset, W.
    pub c2: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self { eta: 0.3, c0: 5.0, c1: 0.5, c2: 0.1 }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            out.push(Violation { field: "eta", rule: "0 < eta ≤ 1" });
        }
        for (field, rule, v) in [
            ("c0", "c0 ≥ 0", self.c0),
            ("c1", "c1 ≥ 0", self.c1),
            ("c2", "c2 ≥ 0", self.c2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(Violation { field, rule });
            }
        }
        out
    }
}
