use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::ppp::PppField;
use super::rng::{keyed_stream, stream_key, StreamDomain};
use super::{BsPlacement, SimConfig, SinrBatch, UserType};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// SINR samples at the typical D2D receiver.
///
/// The receiver sits at the origin with its own transmitter `d2d_distance`
/// away. The BS interferes through a Gamma(U_c, 1) beamforming gain, and the
/// other D2D transmitters form a PPP on a disc of radius
/// `window_factor * cell_radius` around the receiver. Everything is
/// normalized by `a_d`.
pub fn simulate_d2d_sinr(params: &SystemParams, config: &SimConfig) -> Result<SinrBatch> {
    simulate(params, config, UserType::D2d)
}

/// SINR samples at the typical cellular user, uniformly placed in the cell,
/// with a Gamma(T_c - U_c + 1, 1) ZF gain and PPP interference from the
/// window around the user.
pub fn simulate_cue_sinr(params: &SystemParams, config: &SimConfig) -> Result<SinrBatch> {
    simulate(params, config, UserType::Cellular)
}

pub fn simulate(params: &SystemParams, config: &SimConfig, user_type: UserType) -> Result<SinrBatch> {
    params.ensure_valid()?;
    config.validate()?;
    let model = TrialModel::new(params, config, user_type)?;
    let domain = match user_type {
        UserType::D2d => StreamDomain::D2d,
        UserType::Cellular => StreamDomain::Cellular,
    };
    let key = stream_key(config.master_seed, domain);
    let chunks: Vec<(u64, u64)> = (0..config.trials)
        .step_by(config.chunk_size as usize)
        .map(|start| (start, (start + config.chunk_size).min(config.trials)))
        .collect();
    let parts: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&(start, end)| {
            (start..end)
                .map(|trial| model.trial(&mut keyed_stream(key, trial)))
                .collect()
        })
        .collect();
    let mut sinr_values = Vec::with_capacity(config.trials as usize);
    for p in parts {
        sinr_values.extend(p);
    }
    Ok(SinrBatch { user_type, sinr_values, params_fingerprint: fingerprint(params, config, user_type) })
}

struct TrialModel {
    user_type: UserType,
    field: Option<PppField>,
    /// Mean interference from beyond the window (0 when disabled).
    far_field: f64,
    /// `p_d` for D2D interferers.
    p_d: f64,
    alpha_d: f64,
    alpha_c: f64,
    radius: f64,
    noise: f64,
    /// Gamma gain of the BS link (cross gain for D2D, ZF gain for cellular).
    gain: Gamma<f64>,
    /// D2D: useful `p_d d^-alpha_d`; cellular unused.
    d2d_signal: f64,
    /// D2D: `(a_c/a_d)(p_c/u_c)`; cellular: `zeta / a_d`.
    bs_scale: f64,
    bs_placement: BsPlacement,
}

impl TrialModel {
    fn new(params: &SystemParams, config: &SimConfig, user_type: UserType) -> Result<Self> {
        let shape = match user_type {
            UserType::D2d => params.u_c as f64,
            UserType::Cellular => (params.t_c - params.u_c + 1) as f64,
        };
        let gain = Gamma::new(shape, 1.0)
            .map_err(|e| Error::InvalidArgument(format!("gain distribution: {e}")))?;
        let bs_scale = match user_type {
            UserType::D2d => params.a_c / params.a_d * params.p_c / params.u_c as f64,
            UserType::Cellular => params.zeta() / params.a_d,
        };
        let window = config.window_factor * params.cell_radius;
        let far_field = if config.far_field_mean {
            2.0 * std::f64::consts::PI * params.lambda_d * params.p_d * window.powf(2.0 - params.alpha_d)
                / (params.alpha_d - 2.0)
        } else {
            0.0
        };
        Ok(Self {
            user_type,
            field: PppField::new(params.lambda_d, window),
            far_field,
            p_d: params.p_d,
            alpha_d: params.alpha_d,
            alpha_c: params.alpha_c,
            radius: params.cell_radius,
            noise: params.normalized_noise(),
            gain,
            d2d_signal: params.p_d * params.d2d_distance.powf(-params.alpha_d),
            bs_scale,
            bs_placement: config.bs_placement,
        })
    }

    fn disc_distance(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.radius * rng.random::<f64>().sqrt()
    }

    fn ppp_interference(&self, rng: &mut ChaCha8Rng) -> f64 {
        let near = match &self.field {
            Some(f) => f.interference(rng, self.p_d, self.alpha_d),
            None => 0.0,
        };
        near + self.far_field
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> f64 {
        // Fixed draw order (own fading, distance, gain, field) keeps the
        // leading variates common across parameter changes.
        match self.user_type {
            UserType::D2d => {
                let fade: f64 = Exp1.sample(rng);
                let bs_distance = match self.bs_placement {
                    BsPlacement::UniformDisc => self.disc_distance(rng),
                    BsPlacement::Fixed { distance } => distance,
                };
                let cross = self.gain.sample(rng);
                let i_bs = self.bs_scale * bs_distance.powf(-self.alpha_c) * cross;
                let i_d = self.ppp_interference(rng);
                let sinr = self.d2d_signal * fade / (i_bs + i_d + self.noise);
                if sinr.is_nan() { 0.0 } else { sinr }
            }
            UserType::Cellular => {
                let distance = self.disc_distance(rng);
                let zf_gain = self.gain.sample(rng);
                let i_d = self.ppp_interference(rng);
                let sinr = zf_gain * self.bs_scale / (distance.powf(self.alpha_c) * (i_d + self.noise));
                if sinr.is_nan() { 0.0 } else { sinr }
            }
        }
    }
}

fn fingerprint(params: &SystemParams, config: &SimConfig, user_type: UserType) -> u64 {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(params).expect("params serialize"));
    h.update(serde_json::to_vec(config).expect("config serialize"));
    h.update(user_type.to_string().as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}
