use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

/// Homogeneous PPP of intensity `lambda` on the disc of radius `window_radius`
/// centered at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window_radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let Some(field) = PppField::new(lambda, window_radius) else {
        return Vec::new();
    };
    let n = field.count(rng);
    (0..n)
        .map(|_| {
            let r = field.radius_sq(rng).sqrt();
            let theta = rng.random::<f64>() * 2.0 * PI;
            [r * theta.cos(), r * theta.sin()]
        })
        .collect()
}

/// Point count law and radial law of a PPP restricted to a disc.
#[derive(Debug, Clone)]
pub(crate) struct PppField {
    count: Poisson<f64>,
    radius_sq: f64,
}

impl PppField {
    /// `None` for an empty process.
    pub(crate) fn new(lambda: f64, window_radius: f64) -> Option<Self> {
        let mean = lambda * PI * window_radius * window_radius;
        if !(mean > 0.0) {
            return None;
        }
        Some(Self { count: Poisson::new(mean).ok()?, radius_sq: window_radius * window_radius })
    }

    pub(crate) fn count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.count.sample(rng) as u64
    }

    /// Squared distance to the origin of a uniform point on the disc.
    pub(crate) fn radius_sq<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.radius_sq * rng.random::<f64>()
    }

    /// Aggregate `Σ p r^-alpha |h|^2` with unit-mean exponential fading.
    pub(crate) fn interference<R: Rng + ?Sized>(&self, rng: &mut R, power: f64, alpha: f64) -> f64 {
        let n = self.count(rng);
        let half = -0.5 * alpha;
        let mut total = 0.0;
        for _ in 0..n {
            let r2 = self.radius_sq(rng);
            let fade: f64 = Exp1.sample(rng);
            total += fade * r2.powf(half);
        }
        power * total
    }
}
