use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// One full-matrix zero-forcing draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfGainSample {
    /// `|h_0^H v_0|^2` for the served user.
    pub useful: f64,
    /// `||f^H V||^2` for an independent receiver channel `f`.
    pub cross: f64,
}

/// Smallest acceptable pivot of the Gram matrix Cholesky factor, relative to
/// its largest diagonal entry.
const PIVOT_FLOOR: f64 = 1e-10;

fn cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws `samples` i.i.d. Rayleigh channels, forms the column-normalized ZF
/// precoder `H^H (H H^H)^-1`, and records the served user's gain and the gain
/// seen by an unrelated receiver.
pub fn zf_oracle_gains<R: Rng + ?Sized>(
    t_c: usize,
    u_c: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<ZfGainSample>> {
    if u_c < 1 || u_c > t_c {
        return Err(Error::InvalidArgument(format!("ZF needs 1 ≤ u_c ≤ t_c, got u_c={u_c}, t_c={t_c}")));
    }
    let mut out = Vec::with_capacity(samples);
    let mut resamples = 0usize;
    while out.len() < samples {
        // rows are h_j^H
        let h = DMatrix::<Complex64>::from_fn(u_c, t_c, |_, _| cn(rng));
        let gram = &h * h.adjoint();
        let Some(chol) = gram.clone().cholesky() else {
            resamples += 1;
            continue;
        };
        let l = chol.l();
        let max_diag = (0..u_c).map(|i| gram[(i, i)].re).fold(0.0, f64::max);
        let min_pivot = (0..u_c).map(|i| l[(i, i)].re.powi(2)).fold(f64::INFINITY, f64::min);
        if min_pivot < PIVOT_FLOOR * max_diag {
            resamples += 1;
            continue;
        }
        let w = h.adjoint() * chol.inverse();
        let mut v = w;
        for mut col in v.column_iter_mut() {
            let norm = col.norm();
            col /= Complex64::new(norm, 0.0);
        }
        let useful = (h.row(0) * v.column(0))[(0, 0)].norm_sqr();
        let f = DMatrix::<Complex64>::from_fn(1, t_c, |_, _| cn(rng));
        // f^H V with f stored as a row of conjugated entries
        let cross = (f * &v).iter().map(|z| z.norm_sqr()).sum();
        out.push(ZfGainSample { useful, cross });
        if resamples > 1000 + samples {
            return Err(Error::NumericalFailure("ZF channel draws are persistently rank-deficient".into()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::rng::{substream, StreamDomain};

    #[test]
    fn scalar_case_is_exponential() {
        let mut rng = substream(1, StreamDomain::ZfOracle, 0);
        let s = zf_oracle_gains(1, 1, 20_000, &mut rng).unwrap();
        let mean = s.iter().map(|x| x.useful).sum::<f64>() / s.len() as f64;
        assert!((mean - 1.0).abs() < 0.03);
        // P(X > 1) = e^-1
        let tail = s.iter().filter(|x| x.useful > 1.0).count() as f64 / s.len() as f64;
        assert!((tail - (-1f64).exp()).abs() < 0.01);
    }

    #[test]
    fn zero_forcing_nulls_other_users() {
        let mut rng = substream(2, StreamDomain::ZfOracle, 0);
        let h = DMatrix::<Complex64>::from_fn(3, 6, |_, _| cn(&mut rng));
        let w = h.adjoint() * (&h * h.adjoint()).try_inverse().unwrap();
        let prod = &h * &w;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cross_gain_mean_is_user_count() {
        let mut rng = substream(3, StreamDomain::ZfOracle, 0);
        let s = zf_oracle_gains(8, 4, 10_000, &mut rng).unwrap();
        let mean = s.iter().map(|x| x.cross).sum::<f64>() / s.len() as f64;
        assert!((mean - 4.0).abs() / 4.0 < 0.03, "mean {mean}");
    }

    #[test]
    fn rejects_bad_dimensions() {
        let mut rng = substream(4, StreamDomain::ZfOracle, 0);
        assert!(zf_oracle_gains(2, 3, 1, &mut rng).is_err());
        assert!(zf_oracle_gains(2, 0, 1, &mut rng).is_err());
    }
}
