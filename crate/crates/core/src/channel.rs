//! Per-re-transmission MIMO channel generation and SNR calibration.
//!
//! One vector transmission sends N QPSK symbols through an N x N block-fading
//! matrix plus AWGN; the same symbol vector is re-transmitted over independent
//! realizations. The noise variance is calibrated so that a configured average
//! SNR per information bit is met exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gaussian_complex, ComplexMatrix, RngStream};

/// Average power of the QPSK alphabet {+-1 +-j}.
pub const QPSK_AVG_POWER: f64 = 2.0;

/// Channel-side simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Antenna count at both ends.
    pub n: usize,
    /// Number of re-transmissions of each symbol vector.
    pub n_rt: usize,
    /// Fading variance per dimension.
    pub sigma_h_sq: f64,
    /// Target average SNR per bit in dB.
    pub snr_av_b_db: f64,
}

impl ChannelParams {
    pub fn new(n: usize, n_rt: usize, sigma_h_sq: f64, snr_av_b_db: f64) -> Result<Self> {
        let params = Self {
            n,
            n_rt,
            sigma_h_sq,
            snr_av_b_db,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("antenna count must be >= 1".into()));
        }
        if self.n_rt < 1 {
            return Err(Error::InvalidParameter(
                "re-transmission count must be >= 1".into(),
            ));
        }
        if !(self.sigma_h_sq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fading variance must be positive, got {}",
                self.sigma_h_sq
            )));
        }
        if !self.snr_av_b_db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "SNR per bit must be finite, got {}",
                self.snr_av_b_db
            )));
        }
        Ok(())
    }
}

/// One re-transmission's fading matrix and noise vector.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// N x N fading gains.
    pub h: ComplexMatrix,
    /// N x 1 additive noise.
    pub w: Vec<Complex64>,
    /// Re-transmission index.
    pub k: usize,
}

/// Noise variance per dimension that realizes the configured SNR per bit:
/// `sigma_w^2 = n_rt * 4 N sigma_H^2 / 10^(SNR/10)`.
pub fn noise_variance_from_snr(params: &ChannelParams) -> f64 {
    params.n_rt as f64 * 4.0 * params.n as f64 * params.sigma_h_sq
        / 10f64.powf(0.1 * params.snr_av_b_db)
}

/// Average SNR per bit in dB implied by a noise variance; inverse of
/// [`noise_variance_from_snr`].
pub fn snr_from_noise_variance(params: &ChannelParams, sigma_w_sq: f64) -> f64 {
    (4.0 * params.n as f64 * params.n_rt as f64 * params.sigma_h_sq / sigma_w_sq).log10() * 10.0
}

/// Draws the `k`-th re-transmission's channel: fading entries i.i.d. complex
/// Gaussian with variance `sigma_h_sq` per dimension, noise entries with
/// variance `sigma_w_sq` per dimension. `sigma_w_sq == 0` forces a noise-free
/// channel.
pub fn draw_realization(
    params: &ChannelParams,
    sigma_w_sq: f64,
    stream: &mut RngStream,
    k: usize,
) -> Result<ChannelRealization> {
    params.validate()?;
    if k >= params.n_rt {
        return Err(Error::InvalidParameter(format!(
            "re-transmission index {k} out of range for n_rt = {}",
            params.n_rt
        )));
    }
    if sigma_w_sq < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be non-negative, got {sigma_w_sq}"
        )));
    }
    let n = params.n;
    let h = ComplexMatrix::new(n, n, gaussian_complex(stream, n * n, params.sigma_h_sq)?)?;
    let w = if sigma_w_sq > 0.0 {
        gaussian_complex(stream, n, sigma_w_sq)?
    } else {
        vec![Complex64::new(0.0, 0.0); n]
    };
    Ok(ChannelRealization { h, w, k })
}

/// Received vector `h * s + w` for one symbol vector `s`.
pub fn transmit(real: &ChannelRealization, s: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut r = real.h.mul_vec(s)?;
    for (ri, wi) in r.iter_mut().zip(&real.w) {
        *ri += wi;
    }
    Ok(r)
}
