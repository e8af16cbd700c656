//! Matched filtering of each re-transmission and averaging across them.
//!
//! The matched filter multiplies the received vector by the conjugate
//! transpose of the channel; averaging the outputs of the independent
//! re-transmissions shrinks the interference variance by 1/N_rt. The decoder
//! is handed the closed-form interference-plus-noise variance computed from
//! the known simulation parameters rather than an estimate from data.

use num_complex::Complex64;

use crate::channel::{ChannelParams, ChannelRealization};
use crate::error::{Error, Result};
use crate::numerics::hermitian_times_vec;

/// Effective per-symbol scalar channel after matched filtering and averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedObservation {
    /// Averaged matched-filter output.
    pub y: Complex64,
    /// Averaged channel gain; real and non-negative by construction.
    pub f: f64,
}

/// Matched-filters one re-transmission: returns `h^H r` and the per-symbol
/// channel gains `f[i] = sum_j |h[j][i]|^2`.
pub fn matched_filter(
    real: &ChannelRealization,
    r: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let y = hermitian_times_vec(&real.h, r)?;
    let n = real.h.cols();
    let mut f = vec![0.0; n];
    for j in 0..real.h.rows() {
        for (fi, &hji) in f.iter_mut().zip(real.h.row(j)) {
            *fi += hji.norm_sqr();
        }
    }
    Ok((y, f))
}

/// Arithmetic mean of the matched-filter outputs over the re-transmissions.
pub fn combine(
    per_k: &[(Vec<Complex64>, Vec<f64>)],
    n_rt: usize,
) -> Result<Vec<CombinedObservation>> {
    if per_k.is_empty() {
        return Err(Error::InvalidParameter(
            "combine requires at least one matched-filter output".into(),
        ));
    }
    if per_k.len() != n_rt {
        return Err(Error::DimensionMismatch(format!(
            "expected {n_rt} matched-filter outputs, got {}",
            per_k.len()
        )));
    }
    let n = per_k[0].0.len();
    for (y, f) in per_k {
        if y.len() != n || f.len() != n {
            return Err(Error::DimensionMismatch(
                "matched-filter outputs disagree on symbol count".into(),
            ));
        }
    }
    let scale = 1.0 / n_rt as f64;
    Ok((0..n)
        .map(|i| CombinedObservation {
            y: per_k.iter().map(|(y, _)| y[i]).sum::<Complex64>() * scale,
            f: per_k.iter().map(|(_, f)| f[i]).sum::<f64>() * scale,
        })
        .collect())
}

/// Closed-form variance of the combined interference-plus-noise term:
/// a noise part that is constant for a given SNR plus an interference part
/// that shrinks with the number of re-transmissions.
pub fn sigma_u_sq(params: &ChannelParams) -> f64 {
    let n = params.n as f64;
    let s4 = params.sigma_h_sq * params.sigma_h_sq;
    16.0 * n * n * s4 / 10f64.powf(0.1 * params.snr_av_b_db)
        + 8.0 * s4 * n * (n - 1.0) / params.n_rt as f64
}
