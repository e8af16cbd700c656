//! Closed-form capacity and SNR-per-bit relations.
//!
//! The minimum average SNR per bit for error-free transmission of `C` bits
//! per complex dimension is `(2^C - 1) / C`; its `C -> 0` limit, `ln 2`
//! (about -1.59 dB), is the familiar floor shared with the AWGN channel.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// One point on the minimum SNR-per-bit curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPoint {
    /// Bits per transmission over one complex dimension.
    pub c: f64,
    /// Minimum average SNR per bit, linear.
    pub snr_av_b: f64,
    /// Minimum average SNR per bit in dB.
    pub snr_av_b_db: f64,
}

/// The `c -> 0` limit of [`min_snr_per_bit`], exposed as a constant so no
/// caller has to evaluate the curve at a tiny argument.
pub const MIN_SNR_PER_BIT_LIMIT: f64 = LN_2;

/// The limit in dB.
pub fn min_snr_per_bit_limit_db() -> f64 {
    10.0 * MIN_SNR_PER_BIT_LIMIT.log10()
}

/// Minimum average SNR per bit `(2^c - 1) / c` for `c` bits per transmission
/// over a complex dimension.
pub fn min_snr_per_bit(c: f64) -> Result<CapacityPoint> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bits per transmission must be positive, got {c}"
        )));
    }
    // exp_m1 avoids cancellation for small c; the plain form keeps integer
    // arguments exact (c = 1 lands on 0 dB without rounding).
    let snr = if c >= 0.5 {
        (c.exp2() - 1.0) / c
    } else {
        (c * LN_2).exp_m1() / c
    };
    Ok(CapacityPoint {
        c,
        snr_av_b: snr,
        snr_av_b_db: 10.0 * snr.log10(),
    })
}

/// Information carried by one QPSK symbol when every symbol is sent `n_rt`
/// times: `1 / (2 n_rt)` bits.
pub fn bits_per_symbol(n_rt: usize) -> Result<f64> {
    if n_rt < 1 {
        return Err(Error::InvalidParameter(
            "re-transmission count must be >= 1".into(),
        ));
    }
    Ok(1.0 / (2.0 * n_rt as f64))
}

/// Information per transmission from `n` antennas: `n / (2 n_rt)` bits/s/Hz.
pub fn spectral_efficiency(n: usize, n_rt: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("antenna count must be >= 1".into()));
    }
    Ok(n as f64 * bits_per_symbol(n_rt)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_bit_costs_zero_db() {
        let p = min_snr_per_bit(1.0).unwrap();
        assert_eq!(p.snr_av_b, 1.0);
        assert_eq!(p.snr_av_b_db, 0.0);
    }

    #[test]
    fn limit_is_ln_two() {
        assert!((min_snr_per_bit_limit_db() - (-1.5917)).abs() < 1e-3);
        // Consistency with the curve near zero.
        let p = min_snr_per_bit(1e-9).unwrap();
        assert!((p.snr_av_b - MIN_SNR_PER_BIT_LIMIT).abs() < 1e-9);
    }

    #[test]
    fn quarter_bit_point_matches_direct_evaluation() {
        let p = min_snr_per_bit(0.25).unwrap();
        assert!((p.snr_av_b - 0.75683).abs() < 1e-5);
        assert!((p.snr_av_b_db - (-1.2100)).abs() < 1e-4);
    }

    #[test]
    fn curve_converges_monotonically_to_the_limit() {
        let mut prev = f64::INFINITY;
        for k in 3..=9 {
            let c = 10f64.powi(-k);
            let snr = min_snr_per_bit(c).unwrap().snr_av_b;
            assert!(snr >= MIN_SNR_PER_BIT_LIMIT);
            assert!(snr <= prev, "not monotone at k = {k}");
            prev = snr;
        }
        let at_k6 = min_snr_per_bit(1e-6).unwrap().snr_av_b;
        assert!((at_k6 - MIN_SNR_PER_BIT_LIMIT).abs() / MIN_SNR_PER_BIT_LIMIT < 1e-6);
    }

    #[test]
    fn definition_round_trips_through_log_form() {
        for &c in &[0.1, 0.25, 0.5, 1.0, 2.0, 6.0] {
            let p = min_snr_per_bit(c).unwrap();
            let back = (1.0 + c * p.snr_av_b).log2();
            assert!((back - c).abs() < 1e-12, "c = {c} round-trips to {back}");
        }
    }

    #[test]
    fn rejects_non_positive_bits() {
        assert!(min_snr_per_bit(0.0).is_err());
        assert!(min_snr_per_bit(-1.0).is_err());
        assert!(bits_per_symbol(0).is_err());
        assert!(spectral_efficiency(0, 1).is_err());
    }

    #[test]
    fn bits_per_symbol_table() {
        assert_eq!(bits_per_symbol(1).unwrap(), 0.5);
        assert_eq!(bits_per_symbol(2).unwrap(), 0.25);
        assert_eq!(bits_per_symbol(4).unwrap(), 0.125);
    }

    #[test]
    fn spectral_efficiency_table() {
        assert_eq!(spectral_efficiency(16, 2).unwrap(), 4.0);
        assert_eq!(spectral_efficiency(512, 2).unwrap(), 128.0);
        assert_eq!(spectral_efficiency(1, 1).unwrap(), 0.5);
    }

    proptest! {
        #[test]
        fn curve_is_strictly_increasing(a in 1e-4f64..8.0, gap in 1e-3f64..2.0) {
            let lo = min_snr_per_bit(a).unwrap().snr_av_b;
            let hi = min_snr_per_bit(a + gap).unwrap().snr_av_b;
            prop_assert!(hi > lo);
        }
    }
}
