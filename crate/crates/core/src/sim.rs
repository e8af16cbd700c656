//! Monte Carlo BER engine: runs frames end to end, sweeps SNR points and
//! aggregates deterministically regardless of worker count.
//!
//! Frames are independent tasks addressed by `(master_seed, frame_index)`;
//! aggregation is commutative addition of bit and error counts, and early
//! stopping is checked only at fixed batch boundaries, so a sweep's output is
//! a pure function of its configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::bcjr::{self, SoftFrame};
use crate::channel::{self, ChannelParams};
use crate::combiner;
use crate::error::{Error, Result};
use crate::numerics::{RngStream, StreamRole};
use crate::turbo::{self, Interleaver, RscCode, Trellis, CODE_16_STATE, CODE_4_STATE};

/// Fading variance per dimension used by the harness. BER at a fixed average
/// SNR per bit is invariant to this choice under the calibrated noise
/// variance, so the conventional unit-power value is fixed here.
pub const DEFAULT_SIGMA_H_SQ: f64 = 0.5;

/// Frames processed between early-stop checks. Stopping is only evaluated at
/// these boundaries so the set of frames run never depends on thread timing.
pub const STOP_CHECK_BATCH: u64 = 256;

/// Constituent code selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeId {
    FourState,
    SixteenState,
}

impl CodeId {
    pub fn code(self) -> RscCode {
        match self {
            CodeId::FourState => CODE_4_STATE,
            CodeId::SixteenState => CODE_16_STATE,
        }
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeId::FourState => "4-state",
            CodeId::SixteenState => "16-state",
        })
    }
}

impl FromStr for CodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4-state" | "4" => Ok(CodeId::FourState),
            "16-state" | "16" => Ok(CodeId::SixteenState),
            other => Err(Error::Config(format!(
                "unknown code `{other}` (expected `4-state` or `16-state`)"
            ))),
        }
    }
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Antenna count at both ends.
    pub n: usize,
    /// Re-transmissions per symbol vector.
    pub n_rt: usize,
    pub code: CodeId,
    /// Data bits per frame; each frame transmits twice as many QPSK symbols.
    pub frame_bits: usize,
    /// Average SNR per bit operating points, in dB.
    pub snr_db_list: Vec<f64>,
    /// Upper bound on frames per SNR point.
    pub max_frames: u64,
    /// Early-stop threshold: a point ends once this many bit errors have been
    /// counted (checked at batch boundaries). Use `u64::MAX` to always run
    /// `max_frames`.
    pub min_bit_errors: u64,
    pub turbo_iterations: usize,
    pub master_seed: u64,
    /// Destination for the CSV report; `None` leaves the choice to the caller.
    pub output_path: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 16,
            n_rt: 2,
            code: CodeId::FourState,
            frame_bits: 1024,
            snr_db_list: Vec::new(),
            max_frames: 10_000,
            min_bit_errors: 100,
            turbo_iterations: 8,
            master_seed: 1,
            output_path: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if self.n_rt < 1 {
            return Err(Error::InvalidParameter("n_rt must be >= 1".into()));
        }
        if self.frame_bits < 2 {
            return Err(Error::InvalidParameter("frame_bits must be >= 2".into()));
        }
        if !(2 * self.frame_bits).is_multiple_of(self.n) {
            return Err(Error::InvalidParameter(format!(
                "2 * frame_bits = {} must be divisible by n = {}",
                2 * self.frame_bits,
                self.n
            )));
        }
        if self.max_frames < 1 {
            return Err(Error::InvalidParameter("max_frames must be >= 1".into()));
        }
        if self.min_bit_errors < 1 {
            return Err(Error::InvalidParameter(
                "min_bit_errors must be >= 1 (use u64::MAX to disable early stop)".into(),
            ));
        }
        if self.turbo_iterations < 1 {
            return Err(Error::InvalidParameter(
                "turbo_iterations must be >= 1".into(),
            ));
        }
        if self.snr_db_list.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "snr_db_list entries must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Immutable per-run state shared by every frame task.
struct FrameContext {
    trellis: Trellis,
    interleaver: Interleaver,
}

impl FrameContext {
    fn new(cfg: &SimConfig) -> Result<Self> {
        let trellis = Trellis::new(cfg.code.code())?;
        let mut stream = RngStream::new(cfg.master_seed, 0, StreamRole::Interleaver);
        let interleaver = turbo::make_interleaver(cfg.frame_bits, &mut stream)?;
        Ok(Self {
            trellis,
            interleaver,
        })
    }
}

/// Everything one simulated frame produced.
#[derive(Debug, Clone)]
pub struct FrameResult {
    pub data_bits: Vec<bool>,
    pub decoded_bits: Vec<bool>,
    pub bit_errors: u64,
}

fn simulate_frame(
    cfg: &SimConfig,
    ctx: &FrameContext,
    frame_index: u64,
    params: &ChannelParams,
    sigma_w_sq: f64,
    sigma_u_sq: f64,
) -> Result<FrameResult> {
    let mut data_stream = RngStream::new(cfg.master_seed, frame_index, StreamRole::Data);
    let data = data_stream.bits(cfg.frame_bits);
    let symbols = turbo::encode(&data, &ctx.trellis, &ctx.interleaver)?;

    let mut chan = RngStream::new(cfg.master_seed, frame_index, StreamRole::Channel);
    let mut obs = Vec::with_capacity(symbols.len());
    for slot in symbols.chunks(cfg.n) {
        let mut per_k = Vec::with_capacity(cfg.n_rt);
        for k in 0..cfg.n_rt {
            let real = channel::draw_realization(params, sigma_w_sq, &mut chan, k)?;
            let received = channel::transmit(&real, slot)?;
            per_k.push(combiner::matched_filter(&real, &received)?);
        }
        obs.extend(combiner::combine(&per_k, cfg.n_rt)?);
    }

    let frame = SoftFrame { obs, sigma_u_sq };
    let decoded = bcjr::decode(&frame, &ctx.trellis, &ctx.interleaver, cfg.turbo_iterations)?;
    let bit_errors = data
        .iter()
        .zip(&decoded.bits)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(FrameResult {
        data_bits: data,
        decoded_bits: decoded.bits,
        bit_errors,
    })
}

fn with_replay_diagnostics<T>(result: Result<T>, seed: u64, frame_index: u64) -> Result<T> {
    result.map_err(|e| match e {
        Error::Degeneracy(msg) => Error::Degeneracy(format!(
            "frame aborted (master_seed = {seed}, frame_index = {frame_index}): {msg}"
        )),
        other => other,
    })
}

/// Simulates one frame at the given SNR point and returns its bit error
/// count. Deterministic in `(cfg.master_seed, frame_index)`.
pub fn run_frame(cfg: &SimConfig, snr_db: f64, frame_index: u64) -> Result<u64> {
    Ok(run_frame_full(cfg, snr_db, frame_index)?.bit_errors)
}

/// Like [`run_frame`] but keeps the transmitted and decoded bits.
pub fn run_frame_full(cfg: &SimConfig, snr_db: f64, frame_index: u64) -> Result<FrameResult> {
    run_frame_scaled(cfg, snr_db, frame_index, DEFAULT_SIGMA_H_SQ)
}

/// [`run_frame_full`] with an explicit fading variance. The noise variance is
/// re-calibrated to the same SNR per bit, so the Gaussian draws scale with
/// the variances and hard decisions are invariant to the choice.
pub fn run_frame_scaled(
    cfg: &SimConfig,
    snr_db: f64,
    frame_index: u64,
    sigma_h_sq: f64,
) -> Result<FrameResult> {
    cfg.validate()?;
    let ctx = FrameContext::new(cfg)?;
    let params = ChannelParams::new(cfg.n, cfg.n_rt, sigma_h_sq, snr_db)?;
    let sigma_w_sq = channel::noise_variance_from_snr(&params);
    let sigma_u_sq = combiner::sigma_u_sq(&params);
    with_replay_diagnostics(
        simulate_frame(cfg, &ctx, frame_index, &params, sigma_w_sq, sigma_u_sq),
        cfg.master_seed,
        frame_index,
    )
}

/// [`run_frame_full`] with every variance pinned by the caller; used to force
/// noise-free channels and other diagnostic operating points.
pub fn run_frame_with_variances(
    cfg: &SimConfig,
    snr_db: f64,
    frame_index: u64,
    sigma_w_sq: f64,
    sigma_u_sq: f64,
) -> Result<FrameResult> {
    cfg.validate()?;
    let ctx = FrameContext::new(cfg)?;
    let params = ChannelParams::new(cfg.n, cfg.n_rt, DEFAULT_SIGMA_H_SQ, snr_db)?;
    with_replay_diagnostics(
        simulate_frame(cfg, &ctx, frame_index, &params, sigma_w_sq, sigma_u_sq),
        cfg.master_seed,
        frame_index,
    )
}

/// Aggregated Monte Carlo result at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub n: usize,
    pub n_rt: usize,
    pub code: CodeId,
    pub frame_bits: usize,
    pub iterations: usize,
    pub frames_run: u64,
    pub bits_simulated: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub wall_seconds: f64,
}

/// Sweeps every SNR point in the configuration using the default thread pool.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    run_sweep_with_workers(cfg, 0)
}

/// Sweeps with an explicit worker count (`0` uses the rayon default). The
/// returned records are identical for every worker count; only
/// `wall_seconds` reflects the actual run.
pub fn run_sweep_with_workers(cfg: &SimConfig, workers: usize) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let ctx = FrameContext::new(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let mut records = Vec::with_capacity(cfg.snr_db_list.len());
    for &snr_db in &cfg.snr_db_list {
        let started = Instant::now();
        let params = ChannelParams::new(cfg.n, cfg.n_rt, DEFAULT_SIGMA_H_SQ, snr_db)?;
        let sigma_w_sq = channel::noise_variance_from_snr(&params);
        let sigma_u_sq = combiner::sigma_u_sq(&params);

        let mut frames_run = 0u64;
        let mut bit_errors = 0u64;
        while frames_run < cfg.max_frames {
            let batch = STOP_CHECK_BATCH.min(cfg.max_frames - frames_run);
            let batch_errors = pool.install(|| {
                (frames_run..frames_run + batch)
                    .into_par_iter()
                    .map(|frame_index| {
                        with_replay_diagnostics(
                            simulate_frame(
                                cfg,
                                &ctx,
                                frame_index,
                                &params,
                                sigma_w_sq,
                                sigma_u_sq,
                            ),
                            cfg.master_seed,
                            frame_index,
                        )
                        .map(|r| r.bit_errors)
                    })
                    .try_reduce(|| 0u64, |a, b| Ok(a + b))
            })?;
            frames_run += batch;
            bit_errors += batch_errors;
            if bit_errors >= cfg.min_bit_errors {
                break;
            }
        }

        let bits_simulated = frames_run * cfg.frame_bits as u64;
        records.push(BerRecord {
            snr_db,
            n: cfg.n,
            n_rt: cfg.n_rt,
            code: cfg.code,
            frame_bits: cfg.frame_bits,
            iterations: cfg.turbo_iterations,
            frames_run,
            bits_simulated,
            bit_errors,
            ber: bit_errors as f64 / bits_simulated as f64,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}
