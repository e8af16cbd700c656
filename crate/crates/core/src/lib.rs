//! Link-level Monte Carlo simulator for single-user massive MIMO with
//! re-transmission combining and turbo coding.
//!
//! The transmit side encodes each data frame with two recursive systematic
//! convolutional encoders (natural and interleaved order) onto QPSK symbols
//! and sends every N-symbol vector `N_rt` times through independent
//! block-fading channels. The receiver matched-filters each re-transmission,
//! averages, and hands the per-symbol scalar observations to an iterative
//! probability-domain BCJR decoder with the closed-form interference-plus-
//! noise variance. A deterministic parallel harness sweeps SNR-per-bit
//! operating points and reports BER records as CSV.

pub mod bcjr;
pub mod capacity;
pub mod channel;
pub mod combiner;
pub mod error;
pub mod io;
pub mod numerics;
pub mod sim;
pub mod turbo;

pub use num_complex::Complex64;

pub use bcjr::{DecodeOutput, SoftFrame};
pub use channel::{ChannelParams, ChannelRealization};
pub use combiner::CombinedObservation;
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, RngStream, StreamRole};
pub use sim::{BerRecord, CodeId, SimConfig};
pub use turbo::{Interleaver, RscCode, Trellis};
