//! Joint compensation of pump-induced common phase noise for two
//! copropagating coherent QPSK channels.
//!
//! High-power codirectional Raman pumps imprint their intensity noise on
//! every copropagating signal through cross-phase modulation. Because the
//! resulting phase shift is (nearly) the same for neighbouring channels, a
//! receiver that sees both channels can estimate the shared rotation from
//! the two per-symbol phases and remove it from both.
//!
//! The crate is organised bottom-up:
//!
//! * [`qpsk`]: Gray-mapped QPSK symbols, quadrant decisions, bit error counts.
//! * [`channel`]: the two-channel received-signal model (shared phase plus
//!   independent additive noise) and the pump-to-phase conversion curve.
//! * [`cpe`]: Viterbi & Viterbi fourth-power phase extraction.
//! * [`joint`]: the weighted common-phase estimator and its application.
//! * [`alignment`]: inter-channel delay recovery and the weighting-factor
//!   control loop.
//! * [`harness`]: paired Monte Carlo trials, the four-case classifier,
//!   sweeps and CSV/JSON emission.
//!
//! Runnable walkthroughs for each capability live in the crate's
//! `examples/` directory.

pub mod alignment;
pub mod channel;
pub mod cpe;
pub mod harness;
pub mod joint;
pub mod qpsk;
pub mod rng;

pub use num_complex::Complex64;

/// Complex envelope samples, one per symbol.
pub type SampleStream = Vec<Complex64>;

pub use alignment::{adapt_kappa, align, estimate_delay, AlignedStream, AlignmentResult, KappaSearchResult};
pub use channel::{apply_channel, conversion_efficiency, gen_common_phase, ChannelParams, PhaseModel, PhaseProcess};
pub use cpe::{extract_phase, remove_mean_phase, PhaseTrace, VvConfig};
pub use harness::{classify_case, run_sweep, run_trial, BerReport, CaseLabel, SweepGrid, TrialConfig};
pub use joint::{apply_compensation, compensate_pair, estimate_common_phase, CommonPhaseEstimate, EstimatorConfig, Pipeline};
pub use qpsk::{count_errors, demap_symbols, map_symbols, BitStream, ErrorCount, SymbolStream};
