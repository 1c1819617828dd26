//! Paired Monte Carlo trials.
//!
//! One trial draws two independent payloads, passes them through the shared
//! channel realisation, recovers the inter-channel lag, and then decides the
//! symbols twice: once after conventional per-channel carrier phase
//! correction (the baseline) and once after joint compensation. Both arms
//! see exactly the same noise, so their difference carries no Monte Carlo
//! variance from the channel draw.

mod case;
mod emit;
mod stats;
mod sweep;

pub use case::{classify_case, CaseHistogram, CaseLabel, ConstellationCase};
pub use emit::{emit, read_csv, write_csv, write_efficiency_csv, write_json, CsvRow, Format, CSV_HEADER};
pub use stats::{wilson_interval, Interval, Z_95};
pub use sweep::{grid_points, run_sweep, run_sweep_in_dir, SweepConfig, SweepGrid, SweepPoint};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{align, estimate_delay, AlignError};
use crate::channel::{apply_channel, ChannelError, ChannelParams};
use crate::cpe::{correct_carrier_phase, extract_phase, CpeError, VvConfig};
use crate::joint::{compensate_pair, EstimatorConfig, JointError};
use crate::qpsk::{bits_quadrant, count_errors, decide_quadrant, demap_symbols, map_symbols, quadrant_bits, BitStream, Quadrant, QpskError};
use crate::rng::{stream_rng, Stream};
use crate::Complex64;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("quadrant index {0} out of range 0..4")]
    InvalidQuadrant(u8),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Cpe(#[from] CpeError),
    #[error(transparent)]
    Joint(#[from] JointError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Qpsk(#[from] QpskError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {reason}")]
    Parse { path: String, reason: String },
}

impl HarnessError {
    /// Whether the error stems from the configuration rather than from
    /// running it.
    pub fn is_config(&self) -> bool {
        match self {
            HarnessError::Config { .. } | HarnessError::InvalidQuadrant(_) | HarnessError::Qpsk(_) => true,
            HarnessError::Channel(ChannelError::InvalidParam { .. }) => true,
            HarnessError::Cpe(CpeError::InvalidWindow(_)) => true,
            HarnessError::Joint(JointError::InvalidKappa(_)) => true,
            _ => false,
        }
    }

    fn config(field: &str, reason: impl Into<String>) -> Self {
        HarnessError::Config { field: field.to_string(), reason: reason.into() }
    }
}

/// Symbol count below which error statistics are not meaningful.
pub const MIN_STATISTICAL_SYMBOLS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    pub n_symbols: usize,
    pub channel: ChannelParams,
    pub vv: VvConfig,
    pub estimator: EstimatorConfig,
    /// Also run the conventional per-channel correction arm.
    pub compare_baseline: bool,
    /// Largest inter-channel lag searched for; 0 disables the search.
    pub max_lag: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            n_symbols: 100_000,
            channel: ChannelParams::default(),
            // Per-symbol phases: the pump-induced phase changes from symbol
            // to symbol and a long window would average it away.
            vv: VvConfig { window: 1, remove_mean: true },
            estimator: EstimatorConfig::default(),
            compare_baseline: true,
            max_lag: 16,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_symbols == 0 {
            return Err(HarnessError::config("n_symbols", "must be >= 1"));
        }
        if self.max_lag > 0 && self.n_symbols <= 2 * self.max_lag {
            return Err(HarnessError::config(
                "max_lag",
                format!("2 * {} must be smaller than n_symbols = {}", self.max_lag, self.n_symbols),
            ));
        }
        if self.channel.delay_offset.unsigned_abs() >= self.n_symbols as u64 {
            return Err(HarnessError::config("channel.delay_offset", "must be smaller than n_symbols in magnitude"));
        }
        self.channel.validate()?;
        self.vv.validate()?;
        self.estimator.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    /// Bit errors on channel 1 and channel 2.
    pub errors: [u64; 2],
    pub ber: f64,
    pub ci: Interval,
}

impl ArmStats {
    fn new(errors: [u64; 2], bits: u64) -> Self {
        let total = errors[0] + errors[1];
        let ber = if bits == 0 { 0.0 } else { total as f64 / bits as f64 };
        Self { errors, ber, ci: wilson_interval(total, bits) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub seed: u64,
    /// Symbols per channel inside the valid (aligned) region.
    pub symbols: u64,
    /// Bits per arm, both channels together.
    pub bits: u64,
    /// Lag applied to channel 2 before compensation.
    pub lag: i64,
    pub lag_confident: bool,
    pub ber_uncompensated: Option<f64>,
    pub ber_compensated: f64,
    pub uncompensated: Option<ArmStats>,
    pub compensated: ArmStats,
    pub case_histogram: CaseHistogram,
    pub config: TrialConfig,
}

fn random_bits(n_bits: usize, seed: u64, stream: Stream) -> BitStream {
    let mut rng = stream_rng(seed, stream);
    let mut bits = Vec::with_capacity(n_bits);
    while bits.len() < n_bits {
        let word: u64 = rng.gen();
        bits.extend((0..64).map(|i| ((word >> i) & 1) as u8).take(n_bits - bits.len()));
    }
    BitStream::new(bits).expect("bit count is even")
}

fn quadrants(bits: &BitStream) -> Vec<Quadrant> {
    bits.bits().chunks_exact(2).map(|p| bits_quadrant([p[0], p[1]])).collect()
}

fn bits_of(quadrants: &[Quadrant]) -> BitStream {
    BitStream::new(quadrants.iter().flat_map(|&q| quadrant_bits(q)).collect()).expect("two bits per quadrant")
}

fn arm_errors(tx1: &BitStream, tx2: &BitStream, out1: &[Complex64], out2: &[Complex64]) -> Result<[u64; 2], HarnessError> {
    Ok([count_errors(tx1, &demap_symbols(out1))?.errors, count_errors(tx2, &demap_symbols(out2))?.errors])
}

pub fn run_trial(cfg: &TrialConfig) -> Result<BerReport, HarnessError> {
    cfg.validate()?;
    let n = cfg.n_symbols;
    let seed = cfg.channel.seed;

    let bits1 = random_bits(2 * n, seed, Stream::Payload1);
    let bits2 = random_bits(2 * n, seed, Stream::Payload2);
    let tx1 = map_symbols(&bits1);
    let tx2 = map_symbols(&bits2);
    let received = apply_channel(&tx1, &tx2, &cfg.channel)?;

    let (lag, lag_confident) = if cfg.max_lag > 0 {
        let per_symbol = VvConfig::per_symbol();
        let t1 = extract_phase(&received.rx1, &per_symbol)?;
        let t2 = extract_phase(&received.rx2, &per_symbol)?;
        let found = estimate_delay(&t1, &t2, cfg.max_lag)?;
        if found.confident {
            (found.lag, true)
        } else {
            (0, false)
        }
    } else {
        (0, false)
    };
    let aligned = align(&received.rx2, lag)?;
    let valid = aligned.valid.clone();

    // Aligned channel-2 position m holds the symbol sent at m + lag - delay.
    let q1 = quadrants(&bits1);
    let q2 = quadrants(&bits2);
    let shift = lag - cfg.channel.delay_offset;
    let tx_q1: Vec<Quadrant> = q1[valid.clone()].to_vec();
    let tx_q2: Vec<Quadrant> = valid.clone().map(|m| q2[(m as i64 + shift).rem_euclid(n as i64) as usize]).collect();
    let ref1 = bits_of(&tx_q1);
    let ref2 = bits_of(&tx_q2);

    let rx1 = &received.rx1[valid.clone()];
    let rx2 = aligned.valid_samples();
    let symbols = rx1.len() as u64;
    let bits = 4 * symbols;

    let joint = compensate_pair(rx1, rx2, &cfg.vv, &cfg.estimator)?;
    let compensated = ArmStats::new(arm_errors(&ref1, &ref2, &joint.out1, &joint.out2)?, bits);

    let uncompensated = if cfg.compare_baseline {
        let b1 = correct_carrier_phase(rx1, &cfg.vv)?;
        let b2 = correct_carrier_phase(rx2, &cfg.vv)?;
        Some(ArmStats::new(arm_errors(&ref1, &ref2, &b1, &b2)?, bits))
    } else {
        None
    };

    let mut case_histogram = CaseHistogram::default();
    for i in 0..rx1.len() {
        let label = classify_case(
            [tx_q1[i], tx_q2[i]],
            [decide_quadrant(rx1[i]), decide_quadrant(rx2[i])],
            [decide_quadrant(joint.out1[i]), decide_quadrant(joint.out2[i])],
        )?;
        case_histogram.add(label.case);
    }

    Ok(BerReport {
        seed,
        symbols,
        bits,
        lag,
        lag_confident,
        ber_uncompensated: uncompensated.map(|a| a.ber),
        ber_compensated: compensated.ber,
        uncompensated,
        compensated,
        case_histogram,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PhaseModel;

    fn small(channel: ChannelParams) -> TrialConfig {
        TrialConfig { n_symbols: 20_000, channel, ..Default::default() }
    }

    #[test]
    fn noiseless_trial_is_error_free() {
        let r = run_trial(&small(ChannelParams::default())).unwrap();
        assert_eq!(r.ber_compensated, 0.0);
        assert_eq!(r.ber_uncompensated, Some(0.0));
        assert_eq!(r.case_histogram.no_correction_required, r.symbols);
        assert_eq!(r.symbols, 20_000);
    }

    #[test]
    fn deterministic() {
        let cfg = small(ChannelParams { sigma_common: 0.3, sigma_additive: 0.15, seed: 42, ..Default::default() });
        assert_eq!(run_trial(&cfg).unwrap(), run_trial(&cfg).unwrap());
    }

    #[test]
    fn histogram_covers_valid_region() {
        let cfg = small(ChannelParams { sigma_common: 0.3, sigma_additive: 0.15, delay_offset: 4, seed: 8, ..Default::default() });
        let r = run_trial(&cfg).unwrap();
        assert_eq!(r.lag, 4);
        assert!(r.lag_confident);
        assert_eq!(r.symbols, 20_000 - 4);
        assert_eq!(r.case_histogram.total(), r.symbols);
    }

    #[test]
    fn misaligned_reference_still_counts_correctly() {
        // No common phase: the lag cannot be found, but without noise the
        // bookkeeping must still report zero errors.
        let cfg = small(ChannelParams { delay_offset: -3, ..Default::default() });
        let r = run_trial(&cfg).unwrap();
        assert!(!r.lag_confident);
        assert_eq!(r.ber_compensated, 0.0);
        assert_eq!(r.ber_uncompensated, Some(0.0));
    }

    #[test]
    fn baseline_optional() {
        let cfg = TrialConfig { compare_baseline: false, ..small(ChannelParams::default()) };
        let r = run_trial(&cfg).unwrap();
        assert!(r.uncompensated.is_none() && r.ber_uncompensated.is_none());
    }

    #[test]
    fn shaped_model_runs() {
        let cfg = small(ChannelParams {
            sigma_common: 0.2,
            sigma_additive: 0.12,
            phase_model: PhaseModel::Shaped,
            ..Default::default()
        });
        let r = run_trial(&cfg).unwrap();
        assert!(r.ber_compensated <= 1.0);
    }

    #[test]
    fn validation_names_fields() {
        let err = run_trial(&TrialConfig { n_symbols: 0, ..Default::default() }).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("n_symbols"));
        let err = run_trial(&TrialConfig { n_symbols: 20, ..Default::default() }).unwrap_err();
        assert!(err.to_string().contains("max_lag"));
        let bad_sigma = small(ChannelParams { sigma_common: -1.0, ..Default::default() });
        let err = run_trial(&bad_sigma).unwrap_err();
        assert!(err.is_config() && err.to_string().contains("sigma_common"));
    }
}
