//! Viterbi & Viterbi carrier phase extraction for QPSK.
//!
//! Raising a sample to the fourth power strips the QPSK modulation. With
//! symbols at the quadrant centres, `(exp(i pi/4))^4 = -1`, so the
//! fourth-power value is negated before taking its angle; a noiseless,
//! unrotated constellation then extracts to exactly zero.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CpeError {
    #[error("cannot extract a phase from an empty stream")]
    Empty,
    #[error("averaging window must be odd and >= 1, got {0}")]
    InvalidWindow(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VvConfig {
    /// Length of the centred moving average over fourth-power values.
    pub window: usize,
    /// Remove the block mean of the extracted phase (slow carrier phase).
    pub remove_mean: bool,
}

impl Default for VvConfig {
    fn default() -> Self {
        Self { window: 33, remove_mean: true }
    }
}

impl VvConfig {
    pub fn per_symbol() -> Self {
        Self { window: 1, remove_mean: false }
    }

    pub fn validate(&self) -> Result<(), CpeError> {
        if self.window == 0 || self.window % 2 == 0 {
            return Err(CpeError::InvalidWindow(self.window));
        }
        Ok(())
    }
}

/// Per-symbol phase in `(-pi/4, pi/4]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseTrace {
    pub values: Vec<f64>,
}

impl PhaseTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }
}

/// Values this close to `-pi/4` are taken to lie on the boundary.
const BOUNDARY_EPS: f64 = 1e-12;

/// Wraps a phase into `(-pi/4, pi/4]`, the ambiguity interval of QPSK.
pub fn wrap_quarter(x: f64) -> f64 {
    let mut w = x - FRAC_PI_2 * ((x - FRAC_PI_4) / FRAC_PI_2).ceil();
    if w <= -FRAC_PI_4 + BOUNDARY_EPS {
        w += FRAC_PI_2;
    }
    w
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VvDiagnostics {
    /// Symbols whose averaged fourth power was exactly zero; their phase is 0.
    pub zero_windows: usize,
}

pub fn extract_phase(samples: &[Complex64], cfg: &VvConfig) -> Result<PhaseTrace, CpeError> {
    extract_phase_with_diagnostics(samples, cfg).map(|(t, _)| t)
}

pub fn extract_phase_with_diagnostics(
    samples: &[Complex64],
    cfg: &VvConfig,
) -> Result<(PhaseTrace, VvDiagnostics), CpeError> {
    if samples.is_empty() {
        return Err(CpeError::Empty);
    }
    cfg.validate()?;

    let fourth: Vec<Complex64> = samples.iter().map(|z| -z.powi(4)).collect();
    let half = cfg.window / 2;
    let last = fourth.len() - 1;
    let mut diag = VvDiagnostics::default();
    let values = (0..fourth.len())
        .map(|n| {
            let acc: Complex64 = if half == 0 {
                fourth[n]
            } else {
                fourth[n.saturating_sub(half)..=(n + half).min(last)].iter().sum()
            };
            if acc.re == 0.0 && acc.im == 0.0 {
                diag.zero_windows += 1;
                0.0
            } else {
                wrap_quarter(acc.arg() / 4.0)
            }
        })
        .collect();
    Ok((PhaseTrace { values }, diag))
}

/// Subtracts the block mean from a trace and re-wraps.
pub fn remove_mean_phase(trace: &PhaseTrace) -> PhaseTrace {
    let mean = trace.mean();
    PhaseTrace { values: trace.values.iter().map(|&x| wrap_quarter(x - mean)).collect() }
}

/// Conventional per-channel carrier phase correction.
///
/// With `remove_mean` set the block mean of the extracted phase is removed
/// from every sample; otherwise each sample is derotated by its own
/// windowed estimate.
pub fn correct_carrier_phase(samples: &[Complex64], cfg: &VvConfig) -> Result<Vec<Complex64>, CpeError> {
    let trace = extract_phase(samples, cfg)?;
    if cfg.remove_mean {
        let rot = Complex64::cis(-trace.mean());
        Ok(samples.iter().map(|z| z * rot).collect())
    } else {
        Ok(samples.iter().zip(&trace.values).map(|(z, &p)| z * Complex64::cis(-p)).collect())
    }
}
