//! Joint estimation and removal of the phase shared by two channels.
//!
//! Each channel contributes its per-symbol phase `phi_j` with weight
//! `w_j = exp(-kappa |phi_j|)`:
//!
//! ```text
//! phi_est = (w1 phi1 + w2 phi2) / (w1 + w2)
//! ```
//!
//! A symbol pushed towards a decision boundary by its own additive noise
//! shows a large phase magnitude and is trusted less. For `kappa -> inf`
//! the estimate is simply the phase of smaller magnitude. Both channels are
//! then derotated by `phi_est`, which leaves a residual data rotation of
//! `phi_common - phi_est` and turns the additive noise without changing its
//! magnitude.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpe::{extract_phase, wrap_quarter, CpeError, PhaseTrace, VvConfig};

#[derive(Debug, Error, PartialEq)]
pub enum JointError {
    #[error("phase inputs must be finite (got {0}, {1})")]
    NonFinite(f64, f64),
    #[error("weighting factor kappa must be finite and >= 0, got {0}")]
    InvalidKappa(f64),
    #[error("stream lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Cpe(#[from] CpeError),
}

/// Ordering of carrier phase estimation and joint compensation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    /// Per-channel carrier phase estimation first, joint compensation on the
    /// residual phases afterwards.
    #[default]
    Cascaded,
    /// Per-symbol phases of both channels feed the joint estimator directly.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub kappa: f64,
    /// Border case `kappa -> inf`: pick the phase of minimum magnitude.
    pub kappa_infinite: bool,
    /// Subtract pi/2 from the estimate, for axis-aligned symbol definitions.
    pub subtract_half_pi: bool,
    pub pipeline: Pipeline,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { kappa: 0.0, kappa_infinite: true, subtract_half_pi: false, pipeline: Pipeline::Cascaded }
    }
}

impl EstimatorConfig {
    pub fn finite(kappa: f64) -> Self {
        Self { kappa, kappa_infinite: false, ..Default::default() }
    }

    pub fn infinite() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), JointError> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(JointError::InvalidKappa(self.kappa));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonPhaseEstimate {
    pub value: f64,
    /// `exp(-kappa |phi_j|)`; may underflow to zero for large `kappa`.
    /// In the infinite mode the chosen channel has weight 1, the other 0.
    pub weights: (f64, f64),
}

pub fn estimate_common_phase(phi1: f64, phi2: f64, cfg: &EstimatorConfig) -> Result<CommonPhaseEstimate, JointError> {
    if !(phi1.is_finite() && phi2.is_finite()) {
        return Err(JointError::NonFinite(phi1, phi2));
    }
    cfg.validate()?;
    let mut est = if cfg.kappa_infinite {
        if phi1.abs() <= phi2.abs() {
            CommonPhaseEstimate { value: phi1, weights: (1.0, 0.0) }
        } else {
            CommonPhaseEstimate { value: phi2, weights: (0.0, 1.0) }
        }
    } else {
        weighted(phi1, phi2, cfg.kappa)
    };
    if cfg.subtract_half_pi {
        est.value -= FRAC_PI_2;
    }
    Ok(est)
}

fn weighted(phi1: f64, phi2: f64, kappa: f64) -> CommonPhaseEstimate {
    let (a1, a2) = (phi1.abs(), phi2.abs());
    // Scaling both weights by exp(kappa * min|phi|) leaves the ratio intact
    // and keeps the larger one at 1, so nothing underflows to 0/0.
    let floor = a1.min(a2);
    let (s1, s2) = ((-kappa * (a1 - floor)).exp(), (-kappa * (a2 - floor)).exp());
    let value = ((s1 * phi1 + s2 * phi2) / (s1 + s2)).clamp(phi1.min(phi2), phi1.max(phi2));
    CommonPhaseEstimate { value, weights: ((-kappa * a1).exp(), (-kappa * a2).exp()) }
}

/// Per-symbol estimates for two phase traces.
pub fn estimate_trace(t1: &PhaseTrace, t2: &PhaseTrace, cfg: &EstimatorConfig) -> Result<Vec<f64>, JointError> {
    if t1.len() != t2.len() {
        return Err(JointError::LengthMismatch(t1.len(), t2.len()));
    }
    t1.values
        .iter()
        .zip(&t2.values)
        .map(|(&a, &b)| estimate_common_phase(a, b, cfg).map(|e| e.value))
        .collect()
}

/// `out[n] = rx[n] * exp(-i estimates[n])`.
pub fn apply_compensation(rx: &[Complex64], estimates: &[f64]) -> Result<Vec<Complex64>, JointError> {
    if rx.len() != estimates.len() {
        return Err(JointError::LengthMismatch(rx.len(), estimates.len()));
    }
    Ok(rx
        .iter()
        .zip(estimates)
        .map(|(&z, &phi)| if phi == 0.0 { z } else { z * Complex64::cis(-phi) })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompensatedPair {
    pub out1: Vec<Complex64>,
    pub out2: Vec<Complex64>,
    /// Total phase removed from each symbol (identical for both channels
    /// unless the cascaded carrier phase stage removed different means).
    pub removed1: Vec<f64>,
    pub removed2: Vec<f64>,
}

/// Runs carrier phase extraction and joint compensation over two aligned
/// streams.
///
/// Cascaded: each channel is first derotated by the block mean of its own
/// extracted phase when `vv.remove_mean` is set; the residual traces then
/// drive the joint estimate. Combined: the raw extracted traces drive the
/// joint estimate in one stage and `remove_mean` is ignored. With
/// `remove_mean` unset the two orderings are identical.
pub fn compensate_pair(
    rx1: &[Complex64],
    rx2: &[Complex64],
    vv: &VvConfig,
    cfg: &EstimatorConfig,
) -> Result<CompensatedPair, JointError> {
    if rx1.len() != rx2.len() {
        return Err(JointError::LengthMismatch(rx1.len(), rx2.len()));
    }
    cfg.validate()?;
    let t1 = extract_phase(rx1, vv)?;
    let t2 = extract_phase(rx2, vv)?;

    let (mean1, mean2) = match cfg.pipeline {
        Pipeline::Cascaded if vv.remove_mean => (t1.mean(), t2.mean()),
        _ => (0.0, 0.0),
    };
    let residual = |t: &PhaseTrace, mean: f64| {
        if mean == 0.0 {
            t.clone()
        } else {
            PhaseTrace { values: t.values.iter().map(|&x| wrap_quarter(x - mean)).collect() }
        }
    };
    let est = estimate_trace(&residual(&t1, mean1), &residual(&t2, mean2), cfg)?;
    let removed1: Vec<f64> = est.iter().map(|e| e + mean1).collect();
    let removed2: Vec<f64> = est.iter().map(|e| e + mean2).collect();
    Ok(CompensatedPair {
        out1: apply_compensation(rx1, &removed1)?,
        out2: apply_compensation(rx2, &removed2)?,
        removed1,
        removed2,
    })
}
