//! Inter-channel alignment and closed-loop tuning of the weighting factor.
//!
//! The joint estimator needs both channels to look at the same pump
//! fluctuation at the same symbol index. A channel that arrives early has to
//! be buffered by the lag found between the two phase traces. The weighting
//! factor `kappa` is tuned by a golden-section search over a measured bit
//! error ratio.

use std::ops::Range;

use num_complex::Complex64;
use thiserror::Error;

use crate::cpe::PhaseTrace;

#[derive(Debug, Error, PartialEq)]
pub enum AlignError {
    #[error("traces differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("traces of length {len} are too short for max_lag {max_lag}")]
    TooShort { len: usize, max_lag: usize },
    #[error("lag {lag} does not fit a stream of length {len}")]
    LagTooLarge { lag: i64, len: usize },
    #[error("invalid search interval [{lo}, {hi}] with tolerance {tol}")]
    InvalidInterval { lo: f64, hi: f64, tol: f64 },
    #[error("objective returned non-finite value {value} at kappa = {kappa}")]
    NonFiniteObjective { kappa: f64, value: f64 },
}

/// Minimum peak correlation for a lag estimate to be trusted.
pub const CONFIDENCE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentResult {
    /// How many symbols trace 2 lags behind trace 1.
    pub lag: i64,
    pub peak_correlation: f64,
    pub confident: bool,
}

/// Finds the lag `L` in `[-max_lag, max_lag]` maximising the normalised
/// cross-correlation `sum_n t1[n] t2[n + L]`.
///
/// A trace delayed by `d` symbols (`t2[n] = t1[n - d]`) yields `L = d`.
/// Ties prefer the smaller `|L|`, then the negative lag.
pub fn estimate_delay(trace1: &PhaseTrace, trace2: &PhaseTrace, max_lag: usize) -> Result<AlignmentResult, AlignError> {
    let (a, b) = (&trace1.values, &trace2.values);
    if a.len() != b.len() {
        return Err(AlignError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() <= 2 * max_lag {
        return Err(AlignError::TooShort { len: a.len(), max_lag });
    }

    let mut best = AlignmentResult { lag: 0, peak_correlation: f64::NEG_INFINITY, confident: false };
    let lags = std::iter::once(0).chain((1..=max_lag as i64).flat_map(|l| [-l, l]));
    for lag in lags {
        let c = correlation_at(a, b, lag);
        if c > best.peak_correlation {
            best.lag = lag;
            best.peak_correlation = c;
        }
    }
    if !best.peak_correlation.is_finite() {
        best.peak_correlation = 0.0;
        best.lag = 0;
    }
    best.confident = best.peak_correlation >= CONFIDENCE_THRESHOLD;
    Ok(best)
}

/// Pearson correlation of `a[n]` and `b[n + lag]` over their overlap.
fn correlation_at(a: &[f64], b: &[f64], lag: i64) -> f64 {
    let n = a.len();
    let shift = lag.unsigned_abs() as usize;
    let (x, y) = if lag >= 0 { (&a[..n - shift], &b[shift..]) } else { (&a[shift..], &b[..n - shift]) };
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&u, &v) in x.iter().zip(y) {
        let (du, dv) = (u - mx, v - my);
        sxy += du * dv;
        sxx += du * du;
        syy += dv * dv;
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// A stream shifted by an integer lag. Samples outside `valid` are padding.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedStream {
    pub samples: Vec<Complex64>,
    pub valid: Range<usize>,
}

impl AlignedStream {
    pub fn valid_samples(&self) -> &[Complex64] {
        &self.samples[self.valid.clone()]
    }
}

/// `out[n] = rx[n + lag]`; positions without a source sample are zero and
/// fall outside `valid`.
pub fn align(rx: &[Complex64], lag: i64) -> Result<AlignedStream, AlignError> {
    let len = rx.len();
    let shift = lag.unsigned_abs() as usize;
    if lag.unsigned_abs() >= len as u64 {
        return Err(AlignError::LagTooLarge { lag, len });
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); len];
    let valid = if lag >= 0 {
        samples[..len - shift].copy_from_slice(&rx[shift..]);
        0..len - shift
    } else {
        samples[shift..].copy_from_slice(&rx[..len - shift]);
        shift..len
    };
    Ok(AlignedStream { samples, valid })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaSearchResult {
    pub kappa_opt: f64,
    pub ber_at_opt: f64,
    pub evaluations: usize,
    /// Every evaluation returned the same value; `kappa_opt` is the midpoint.
    pub non_improving: bool,
    /// The best point seen fell outside the final bracket, so the objective
    /// is not unimodal on the interval.
    pub unimodality_violated: bool,
}

/// Golden-section minimisation of `evaluate` over `[lo, hi]`, stopping when
/// the bracket is narrower than `tol` and returning its midpoint.
pub fn adapt_kappa<F>(mut evaluate: F, lo: f64, hi: f64, tol: f64) -> Result<KappaSearchResult, AlignError>
where
    F: FnMut(f64) -> f64,
{
    if !(lo >= 0.0 && hi > lo && tol > 0.0 && hi.is_finite()) {
        return Err(AlignError::InvalidInterval { lo, hi, tol });
    }
    let mut seen: Vec<(f64, f64)> = Vec::new();
    let mut eval = |seen: &mut Vec<(f64, f64)>, k: f64| -> Result<f64, AlignError> {
        let v = evaluate(k);
        if !v.is_finite() {
            return Err(AlignError::NonFiniteObjective { kappa: k, value: v });
        }
        seen.push((k, v));
        Ok(v)
    };

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(&mut seen, c)?;
    let mut fd = eval(&mut seen, d)?;
    loop {
        if fc <= fd {
            b = d;
            if b - a < tol {
                break;
            }
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(&mut seen, c)?;
        } else {
            a = c;
            if b - a < tol {
                break;
            }
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(&mut seen, d)?;
        }
    }

    let flat = seen.iter().all(|&(_, v)| v == seen[0].1);
    let kappa_opt = if flat { 0.5 * (lo + hi) } else { 0.5 * (a + b) };
    let (best_k, best_v) = seen.iter().copied().fold((f64::NAN, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
    let ber_at_opt = eval(&mut seen, kappa_opt)?;
    let evaluations = seen.len();
    let unimodality_violated = !flat && best_v < ber_at_opt && !(a..=b).contains(&best_k);
    Ok(KappaSearchResult { kappa_opt, ber_at_opt, evaluations, non_improving: flat, unimodality_violated })
}
