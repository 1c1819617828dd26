//! Two-channel received-signal model.
//!
//! Both channels see the same pump-induced phase `phi[n]` and their own
//! circular complex Gaussian noise:
//!
//! ```text
//! y_j[n] = tx_j[n] * exp(i phi[n]) + n_I^(j)[n] + i n_Q^(j)[n]
//! ```
//!
//! Channel 2 can additionally arrive `delay_offset` symbols late, which is
//! modelled as a circular shift of its whole received stream.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qpsk::SymbolStream;
use crate::rng::{stream_rng, Stream};
use crate::SampleStream;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("requested an empty phase process")]
    Empty,
    #[error("channel streams differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid channel parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseModel {
    /// Independent Gaussian phase per symbol.
    #[default]
    Iid,
    /// White noise shaped by the conversion efficiency curve and a
    /// first-order high-pass at `cpe_cutoff`.
    Shaped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Standard deviation of the common phase, rad.
    pub sigma_common: f64,
    /// Per-quadrature standard deviation of the additive noise.
    pub sigma_additive: f64,
    pub phase_model: PhaseModel,
    /// Pump attenuation, dB/km.
    pub alpha_db: f64,
    /// Difference of inverse group velocities of signal and pump, s/km.
    pub dbeta: f64,
    /// Corner of the high-pass left behind by carrier phase estimation, Hz.
    pub cpe_cutoff: f64,
    /// Baud.
    pub symbol_rate: f64,
    /// Lateness of channel 2, symbols.
    pub delay_offset: i64,
    pub seed: u64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            sigma_common: 0.0,
            sigma_additive: 0.0,
            phase_model: PhaseModel::Iid,
            alpha_db: 0.2,
            dbeta: 1e-9,
            cpe_cutoff: 1e6,
            symbol_rate: 32e9,
            delay_offset: 0,
            seed: 1,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |field, reason: &str| Err(ChannelError::InvalidParam { field, reason: reason.to_string() });
        if !(self.sigma_common >= 0.0 && self.sigma_common.is_finite()) {
            return bad("sigma_common", "must be finite and >= 0");
        }
        if !(self.sigma_additive >= 0.0 && self.sigma_additive.is_finite()) {
            return bad("sigma_additive", "must be finite and >= 0");
        }
        if !(self.alpha_db >= 0.0 && self.alpha_db.is_finite()) {
            return bad("alpha_db", "must be finite and >= 0");
        }
        if !self.dbeta.is_finite() {
            return bad("dbeta", "must be finite");
        }
        if self.phase_model == PhaseModel::Shaped {
            if !(self.cpe_cutoff > 0.0 && self.cpe_cutoff.is_finite()) {
                return bad("cpe_cutoff", "must be > 0 for the shaped phase model");
            }
            if !(self.symbol_rate > 0.0 && self.symbol_rate.is_finite()) {
                return bad("symbol_rate", "must be > 0 for the shaped phase model");
            }
        }
        Ok(())
    }
}

/// Relative efficiency of converting pump power fluctuations at angular
/// frequency `omega` (rad/s) into signal phase, in 1/km.
///
/// Returns `sqrt(alpha_np^2 + (dbeta * omega)^2)` with
/// `alpha_np = ln(10)/10 * alpha_db`. The physical efficiency is only
/// proportional to this value; the proportionality constant is taken as 1.
pub fn conversion_efficiency(omega: f64, alpha_db: f64, dbeta: f64) -> f64 {
    let alpha_np = LN_10 / 10.0 * alpha_db;
    alpha_np.hypot(dbeta * omega)
}

/// `points` samples of the efficiency curve on `[0, fmax]` Hz, as
/// `(freq_hz, efficiency)`.
pub fn efficiency_curve(alpha_db: f64, dbeta: f64, fmax: f64, points: usize) -> Vec<(f64, f64)> {
    let step = if points > 1 { fmax / (points - 1) as f64 } else { 0.0 };
    (0..points)
        .map(|i| {
            let f = i as f64 * step;
            (f, conversion_efficiency(2.0 * PI * f, alpha_db, dbeta))
        })
        .collect()
}

/// Magnitude response applied to the driving noise of the shaped phase
/// model at frequency `freq_hz`.
pub fn shaped_response(freq_hz: f64, params: &ChannelParams) -> f64 {
    let f = freq_hz.abs();
    let highpass = f / f.hypot(params.cpe_cutoff);
    conversion_efficiency(2.0 * PI * f, params.alpha_db, params.dbeta) * highpass
}

/// Frequency of FFT bin `k` out of `n` at sample rate `fs`.
pub fn bin_frequency(k: usize, n: usize, fs: f64) -> f64 {
    let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    k * fs / n as f64
}

/// Common phase `phi[n]`, one value per symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseProcess {
    pub values: Vec<f64>,
}

pub fn gen_common_phase(n: usize, params: &ChannelParams) -> Result<PhaseProcess, ChannelError> {
    if n == 0 {
        return Err(ChannelError::Empty);
    }
    params.validate()?;
    if params.sigma_common == 0.0 {
        return Ok(PhaseProcess { values: vec![0.0; n] });
    }
    let mut rng = stream_rng(params.seed, Stream::CommonPhase);
    let values = match params.phase_model {
        PhaseModel::Iid => (0..n)
            .map(|_| params.sigma_common * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        PhaseModel::Shaped => {
            let driving: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            shape(&driving, params)
        }
    };
    Ok(PhaseProcess { values })
}

fn shape(driving: &[f64], params: &ChannelParams) -> Vec<f64> {
    let n = driving.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = driving.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, x) in buf.iter_mut().enumerate() {
        *x *= shaped_response(bin_frequency(k, n, params.symbol_rate), params);
    }
    planner.plan_fft_inverse(n).process(&mut buf);

    // The response is real and even, so the imaginary part is rounding only.
    let mut out: Vec<f64> = buf.iter().map(|z| z.re / n as f64).collect();
    let mean = out.iter().sum::<f64>() / n as f64;
    let var = out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var > 0.0 {
        let scale = params.sigma_common / var.sqrt();
        out.iter_mut().for_each(|x| *x *= scale);
    } else {
        out.iter_mut().for_each(|x| *x = 0.0);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub rx1: SampleStream,
    pub rx2: SampleStream,
    /// The phase injected into both channels, indexed by channel-1 symbol.
    pub common_phase: PhaseProcess,
}

pub fn apply_channel(
    tx1: &SymbolStream,
    tx2: &SymbolStream,
    params: &ChannelParams,
) -> Result<ChannelOutput, ChannelError> {
    if tx1.len() != tx2.len() {
        return Err(ChannelError::LengthMismatch(tx1.len(), tx2.len()));
    }
    let phase = gen_common_phase(tx1.len(), params)?;
    apply_channel_with_phase(tx1.samples(), tx2.samples(), phase, params)
}

/// [`apply_channel`] with a caller-supplied common phase trace.
pub fn apply_channel_with_phase(
    tx1: &[Complex64],
    tx2: &[Complex64],
    common_phase: PhaseProcess,
    params: &ChannelParams,
) -> Result<ChannelOutput, ChannelError> {
    let n = tx1.len();
    if tx2.len() != n {
        return Err(ChannelError::LengthMismatch(n, tx2.len()));
    }
    if common_phase.values.len() != n {
        return Err(ChannelError::LengthMismatch(n, common_phase.values.len()));
    }
    params.validate()?;
    if n > 0 && params.delay_offset.unsigned_abs() >= n as u64 {
        return Err(ChannelError::InvalidParam {
            field: "delay_offset",
            reason: format!("|{}| must be smaller than the stream length {n}", params.delay_offset),
        });
    }

    let received = |tx: &[Complex64], stream| -> Vec<Complex64> {
        let mut rng = stream_rng(params.seed, stream);
        let sigma = params.sigma_additive;
        tx.iter()
            .zip(&common_phase.values)
            .map(|(&s, &phi)| {
                let rotated = if phi == 0.0 { s } else { s * Complex64::cis(phi) };
                if sigma == 0.0 {
                    rotated
                } else {
                    let ni: f64 = rng.sample(StandardNormal);
                    let nq: f64 = rng.sample(StandardNormal);
                    rotated + Complex64::new(sigma * ni, sigma * nq)
                }
            })
            .collect()
    };

    let rx1 = received(tx1, Stream::Noise1);
    let mut rx2 = received(tx2, Stream::Noise2);
    if n > 0 {
        let shift = params.delay_offset.rem_euclid(n as i64) as usize;
        rx2.rotate_right(shift);
    }
    Ok(ChannelOutput { rx1, rx2, common_phase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpsk::{map_symbols, BitStream};

    fn symbols(n: usize, offset: u8) -> SymbolStream {
        let q: Vec<u8> = (0..n).map(|i| ((i as u8).wrapping_mul(7).wrapping_add(offset)) % 4).collect();
        SymbolStream::from_quadrants(&q).unwrap()
    }

    #[test]
    fn efficiency_at_dc() {
        assert!((conversion_efficiency(0.0, 0.2, 1e-9) - 0.0460517).abs() < 1e-7);
        assert_eq!(conversion_efficiency(0.0, 0.0, 1e-9), 0.0);
        let flat = conversion_efficiency(0.0, 0.25, 0.0);
        for w in [1.0, 1e6, 1e12] {
            assert_eq!(conversion_efficiency(w, 0.25, 0.0), flat);
        }
    }

    #[test]
    fn efficiency_curve_spans_range() {
        let c = efficiency_curve(0.2, 1e-9, 1e9, 11);
        assert_eq!(c.len(), 11);
        assert_eq!(c[0].0, 0.0);
        assert!((c[10].0 - 1e9).abs() < 1e-3);
    }

    #[test]
    fn zero_length_rejected() {
        assert_eq!(gen_common_phase(0, &ChannelParams::default()), Err(ChannelError::Empty));
    }

    #[test]
    fn zero_sigma_gives_zero_trace() {
        for phase_model in [PhaseModel::Iid, PhaseModel::Shaped] {
            let p = ChannelParams { phase_model, ..Default::default() };
            assert!(gen_common_phase(1000, &p).unwrap().values.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn iid_phase_statistics() {
        let p = ChannelParams { sigma_common: 0.3, seed: 11, ..Default::default() };
        let v = gen_common_phase(1_000_000, &p).unwrap().values;
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 3.0 * 0.3 / n.sqrt());
        assert!((0.297..=0.303).contains(&std), "std {std}");
    }

    #[test]
    fn shaped_trace_has_requested_std_and_no_dc() {
        let p = ChannelParams {
            sigma_common: 0.25,
            phase_model: PhaseModel::Shaped,
            seed: 5,
            ..Default::default()
        };
        let v = gen_common_phase(4096, &p).unwrap().values;
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-12);
        assert!((std - 0.25).abs() < 1e-12);
    }

    #[test]
    fn shaped_requires_positive_cutoff() {
        let p = ChannelParams { phase_model: PhaseModel::Shaped, cpe_cutoff: 0.0, ..Default::default() };
        assert!(matches!(p.validate(), Err(ChannelError::InvalidParam { field: "cpe_cutoff", .. })));
    }

    #[test]
    fn identity_channel() {
        let tx = map_symbols(&BitStream::new(vec![0, 0, 0, 1, 1, 1, 1, 0]).unwrap());
        let out = apply_channel(&tx, &tx, &ChannelParams::default()).unwrap();
        assert_eq!(out.rx1, tx.samples());
        assert_eq!(out.rx2, tx.samples());
    }

    #[test]
    fn constant_phase_is_pure_rotation() {
        let (t1, t2) = (symbols(64, 0), symbols(64, 1));
        let phase = PhaseProcess { values: vec![0.5; 64] };
        let out = apply_channel_with_phase(t1.samples(), t2.samples(), phase, &ChannelParams::default()).unwrap();
        let rot = Complex64::cis(0.5);
        for (r, t) in out.rx1.iter().zip(t1.samples()).chain(out.rx2.iter().zip(t2.samples())) {
            assert!((r - t * rot).norm() < 1e-12);
        }
    }

    #[test]
    fn both_channels_share_the_phase() {
        let (t1, t2) = (symbols(5000, 0), symbols(5000, 2));
        let p = ChannelParams { sigma_common: 0.2, seed: 3, ..Default::default() };
        let out = apply_channel(&t1, &t2, &p).unwrap();
        let inj1: Vec<f64> = out.rx1.iter().zip(t1.samples()).map(|(r, t)| (r / t).arg()).collect();
        let inj2: Vec<f64> = out.rx2.iter().zip(t2.samples()).map(|(r, t)| (r / t).arg()).collect();
        for ((a, b), phi) in inj1.iter().zip(&inj2).zip(&out.common_phase.values) {
            assert!((a - phi).abs() < 1e-12);
            assert!((b - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn additive_noise_is_independent_across_channels() {
        let n = 200_000;
        let t = symbols(n, 0);
        let p = ChannelParams { sigma_additive: 0.1, seed: 9, ..Default::default() };
        let out = apply_channel(&t, &t, &p).unwrap();
        let e1: Vec<Complex64> = out.rx1.iter().zip(t.samples()).map(|(r, s)| r - s).collect();
        let e2: Vec<Complex64> = out.rx2.iter().zip(t.samples()).map(|(r, s)| r - s).collect();
        let corr = |a: &dyn Fn(&Complex64) -> f64, b: &dyn Fn(&Complex64) -> f64| {
            let xy: f64 = e1.iter().zip(&e2).map(|(x, y)| a(x) * b(y)).sum();
            let xx: f64 = e1.iter().map(|x| a(x).powi(2)).sum();
            let yy: f64 = e2.iter().map(|y| b(y).powi(2)).sum();
            xy / (xx * yy).sqrt()
        };
        let bound = 3.0 / (n as f64).sqrt();
        assert!(corr(&|z| z.re, &|z| z.re).abs() < bound);
        assert!(corr(&|z| z.im, &|z| z.im).abs() < bound);
        assert!(corr(&|z| z.re, &|z| z.im).abs() < bound);
        let own: f64 = e1.iter().map(|z| z.re * z.im).sum::<f64>() / e1.iter().map(|z| z.re * z.re).sum::<f64>();
        assert!(own.abs() < bound);
    }

    #[test]
    fn delay_shifts_channel_two() {
        let t = symbols(16, 0);
        let base = apply_channel(&t, &t, &ChannelParams::default()).unwrap();
        let late = apply_channel(&t, &t, &ChannelParams { delay_offset: 3, ..Default::default() }).unwrap();
        assert_eq!(late.rx1, base.rx1);
        for n in 0..16 {
            assert_eq!(late.rx2[(n + 3) % 16], base.rx2[n]);
        }
        let bad = ChannelParams { delay_offset: -16, ..Default::default() };
        assert!(apply_channel(&t, &t, &bad).is_err());
    }

    #[test]
    fn same_seed_same_output() {
        let t = symbols(1000, 1);
        let p = ChannelParams { sigma_common: 0.3, sigma_additive: 0.1, seed: 77, ..Default::default() };
        assert_eq!(apply_channel(&t, &t, &p).unwrap(), apply_channel(&t, &t, &p).unwrap());
    }

    #[test]
    fn length_mismatch_rejected() {
        let r = apply_channel(&symbols(4, 0), &symbols(5, 0), &ChannelParams::default());
        assert_eq!(r, Err(ChannelError::LengthMismatch(4, 5)));
    }
}
