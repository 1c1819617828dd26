//! Gray-mapped QPSK with symbols at the quadrant centres.
//!
//! Quadrant `k` (counter-clockwise from the first quadrant) carries the
//! symbol `exp(i(pi/4 + k pi/2))` and the bit pair
//!
//! | k | bits |
//! |---|------|
//! | 0 | 00   |
//! | 1 | 01   |
//! | 2 | 11   |
//! | 3 | 10   |
//!
//! so a slip into either neighbouring quadrant costs exactly one bit.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QpskError {
    #[error("bit stream length {0} is odd; QPSK needs bit pairs")]
    OddBitCount(usize),
    #[error("bit value {value} at position {index} is not 0 or 1")]
    InvalidBit { index: usize, value: u8 },
    #[error("bit streams differ in length ({tx} vs {rx})")]
    LengthMismatch { tx: usize, rx: usize },
    #[error("quadrant index {0} out of range 0..4")]
    InvalidQuadrant(u8),
}

/// Payload bits, each 0 or 1, two per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitStream(Vec<u8>);

impl BitStream {
    pub fn new(bits: Vec<u8>) -> Result<Self, QpskError> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(QpskError::InvalidBit { index, value });
        }
        if bits.len() % 2 != 0 {
            return Err(QpskError::OddBitCount(bits.len()));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbol_count(&self) -> usize {
        self.0.len() / 2
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

/// Transmitted QPSK symbols (unit magnitude, odd multiples of pi/4).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolStream(Vec<Complex64>);

impl SymbolStream {
    pub fn samples(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Symbols for the given quadrant indices.
    pub fn from_quadrants(quadrants: &[u8]) -> Result<Self, QpskError> {
        quadrants
            .iter()
            .map(|&q| quadrant_symbol(q))
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

/// Quadrant index (0..4) of a decision region.
pub type Quadrant = u8;

const GRAY: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 1], [1, 0]];

/// Centre of quadrant `q`.
pub fn quadrant_symbol(q: Quadrant) -> Result<Complex64, QpskError> {
    if q > 3 {
        return Err(QpskError::InvalidQuadrant(q));
    }
    Ok(Complex64::from_polar(1.0, FRAC_PI_4 + f64::from(q) * FRAC_PI_2))
}

pub fn quadrant_bits(q: Quadrant) -> [u8; 2] {
    GRAY[usize::from(q & 3)]
}

pub fn bits_quadrant(bits: [u8; 2]) -> Quadrant {
    match bits {
        [0, 0] => 0,
        [0, 1] => 1,
        [1, 1] => 2,
        _ => 3,
    }
}

/// Decision region containing `z`.
///
/// Samples on an axis go to the adjacent quadrant with the smaller index;
/// the origin goes to quadrant 0.
pub fn decide_quadrant(z: Complex64) -> Quadrant {
    let (re, im) = (z.re, z.im);
    if re >= 0.0 && im >= 0.0 {
        0
    } else if re < 0.0 && im >= 0.0 {
        1
    } else if re <= 0.0 {
        2
    } else {
        3
    }
}

pub fn map_symbols(bits: &BitStream) -> SymbolStream {
    let symbols = bits
        .bits()
        .chunks_exact(2)
        .map(|pair| {
            let q = bits_quadrant([pair[0], pair[1]]);
            Complex64::from_polar(1.0, FRAC_PI_4 + f64::from(q) * FRAC_PI_2)
        })
        .collect();
    SymbolStream(symbols)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DemapDiagnostics {
    /// Samples of exactly zero magnitude, decided by the tie rule.
    pub zero_samples: usize,
}

pub fn demap_symbols(samples: &[Complex64]) -> BitStream {
    demap_with_diagnostics(samples).0
}

pub fn demap_with_diagnostics(samples: &[Complex64]) -> (BitStream, DemapDiagnostics) {
    let mut diag = DemapDiagnostics::default();
    let mut bits = Vec::with_capacity(2 * samples.len());
    for &z in samples {
        if z.re == 0.0 && z.im == 0.0 {
            diag.zero_samples += 1;
        }
        bits.extend_from_slice(&quadrant_bits(decide_quadrant(z)));
    }
    (BitStream(bits), diag)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorCount {
    pub errors: u64,
    pub bits: u64,
    pub ber: f64,
}

pub fn count_errors(tx: &BitStream, rx: &BitStream) -> Result<ErrorCount, QpskError> {
    if tx.len() != rx.len() {
        return Err(QpskError::LengthMismatch { tx: tx.len(), rx: rx.len() });
    }
    let errors = tx.bits().iter().zip(rx.bits()).filter(|(a, b)| a != b).count() as u64;
    let bits = tx.len() as u64;
    let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
    Ok(ErrorCount { errors, bits, ber })
}

/// Bit errors between two quadrant decisions (0, 1 or 2).
pub fn quadrant_bit_errors(a: Quadrant, b: Quadrant) -> u32 {
    let (x, y) = (quadrant_bits(a), quadrant_bits(b));
    u32::from(x[0] != y[0]) + u32::from(x[1] != y[1])
}
