//! Per-symbol classification of what joint compensation did to a pair of
//! decisions.

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::qpsk::Quadrant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstellationCase {
    /// Both received symbols already in their original quadrant.
    NoCorrectionRequired,
    /// At least one symbol was in a wrong quadrant and both are right after
    /// compensation.
    CorrectionSuccessful,
    /// Compensation pushed a correctly received symbol out of its quadrant.
    AdditionalErrors,
    /// A wrong symbol stayed wrong and nothing correct was broken.
    NoCorrectionPossible,
}

impl ConstellationCase {
    pub const ALL: [ConstellationCase; 4] = [
        ConstellationCase::NoCorrectionRequired,
        ConstellationCase::CorrectionSuccessful,
        ConstellationCase::AdditionalErrors,
        ConstellationCase::NoCorrectionPossible,
    ];

    /// Row number (1-4) in the usual presentation order.
    pub fn row(self) -> usize {
        match self {
            ConstellationCase::NoCorrectionRequired => 1,
            ConstellationCase::CorrectionSuccessful => 2,
            ConstellationCase::AdditionalErrors => 3,
            ConstellationCase::NoCorrectionPossible => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseLabel {
    pub case: ConstellationCase,
    pub tx: [Quadrant; 2],
    pub rx: [Quadrant; 2],
    pub post: [Quadrant; 2],
}

/// Classifies one symbol pair from its transmitted, received and
/// compensated quadrants.
///
/// Precedence: a correct received symbol made wrong by compensation is
/// always `AdditionalErrors`, even when both received symbols were correct.
pub fn classify_case(tx: [Quadrant; 2], rx: [Quadrant; 2], post: [Quadrant; 2]) -> Result<CaseLabel, HarnessError> {
    if let Some(&q) = tx.iter().chain(&rx).chain(&post).find(|&&q| q > 3) {
        return Err(HarnessError::InvalidQuadrant(q));
    }
    Ok(CaseLabel { case: classify_flags([rx[0] == tx[0], rx[1] == tx[1]], [post[0] == tx[0], post[1] == tx[1]]), tx, rx, post })
}

pub(crate) fn classify_flags(rx_ok: [bool; 2], post_ok: [bool; 2]) -> ConstellationCase {
    let broken = (rx_ok[0] && !post_ok[0]) || (rx_ok[1] && !post_ok[1]);
    if broken {
        ConstellationCase::AdditionalErrors
    } else if rx_ok[0] && rx_ok[1] {
        ConstellationCase::NoCorrectionRequired
    } else if post_ok[0] && post_ok[1] {
        ConstellationCase::CorrectionSuccessful
    } else {
        ConstellationCase::NoCorrectionPossible
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseHistogram {
    pub no_correction_required: u64,
    pub correction_successful: u64,
    pub additional_errors: u64,
    pub no_correction_possible: u64,
}

impl CaseHistogram {
    pub fn add(&mut self, case: ConstellationCase) {
        *self.slot(case) += 1;
    }

    pub fn get(&self, case: ConstellationCase) -> u64 {
        match case {
            ConstellationCase::NoCorrectionRequired => self.no_correction_required,
            ConstellationCase::CorrectionSuccessful => self.correction_successful,
            ConstellationCase::AdditionalErrors => self.additional_errors,
            ConstellationCase::NoCorrectionPossible => self.no_correction_possible,
        }
    }

    fn slot(&mut self, case: ConstellationCase) -> &mut u64 {
        match case {
            ConstellationCase::NoCorrectionRequired => &mut self.no_correction_required,
            ConstellationCase::CorrectionSuccessful => &mut self.correction_successful,
            ConstellationCase::AdditionalErrors => &mut self.additional_errors,
            ConstellationCase::NoCorrectionPossible => &mut self.no_correction_possible,
        }
    }

    pub fn total(&self) -> u64 {
        ConstellationCase::ALL.iter().map(|&c| self.get(c)).sum()
    }
}
