//! Transition bits with per-bit confidence.

use serde::{Deserialize, Serialize};

use crate::demod::ConfidentSymbols;
use crate::error::{Error, Result};

/// Bit `i` is the transition between symbols `i` and `i + 1`. Its
/// confidence is the smaller of the two symbol confidences.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RecoveredBits {
    pub bits: Vec<u8>,
    pub conf: Vec<f64>,
}

impl RecoveredBits {
    pub fn new(bits: Vec<u8>, conf: Vec<f64>) -> Result<Self> {
        if bits.len() != conf.len() {
            return Err(Error::DimensionMismatch {
                expected: bits.len(),
                got: conf.len(),
            });
        }
        Ok(Self { bits, conf })
    }

    pub fn certain(bits: Vec<u8>) -> Self {
        let conf = vec![1.0; bits.len()];
        Self { bits, conf }
    }

    pub fn from_symbols(cs: &ConfidentSymbols) -> Result<Self> {
        if cs.len() < 2 {
            return Err(Error::TooShort { need: 2, got: cs.len() });
        }
        let bits = cs.symbols.windows(2).map(|w| (w[0] ^ w[1]) & 1).collect();
        let conf = cs.confidence.windows(2).map(|w| w[0].min(w[1])).collect();
        Ok(Self { bits, conf })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}
