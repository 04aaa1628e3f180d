//! Confidence-annotated symbols and their record file.
//!
//! The file holds 5-byte records: the symbol as one byte, then the
//! confidence as a little-endian `f32`. A `<name>.json` sidecar describes it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::io::sidecar_path;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfidentSymbols {
    pub symbols: Vec<u8>,
    pub confidence: Vec<f64>,
}

impl ConfidentSymbols {
    pub fn new(symbols: Vec<u8>, confidence: Vec<f64>) -> Result<Self> {
        if symbols.len() != confidence.len() {
            return Err(Error::DimensionMismatch {
                expected: symbols.len(),
                got: confidence.len(),
            });
        }
        if confidence.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("confidence must be finite".into()));
        }
        Ok(Self {
            symbols,
            confidence,
        })
    }

    /// All symbols fully trusted.
    pub fn certain(symbols: Vec<u8>) -> Self {
        let confidence = vec![1.0; symbols.len()];
        Self {
            symbols,
            confidence,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFileSidecar {
    pub records: usize,
    pub record_layout: String,
    pub symbol_rate_baud: f64,
}

const LAYOUT: &str = "u8 symbol, f32le confidence";

pub fn write_confident_symbols(path: &Path, cs: &ConfidentSymbols, symbol_rate_baud: f64) -> Result<()> {
    let mut raw = Vec::with_capacity(cs.len() * 5);
    for (&s, &c) in cs.symbols.iter().zip(&cs.confidence) {
        raw.push(s & 1);
        raw.extend_from_slice(&(c as f32).to_le_bytes());
    }
    fs::write(path, raw)?;
    let side = SymbolFileSidecar {
        records: cs.len(),
        record_layout: LAYOUT.into(),
        symbol_rate_baud,
    };
    fs::write(sidecar_path(path), serde_json::to_vec_pretty(&side)?)?;
    Ok(())
}

pub fn read_confident_symbols(path: &Path) -> Result<(ConfidentSymbols, SymbolFileSidecar)> {
    let raw = fs::read(path)?;
    let side: SymbolFileSidecar = serde_json::from_slice(&fs::read(sidecar_path(path))?)?;
    if raw.len() != side.records * 5 {
        return Err(Error::InvalidParameter(format!(
            "{}: expected {} records, file holds {} bytes",
            path.display(),
            side.records,
            raw.len()
        )));
    }
    let (symbols, confidence) = raw
        .chunks_exact(5)
        .map(|r| (r[0], f32::from_le_bytes([r[1], r[2], r[3], r[4]]) as f64))
        .unzip();
    Ok((ConfidentSymbols::new(symbols, confidence)?, side))
}
