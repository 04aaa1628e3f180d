//! Error rates against ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::framing::Frame;
use crate::recover::CodeCounts;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub ser: f64,
    /// Transition-bit error rate.
    pub ber: f64,
    /// Fraction of five-transition groups with at least one bit wrong.
    pub cer: f64,
    pub symbols: usize,
    pub bits: usize,
    pub codes: usize,
    /// Decoded index `i` compares with truth index `i + shift`.
    pub shift: isize,
    /// The decoded stream matched best with inverted polarity.
    pub inverted: bool,
    #[serde(default)]
    pub verdicts: Option<CodeCounts>,
}

fn overlap(truth: &[u8], decoded: &[u8], shift: isize) -> (usize, usize) {
    // Returns (decoded start, length) of the overlapping region.
    let d0 = if shift < 0 { (-shift) as usize } else { 0 };
    let t0 = (d0 as isize + shift) as usize;
    let len = decoded.len().saturating_sub(d0).min(truth.len().saturating_sub(t0));
    (d0, len)
}

/// Symbol, bit and code error rates after searching `|shift| <= max_shift`
/// and both polarities for the best match.
pub fn compute_stats(truth: &[u8], decoded: &[u8], max_shift: usize) -> Result<ErrorStats> {
    if truth.len() < 2 || decoded.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: truth.len().min(decoded.len()),
        });
    }
    let tolerance = max_shift + truth.len() / 100;
    if truth.len().abs_diff(decoded.len()) > tolerance {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: decoded.len(),
        });
    }
    let mut best: Option<(f64, isize, bool)> = None;
    for shift in -(max_shift as isize)..=max_shift as isize {
        let (d0, len) = overlap(truth, decoded, shift);
        if len < 2 {
            continue;
        }
        let t0 = (d0 as isize + shift) as usize;
        let errs = (0..len).filter(|&i| decoded[d0 + i] & 1 != truth[t0 + i] & 1).count();
        let rate = errs as f64 / len as f64;
        for (r, inv) in [(rate, false), (1.0 - rate, true)] {
            if best.is_none_or(|b| r < b.0) {
                best = Some((r, shift, inv));
            }
        }
    }
    let (ser, shift, inverted) = best.ok_or(Error::InsufficientData("no overlap".into()))?;
    let (d0, len) = overlap(truth, decoded, shift);
    let t0 = (d0 as isize + shift) as usize;
    let wrong: Vec<bool> = (1..len)
        .map(|i| {
            let dt = truth[t0 + i] ^ truth[t0 + i - 1];
            let dd = decoded[d0 + i] ^ decoded[d0 + i - 1];
            (dt ^ dd) & 1 == 1
        })
        .collect();
    let bit_errs = wrong.iter().filter(|&&w| w).count();
    let groups: Vec<bool> = wrong.chunks_exact(5).map(|g| g.iter().any(|&w| w)).collect();
    let code_errs = groups.iter().filter(|&&w| w).count();
    Ok(ErrorStats {
        ser,
        ber: bit_errs as f64 / wrong.len() as f64,
        cer: if groups.is_empty() {
            0.0
        } else {
            code_errs as f64 / groups.len() as f64
        },
        symbols: len,
        bits: wrong.len(),
        codes: groups.len(),
        shift,
        inverted,
        verdicts: None,
    })
}

/// Without truth on an IDLE stream: `1 - fraction of ones`.
pub fn idle_ber(plain_bits: &[u8]) -> f64 {
    if plain_bits.is_empty() {
        return 0.0;
    }
    1.0 - plain_bits.iter().filter(|&&b| b & 1 == 1).count() as f64 / plain_bits.len() as f64
}

/// Payload bit error rate over `truth`, pairing frames in order. Missing
/// bytes and frames count as wholly wrong.
pub fn frame_bit_error_rate(truth: &[Frame], got: &[Frame]) -> f64 {
    let total: usize = truth.iter().map(|f| 8 * f.payload.len()).sum();
    if total == 0 {
        return 0.0;
    }
    let mut errs = 0usize;
    for (i, t) in truth.iter().enumerate() {
        let g = got.get(i).map(|f| f.payload.as_slice()).unwrap_or(&[]);
        for (j, &b) in t.payload.iter().enumerate() {
            errs += match g.get(j) {
                Some(&x) => (x ^ b).count_ones() as usize,
                None => 8,
            };
        }
    }
    errs as f64 / total as f64
}
