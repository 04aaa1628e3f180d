//! Symbol boundary search by window coherence.

use super::label::LabeledSamples;
use super::median::{binary_labels, lower_median};
use crate::error::{Error, Result};

pub const MIN_SYMBOLS: usize = 100;

/// Mean over full windows of `|sum of +-1 labels| / sps`.
pub fn coherence(labels: &[bool], sps: usize, offset: usize) -> f64 {
    let windows = labels.get(offset..).unwrap_or(&[]).chunks_exact(sps);
    let count = windows.len();
    if count == 0 {
        return 0.0;
    }
    let total: usize = windows
        .map(|w| {
            let ones = w.iter().filter(|&&b| b).count();
            ones.abs_diff(sps - ones)
        })
        .sum();
    total as f64 / (count * sps) as f64
}

/// Coherence at every offset in `0..sps`.
pub fn coherence_profile(labels: &[bool], sps: usize) -> Vec<f64> {
    (0..sps).map(|o| coherence(labels, sps, o)).collect()
}

/// Offset in `[0, sps)` maximizing coherence; ties go to the smallest.
pub fn find_symbol_offset_labels(labels: &[bool], sps: usize) -> Result<usize> {
    if sps < 2 {
        return Err(Error::InvalidParameter(format!("sps must be >= 2, got {sps}")));
    }
    if labels.len() < MIN_SYMBOLS * sps {
        return Err(Error::TooShort {
            need: MIN_SYMBOLS * sps,
            got: labels.len(),
        });
    }
    if labels.iter().all(|&b| b == labels[0]) {
        return Err(Error::AlignmentUndefined);
    }
    let profile = coherence_profile(labels, sps);
    let mut best = 0;
    for (o, &c) in profile.iter().enumerate() {
        if c > profile[best] {
            best = o;
        }
    }
    Ok(best)
}

/// Labels are thresholded at the lower median of `ls.d` first.
pub fn find_symbol_offset(ls: &LabeledSamples, sps: usize) -> Result<usize> {
    if ls.d.is_empty() {
        return Err(Error::TooShort { need: MIN_SYMBOLS * sps.max(2), got: 0 });
    }
    let labels = binary_labels(&ls.d, lower_median(&ls.d));
    find_symbol_offset_labels(&labels, sps)
}
