//! Median-threshold symbol attribution.
//!
//! Each sample votes `d > median`. A window's symbol is the majority vote;
//! its raw confidence is the vote margin times the mean distance of the
//! window's samples from the threshold. Raw confidences are divided by
//! their 95th percentile over the capture and clamped to `[0, 1]`.

use super::label::LabeledSamples;
use super::symbols::ConfidentSymbols;
use crate::error::{Error, Result};

pub const CONFIDENCE_PERCENTILE: f64 = 0.95;

/// Lower median; the input must be non-empty.
pub fn lower_median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    let k = (v.len() - 1) / 2;
    let (_, m, _) = v.select_nth_unstable_by(k, f64::total_cmp);
    *m
}

/// Nearest-rank percentile, `q` in `(0, 1]`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    let (_, p, _) = v.select_nth_unstable_by(rank, f64::total_cmp);
    *p
}

pub fn binary_labels(d: &[f64], threshold: f64) -> Vec<bool> {
    d.iter().map(|&x| x > threshold).collect()
}

/// Symbol and unnormalized confidence for one window.
pub fn decide_window(window: &[f64], threshold: f64) -> (u8, f64) {
    let n = window.len();
    let above = window.iter().filter(|&&x| x > threshold).count();
    let symbol = match (2 * above).cmp(&n) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => {
            let mean = window.iter().sum::<f64>() / n as f64;
            u8::from(mean > threshold)
        }
    };
    let majority = above.max(n - above) as f64 / n as f64;
    let vote_margin = 2.0 * majority - 1.0;
    let spread = window.iter().map(|x| (x - threshold).abs()).sum::<f64>() / n as f64;
    (symbol, vote_margin * spread)
}

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let scale = percentile(&raw, CONFIDENCE_PERCENTILE);
    if scale <= 0.0 {
        return raw.iter().map(|&r| if r > 0.0 { 1.0 } else { 0.0 }).collect();
    }
    raw.into_iter().map(|r| (r / scale).clamp(0.0, 1.0)).collect()
}

pub fn extract_symbols_median(ls: &LabeledSamples, offset: usize, sps: usize) -> Result<ConfidentSymbols> {
    if sps < 2 || offset >= sps {
        return Err(Error::InvalidParameter(format!(
            "offset {offset} must be below sps {sps}, and sps >= 2"
        )));
    }
    if ls.d.len() < offset + sps {
        return Err(Error::TooShort {
            need: offset + sps,
            got: ls.d.len(),
        });
    }
    let threshold = lower_median(&ls.d);
    let (symbols, raw): (Vec<u8>, Vec<f64>) = ls.d[offset..]
        .chunks_exact(sps)
        .map(|w| decide_window(w, threshold))
        .unzip();
    ConfidentSymbols::new(symbols, normalize(raw))
}
