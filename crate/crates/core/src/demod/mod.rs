//! Capture to confidence-annotated symbols.
//!
//! Optional band-limiting, resampling to integral samples per symbol,
//! hotspot search, per-sample labeling, boundary alignment and then one of
//! two symbol discriminators.

pub mod align;
pub mod classifier;
pub mod hotspots;
pub mod label;
pub mod median;
pub mod resample;
pub mod symbols;

pub use align::find_symbol_offset;
pub use classifier::{classify, train_classifier, LinearModel, TrainConfig};
pub use hotspots::{find_hotspots, Hotspots, KdeConfig};
pub use label::{label_samples, LabeledSamples};
pub use median::extract_symbols_median;
pub use resample::resample_to_integer_sps;
pub use symbols::ConfidentSymbols;

use serde::{Deserialize, Serialize};

use crate::channel::{bandlimit, IqCapture};
use crate::error::{Error, Result};
use crate::phy::framing::SYMBOL_RATE_BAUD;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemodConfig {
    /// Receive filter bandwidth; `None` skips filtering.
    pub bandwidth_hz: Option<f64>,
    /// Used when the capture metadata carries no symbol rate.
    pub symbol_rate_hz: f64,
    pub kde: KdeConfig,
}

impl Default for DemodConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: None,
            symbol_rate_hz: SYMBOL_RATE_BAUD,
            kde: KdeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Discriminator<'a> {
    Median,
    Model(&'a LinearModel),
}

/// Intermediate products are kept so callers can train on them or report.
#[derive(Debug, Clone)]
pub struct Demodulated {
    pub symbols: ConfidentSymbols,
    pub labeled: LabeledSamples,
    pub hotspots: Hotspots,
    pub sps: usize,
    pub offset: usize,
}

impl Demodulated {
    /// Feature windows aligned with `symbols`.
    pub fn windows(&self) -> Vec<&[f64]> {
        classifier::windows(&self.labeled.d, self.offset, self.sps)
    }
}

pub fn demodulate(capture: &IqCapture, cfg: &DemodConfig, disc: Discriminator<'_>) -> Result<Demodulated> {
    let symbol_rate = capture.symbol_rate().unwrap_or(cfg.symbol_rate_hz);
    let filtered;
    let source = match cfg.bandwidth_hz {
        Some(bw) => {
            filtered = bandlimit(capture, bw.min(capture.sample_rate_hz))?;
            &filtered
        }
        None => capture,
    };
    let (resampled, sps) = resample_to_integer_sps(source, symbol_rate)?;
    let hotspots = find_hotspots(&resampled, &cfg.kde)?;
    let labeled = label_samples(&resampled, &hotspots)?;
    let offset = find_symbol_offset(&labeled, sps)?;
    let symbols = match disc {
        Discriminator::Median => extract_symbols_median(&labeled, offset, sps)?,
        Discriminator::Model(m) => {
            if m.sps != sps {
                return Err(Error::DimensionMismatch {
                    expected: m.sps,
                    got: sps,
                });
            }
            classify(m, &classifier::windows(&labeled.d, offset, sps))?
        }
    };
    Ok(Demodulated {
        symbols,
        labeled,
        hotspots,
        sps,
        offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{synthesize_capture, ChannelParams};
    use crate::phy::framing::{frame_to_wire, WireConfig};

    /// Best agreement over small shifts; polarity is irrelevant downstream.
    fn ser_vs_truth(got: &[u8], truth: &[u8]) -> f64 {
        let mut best = 1.0f64;
        for shift in 0..3 {
            let n = got.len().min(truth.len().saturating_sub(shift));
            let errs = (0..n).filter(|&i| got[i] != truth[i + shift]).count();
            let rate = errs as f64 / n as f64;
            best = best.min(rate).min(1.0 - rate);
        }
        best
    }

    #[test]
    fn noiseless_idle_decodes_exactly() {
        let symbols = frame_to_wire(&[], &WireConfig::default()).unwrap();
        let p = ChannelParams {
            snr_db: f64::INFINITY,
            rise_fraction: 0.0,
            ..Default::default()
        };
        let cap = synthesize_capture(&symbols, &p, 3).unwrap();
        let out = demodulate(&cap, &DemodConfig::default(), Discriminator::Median).unwrap();
        assert_eq!(out.sps, 12);
        assert_eq!(ser_vs_truth(&out.symbols.symbols, &symbols), 0.0);
    }

    #[test]
    fn high_snr_median_is_exact() {
        let symbols = frame_to_wire(&[], &WireConfig::default()).unwrap();
        let p = ChannelParams {
            snr_db: 40.0,
            rise_fraction: 0.1,
            ..Default::default()
        };
        let cap = synthesize_capture(&symbols, &p, 4).unwrap();
        let out = demodulate(&cap, &DemodConfig::default(), Discriminator::Median).unwrap();
        assert_eq!(ser_vs_truth(&out.symbols.symbols, &symbols), 0.0);
    }

    #[test]
    fn model_sps_must_match() {
        let symbols = frame_to_wire(&[], &WireConfig::default()).unwrap();
        let cap = synthesize_capture(&symbols, &ChannelParams::default(), 5).unwrap();
        let m = LinearModel {
            weights: vec![1.0; 4],
            bias: 0.0,
            scale: 1.0,
            sps: 4,
            trained_on: serde_json::Value::Null,
        };
        assert!(matches!(
            demodulate(&cap, &DemodConfig::default(), Discriminator::Model(&m)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
