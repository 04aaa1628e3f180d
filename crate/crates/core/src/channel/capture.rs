//! Complex baseband capture container and its `.iq` file format.
//!
//! Samples are little-endian interleaved `f32` pairs (I then Q). Metadata
//! lives in a mandatory `<name>.iq.json` sidecar.

use std::fs;
use std::path::Path;

use num_complex::Complex32;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::phy::io::sidecar_path;

pub const META_SAMPLE_RATE: &str = "sample_rate_hz";
pub const META_SYMBOL_RATE: &str = "symbols_per_second";
pub const META_OFFSET: &str = "symbol_offset_samples";

#[derive(Debug, Clone, PartialEq)]
pub struct IqCapture {
    pub samples: Vec<Complex32>,
    pub sample_rate_hz: f64,
    pub meta: Map<String, Value>,
}

impl IqCapture {
    pub fn new(samples: Vec<Complex32>, sample_rate_hz: f64, meta: Map<String, Value>) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Symbol rate recorded in the metadata, if any.
    pub fn symbol_rate(&self) -> Option<f64> {
        self.meta.get(META_SYMBOL_RATE).and_then(Value::as_f64)
    }

    pub fn samples_per_symbol(&self) -> Option<f64> {
        self.symbol_rate().map(|r| self.sample_rate_hz / r)
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<Complex32>, sample_rate_hz: f64) -> IqCapture {
        IqCapture {
            samples,
            sample_rate_hz,
            meta: self.meta.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut raw = Vec::with_capacity(self.samples.len() * 8);
        for s in &self.samples {
            raw.extend_from_slice(&s.re.to_le_bytes());
            raw.extend_from_slice(&s.im.to_le_bytes());
        }
        fs::write(path, raw)?;
        let mut meta = self.meta.clone();
        meta.insert(META_SAMPLE_RATE.into(), Value::from(self.sample_rate_hz));
        fs::write(sidecar_path(path), serde_json::to_vec_pretty(&Value::Object(meta))?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<IqCapture> {
        let raw = fs::read(path)?;
        if raw.len() % 8 != 0 {
            return Err(Error::InvalidParameter(format!(
                "{}: length {} is not a multiple of 8 bytes",
                path.display(),
                raw.len()
            )));
        }
        let side = fs::read(sidecar_path(path))?;
        let meta: Map<String, Value> = serde_json::from_slice(&side)?;
        let rate = meta
            .get(META_SAMPLE_RATE)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::InvalidParameter(format!("sidecar lacks {META_SAMPLE_RATE}")))?;
        let samples = raw
            .chunks_exact(8)
            .map(|c| {
                Complex32::new(
                    f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                    f32::from_le_bytes([c[4], c[5], c[6], c[7]]),
                )
            })
            .collect();
        IqCapture::new(samples, rate, meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(IqCapture::new(vec![], 0.0, Map::new()).is_err());
        assert!(IqCapture::new(vec![Complex32::new(f32::NAN, 0.0)], 1.0, Map::new()).is_err());
    }

    #[test]
    fn file_layout_is_interleaved_le_f32() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.iq");
        let mut meta = Map::new();
        meta.insert(META_SYMBOL_RATE.into(), Value::from(125e6));
        let cap = IqCapture::new(
            vec![Complex32::new(1.0, -2.0), Complex32::new(0.5, 0.25)],
            1.6e9,
            meta,
        )
        .unwrap();
        cap.write(&path).unwrap();
        let raw = fs::read(&path).unwrap();
        assert_eq!(&raw[0..4], &1.0f32.to_le_bytes());
        assert_eq!(&raw[4..8], &(-2.0f32).to_le_bytes());
        let back = IqCapture::read(&path).unwrap();
        assert_eq!(back.samples, cap.samples);
        assert_eq!(back.sample_rate_hz, 1.6e9);
        assert_eq!(back.symbol_rate(), Some(125e6));
    }
}
