//! Normalized hotspot distance per sample.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hotspots::Hotspots;
use crate::channel::IqCapture;
use crate::error::{Error, Result};

/// `d = 0` at `h0`, `d = 1` at `h1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSamples {
    pub d: Vec<f64>,
    pub sample_rate_hz: f64,
}

/// `|s - h0| / (|s - h0| + |s - h1|)`.
pub fn normalized_distance(s: Complex64, h: &Hotspots) -> f64 {
    let a = (s - h.h0).norm();
    let b = (s - h.h1).norm();
    a / (a + b)
}

pub fn label_samples(capture: &IqCapture, h: &Hotspots) -> Result<LabeledSamples> {
    if h.h0 == h.h1 {
        return Err(Error::DegenerateConstellation("hotspots coincide".into()));
    }
    let d = capture
        .samples
        .iter()
        .map(|s| normalized_distance(Complex64::new(s.re as f64, s.im as f64), h))
        .collect();
    Ok(LabeledSamples {
        d,
        sample_rate_hz: capture.sample_rate_hz,
    })
}
