//! Resampling to an integral number of samples per symbol.

use num_complex::Complex32;

use crate::channel::IqCapture;
use crate::error::{Error, Result};

/// Largest integer `>= 2` not above the native ratio.
pub fn target_sps(native_sps: f64) -> Result<usize> {
    if !(native_sps.is_finite() && native_sps >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples per symbol, got {native_sps}"
        )));
    }
    // Tolerate ratios that are integral up to rounding noise.
    let rounded = native_sps.round();
    if (native_sps - rounded).abs() < 1e-9 {
        return Ok(rounded as usize);
    }
    Ok(native_sps.floor() as usize)
}

/// Linear interpolation onto `sps * symbol_rate`. Returns the capture
/// unchanged when the native rate is already integral.
pub fn resample_to_integer_sps(capture: &IqCapture, symbol_rate: f64) -> Result<(IqCapture, usize)> {
    let native = capture.sample_rate_hz / symbol_rate;
    let sps = target_sps(native)?;
    if (native - sps as f64).abs() < 1e-9 {
        return Ok((capture.clone(), sps));
    }
    let step = native / sps as f64;
    let n_in = capture.len();
    let n_out = ((n_in - 1) as f64 / step).floor() as usize + 1;
    let src = &capture.samples;
    let out: Vec<Complex32> = (0..n_out)
        .map(|j| {
            let x = j as f64 * step;
            let i = x.floor() as usize;
            let f = (x - i as f64) as f32;
            if i + 1 >= n_in {
                src[n_in - 1]
            } else {
                src[i] * (1.0 - f) + src[i + 1] * f
            }
        })
        .collect();
    Ok((capture.with_samples(out, sps as f64 * symbol_rate), sps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Map;

    #[test]
    fn target_rule() {
        assert_eq!(target_sps(12.8).unwrap(), 12);
        assert_eq!(target_sps(4.0).unwrap(), 4);
        assert_eq!(target_sps(2.5).unwrap(), 2);
        assert!(target_sps(1.9).is_err());
    }

    #[test]
    fn ramp_is_preserved() {
        let samples: Vec<Complex32> = (0..128).map(|i| Complex32::new(i as f32, 0.0)).collect();
        let cap = IqCapture::new(samples, 12.8, Map::new()).unwrap();
        let (out, sps) = resample_to_integer_sps(&cap, 1.0).unwrap();
        assert_eq!(sps, 12);
        assert_eq!(out.sample_rate_hz, 12.0);
        for (j, s) in out.samples.iter().enumerate() {
            assert!((s.re - j as f32 * 12.8 / 12.0).abs() < 1e-3);
        }
    }
}
