//! Linear-phase FIR low-pass filtering at complex baseband.

use num_complex::{Complex32, Complex64};
use rayon::prelude::*;

use super::capture::IqCapture;
use crate::error::{Error, Result};

const MAX_TAPS: usize = 2047;
/// Blackman main-lobe width is about 5.5 / N; one cutoff's worth of
/// transition band keeps the passband flat below half the cutoff.
const TRANSITION_FACTOR: f64 = 6.0;

/// Blackman-windowed sinc, unity DC gain. `cutoff` is in cycles per sample.
pub fn lowpass_taps(cutoff: f64, ntaps: usize) -> Vec<f64> {
    assert!(ntaps % 2 == 1, "linear-phase design needs an odd tap count");
    let m = (ntaps - 1) as f64;
    let mid = m / 2.0;
    let mut taps: Vec<f64> = (0..ntaps)
        .map(|n| {
            let x = n as f64 - mid;
            let sinc = if x == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * std::f64::consts::PI * cutoff * x).sin() / (std::f64::consts::PI * x)
            };
            let w = 0.42 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / m).cos()
                + 0.08 * (4.0 * std::f64::consts::PI * n as f64 / m).cos();
            sinc * w
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Tap count used for a given normalized cutoff.
pub fn taps_for_cutoff(cutoff: f64) -> usize {
    let n = (TRANSITION_FACTOR / cutoff).ceil() as usize;
    (n | 1).clamp(3, MAX_TAPS)
}

/// Magnitude response of `taps` at normalized frequency `f`.
pub fn response(taps: &[f64], f: f64) -> f64 {
    taps.iter()
        .enumerate()
        .map(|(n, &t)| Complex64::from_polar(t, -2.0 * std::f64::consts::PI * f * n as f64))
        .sum::<Complex64>()
        .norm()
}

/// Convolution with the group delay removed, same length as the input,
/// zero-padded at both ends.
fn convolve_same<T>(input: &[T], taps: &[f64], mul: impl Fn(T, f64) -> T + Sync, zero: T) -> Vec<T>
where
    T: Copy + Send + Sync + std::ops::Add<Output = T>,
{
    let half = taps.len() / 2;
    let n = input.len();
    (0..n)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| {
            // y[i] = sum_j taps[j] * x[i + half - j]
            let lo = (i + half + 1).saturating_sub(n);
            let hi = (i + half).min(taps.len() - 1);
            (lo..=hi).fold(zero, |acc, j| acc + mul(input[i + half - j], taps[j]))
        })
        .collect()
}

pub fn filter_complex(samples: &[Complex32], taps: &[f64]) -> Vec<Complex32> {
    let wide: Vec<Complex64> = samples
        .iter()
        .map(|s| Complex64::new(s.re as f64, s.im as f64))
        .collect();
    convolve_same(&wide, taps, |x, t| x * t, Complex64::new(0.0, 0.0))
        .into_iter()
        .map(|c| Complex32::new(c.re as f32, c.im as f32))
        .collect()
}

pub fn filter_real(samples: &[f64], taps: &[f64]) -> Vec<f64> {
    convolve_same(samples, taps, |x, t| x * t, 0.0)
}

/// Keeps `[-bandwidth/2, bandwidth/2]` around DC.
pub fn bandlimit(capture: &IqCapture, bandwidth_hz: f64) -> Result<IqCapture> {
    let fs = capture.sample_rate_hz;
    if !(bandwidth_hz > 0.0 && bandwidth_hz <= fs) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth {bandwidth_hz} Hz must be in (0, {fs}]"
        )));
    }
    let cutoff = bandwidth_hz / 2.0 / fs;
    if cutoff >= 0.5 {
        return Ok(capture.clone());
    }
    let taps = lowpass_taps(cutoff, taps_for_cutoff(cutoff));
    Ok(capture.with_samples(filter_complex(&capture.samples, &taps), fs))
}
