//! Correlation of a capture against a scrambled-IDLE reference waveform.
//!
//! The capture is projected onto its principal I/Q axis. The reference is
//! the rectified wire waveform of scrambled IDLE from a random seed, held
//! at the capture rate. Both are low-passed alike. The reference is
//! aligned by cross-correlation over one keystream period of samples and
//! the Pearson coefficient is taken on the samples after that period.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::channel::filter::{filter_real, lowpass_taps, taps_for_cutoff};
use crate::channel::IqCapture;
use crate::error::{Error, Result};
use crate::phy::framing::SYMBOL_RATE_BAUD;
use crate::phy::{mlt3_encode, rectify, scramble, Mlt3State, ScramblerState, PERIOD};

/// Samples beyond the alignment period needed for a meaningful score.
pub const MIN_TAIL: usize = 1024;
pub const REFERENCE_CUTOFF_HZ: f64 = 125e6;

/// Pearson product-moment coefficient; 0 when either side is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    let (a, b) = (&a[..n], &b[..n]);
    let ma = a.iter().sum::<f64>() / n as f64;
    let mb = b.iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Real signal along the direction of largest I/Q variance.
pub fn principal_projection(capture: &IqCapture) -> Vec<f64> {
    let n = capture.len().max(1) as f64;
    let pts: Vec<Complex64> = capture
        .samples
        .iter()
        .map(|s| Complex64::new(s.re as f64, s.im as f64))
        .collect();
    let mean = pts.iter().sum::<Complex64>() / n;
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let d = p - mean;
        xx += d.re * d.re;
        yy += d.im * d.im;
        xy += d.re * d.im;
    }
    // Major axis angle of the 2x2 covariance.
    let theta = 0.5 * (2.0 * xy).atan2(xx - yy);
    let (c, s) = (theta.cos(), theta.sin());
    pts.iter().map(|p| (p.re - mean.re) * c + (p.im - mean.im) * s).collect()
}

/// Rectified scrambled IDLE, zero-order held at `sps` samples per symbol.
pub fn idle_reference(seed: ScramblerState, samples: usize, sps: f64) -> Vec<f64> {
    let symbols = (samples as f64 / sps).ceil() as usize + 2;
    let rect = rectify(&mlt3_encode(&scramble(&vec![1; symbols], seed), Mlt3State::default()));
    (0..samples)
        .map(|n| f64::from(rect[((n as f64 / sps) as usize).min(symbols - 1)]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    /// Sign-adjusted so that inverted polarity still scores positive.
    pub r: f64,
    /// Reference lag in samples.
    pub lag: usize,
    /// Samples scored.
    pub samples: usize,
    pub reference_seed: u16,
}

/// `corr[lag] = sum_n x[n] * y[n + lag]` for `lag < y.len() - x.len() + 1`.
fn cross_correlate(x: &[f64], y: &[f64]) -> Vec<f64> {
    let size = (x.len() + y.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut b: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        b.resize(size, Complex64::new(0.0, 0.0));
        b
    };
    let mut fx = pad(x);
    let mut fy = pad(y);
    fwd.process(&mut fx);
    fwd.process(&mut fy);
    let mut prod: Vec<Complex64> = fx.iter().zip(&fy).map(|(a, b)| a.conj() * b).collect();
    inv.process(&mut prod);
    let lags = y.len() + 1 - x.len();
    prod[..lags].iter().map(|c| c.re / size as f64).collect()
}

fn centered(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len().max(1) as f64;
    v.iter().map(|x| x - m).collect()
}

/// Correlation score of `capture` against IDLE from a random seed drawn
/// from `rng_seed`.
pub fn correlation_map(capture: &IqCapture, rng_seed: u64) -> Result<CorrelationResult> {
    let symbol_rate = capture.symbol_rate().unwrap_or(SYMBOL_RATE_BAUD);
    let sps = capture.sample_rate_hz / symbol_rate;
    if !(sps >= 2.0) {
        return Err(Error::InvalidParameter(format!("need at least 2 samples per symbol, got {sps}")));
    }
    let period = (PERIOD as f64 * sps).ceil() as usize;
    if capture.len() < period + MIN_TAIL {
        return Err(Error::TooShort {
            need: period + MIN_TAIL,
            got: capture.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let seed = ScramblerState::new(rng.random_range(1..=0x7FF)).expect("nonzero");

    let cutoff = REFERENCE_CUTOFF_HZ / capture.sample_rate_hz;
    let smooth = |v: Vec<f64>| {
        if cutoff >= 0.5 {
            v
        } else {
            filter_real(&v, &lowpass_taps(cutoff, taps_for_cutoff(cutoff)))
        }
    };
    let x = smooth(principal_projection(capture));
    let reference = smooth(idle_reference(seed, capture.len() + period, sps));

    let head = centered(&x[..period]);
    let corr = cross_correlate(&head, &centered(&reference[..2 * period]));
    let lag = (0..period).fold(0, |best, l| if corr[l].abs() > corr[best].abs() { l } else { best });

    let tail = &x[period..];
    let aligned = &reference[period + lag..period + lag + tail.len()];
    let mut r = pearson(tail, aligned);
    if corr[lag] < 0.0 {
        r = -r;
    }
    Ok(CorrelationResult {
        r,
        lag,
        samples: tail.len(),
        reference_seed: seed.bits(),
    })
}
