//! Behavioral implant and radio channel.
//!
//! Each rectified symbol selects one of two complex reflection responses.
//! The response is held for the symbol duration, with a linear ramp at each
//! change of state, on top of a static background, plus complex white
//! Gaussian noise.

use num_complex::{Complex32, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::capture::{IqCapture, META_OFFSET, META_SYMBOL_RATE};
use crate::error::{Error, Result};
use crate::phy::framing::SYMBOL_RATE_BAUD;

/// Channel and implant parameters.
///
/// The default reflection responses are plausible placeholders, not
/// measurements of any particular diode implant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub gamma_on: Complex64,
    pub gamma_off: Complex64,
    pub background: Complex64,
    /// Referenced to `|gamma_on - gamma_off| / 2`. `+inf` disables noise.
    pub snr_db: f64,
    pub samples_per_symbol: f64,
    /// Edge ramp duration as a fraction of a symbol, in `[0, 0.5)`.
    pub rise_fraction: f64,
    pub symbol_rate_hz: f64,
    /// Position of the first symbol boundary in samples. Drawn uniformly
    /// from `[0, samples_per_symbol)` when absent.
    pub timing_offset: Option<f64>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            gamma_on: Complex64::new(0.32, -0.18),
            gamma_off: Complex64::new(0.08, 0.11),
            background: Complex64::new(1.6, 0.9),
            snr_db: 20.0,
            samples_per_symbol: 12.8,
            rise_fraction: 0.1,
            symbol_rate_hz: SYMBOL_RATE_BAUD,
            timing_offset: None,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.gamma_on == self.gamma_off {
            return bad("gamma_on and gamma_off must differ".into());
        }
        let finite = [self.gamma_on, self.gamma_off, self.background]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return bad("reflection responses must be finite".into());
        }
        if !(self.samples_per_symbol.is_finite() && self.samples_per_symbol >= 2.0) {
            return bad(format!(
                "samples_per_symbol must be >= 2, got {}",
                self.samples_per_symbol
            ));
        }
        if !(0.0..0.5).contains(&self.rise_fraction) {
            return bad(format!("rise_fraction must be in [0, 0.5), got {}", self.rise_fraction));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return bad(format!("snr_db must be a number, got {}", self.snr_db));
        }
        if !(self.symbol_rate_hz.is_finite() && self.symbol_rate_hz > 0.0) {
            return bad("symbol_rate_hz must be positive".into());
        }
        if let Some(off) = self.timing_offset {
            if !(0.0..self.samples_per_symbol).contains(&off) {
                return bad(format!("timing_offset {off} outside [0, samples_per_symbol)"));
            }
        }
        Ok(())
    }

    /// Modulation amplitude `|gamma_on - gamma_off| / 2`.
    pub fn half_separation(&self) -> f64 {
        (self.gamma_on - self.gamma_off).norm() / 2.0
    }

    /// Total complex noise variance `E|n|^2`, zero when noise is disabled.
    pub fn noise_variance(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            self.half_separation().powi(2) / 10f64.powf(self.snr_db / 10.0)
        }
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.samples_per_symbol * self.symbol_rate_hz
    }
}

fn complex_json(c: Complex64) -> Value {
    json!([c.re, c.im])
}

/// Renders `symbols` through the channel. Deterministic for a fixed seed.
pub fn synthesize_capture(symbols: &[u8], p: &ChannelParams, seed: u64) -> Result<IqCapture> {
    if symbols.is_empty() {
        return Err(Error::TooShort { need: 1, got: 0 });
    }
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sps = p.samples_per_symbol;
    let offset = match p.timing_offset {
        Some(o) => o,
        None => rng.random_range(0.0..sps),
    };
    let on = p.background + p.gamma_on;
    let off = p.background + p.gamma_off;
    let level = |s: u8| if s & 1 == 1 { on } else { off };
    let rise = p.rise_fraction * sps;
    let sigma = (p.noise_variance() / 2.0).sqrt();

    let n_samples = (offset + symbols.len() as f64 * sps).ceil() as usize;
    let mut samples = Vec::with_capacity(n_samples);
    for n in 0..n_samples {
        let t = n as f64 - offset;
        // Samples before the first boundary hold symbol 0.
        let k = if t < 0.0 {
            0
        } else {
            ((t / sps).floor() as usize).min(symbols.len() - 1)
        };
        let cur = level(symbols[k]);
        let into = t - k as f64 * sps;
        let clean = if k > 0 && rise > 0.0 && into < rise && symbols[k] != symbols[k - 1] {
            let prev = level(symbols[k - 1]);
            prev + (cur - prev) * (into / rise)
        } else {
            cur
        };
        let noisy = if sigma > 0.0 {
            let ni: f64 = rng.sample(StandardNormal);
            let nq: f64 = rng.sample(StandardNormal);
            clean + Complex64::new(ni * sigma, nq * sigma)
        } else {
            clean
        };
        samples.push(Complex32::new(noisy.re as f32, noisy.im as f32));
    }

    let mut meta = Map::new();
    meta.insert(META_SYMBOL_RATE.into(), Value::from(p.symbol_rate_hz));
    meta.insert(META_OFFSET.into(), Value::from(offset));
    meta.insert("symbol_count".into(), Value::from(symbols.len()));
    meta.insert("rng_seed".into(), Value::from(seed));
    meta.insert(
        "channel".into(),
        json!({
            "gamma_on": complex_json(p.gamma_on),
            "gamma_off": complex_json(p.gamma_off),
            "background": complex_json(p.background),
            // JSON has no infinity.
            "snr_db": if p.snr_db.is_finite() { Value::from(p.snr_db) } else { Value::from("inf") },
            "samples_per_symbol": p.samples_per_symbol,
            "rise_fraction": p.rise_fraction,
        }),
    );
    IqCapture::new(samples, p.sample_rate_hz(), meta)
}
