//! Correction performance over a grid of symbol error rates.
//!
//! Every code of the simulated stream is IDLE. Decoding uses a data table
//! XORed with `00001`, so `11111` is a valid entry and any other decided
//! code is an error. Symbols are produced from soft samples: each symbol
//! contributes `sps` samples of its level plus Gaussian noise, with the
//! noise scale solved so the chosen discriminator errs at rate `p_e`. This
//! gives i.i.d. symbol errors together with realistic confidences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::demod::classifier::{classify, train_classifier, windows, TrainConfig};
use crate::demod::label::LabeledSamples;
use crate::demod::median::{decide_window, extract_symbols_median};
use crate::demod::ConfidentSymbols;
use crate::error::{Error, Result};
use crate::phy::code5::Code5;
use crate::phy::ScramblerState;
use crate::recover::correct::{xor_shift_table, CodeStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDiscriminator {
    Median,
    Classifier,
}

/// Two-state noise: in the bad state the noise scale is multiplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstModel {
    pub p_good_to_bad: f64,
    pub p_bad_to_good: f64,
    pub bad_noise_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub codes_per_point: usize,
    pub seed: u64,
    pub discriminator: SweepDiscriminator,
    pub sps: usize,
    pub mask: Code5,
    pub burst: Option<BurstModel>,
    /// Symbols used to fit the classifier at each point.
    pub training_symbols: usize,
}

pub const DEFAULT_GRID_POINTS: usize = 21;

pub fn default_grid() -> Vec<f64> {
    (0..DEFAULT_GRID_POINTS).map(|i| 0.5 * i as f64 / (DEFAULT_GRID_POINTS - 1) as f64).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            codes_per_point: 20_000,
            seed: 0,
            discriminator: SweepDiscriminator::Median,
            sps: 12,
            mask: Code5::new(0b00001).expect("5 bits"),
            burst: None,
            training_symbols: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p_e: f64,
    pub measured_ser: f64,
    /// Wrong before correction, invalid or valid.
    pub incorrect: f64,
    /// Invalid before correction.
    pub invalid: f64,
    /// Right as received.
    pub uncorrupted_correct: f64,
    /// Wrong as received, right after correction.
    pub corrected_correct: f64,
}

impl SweepPoint {
    pub fn correction_gain(&self) -> f64 {
        self.corrected_correct
    }
}

const NO_SIGNAL_SIGMA: f64 = 1e6;

const CALIBRATION_WINDOWS: usize = 40_000;

/// Noise scale at which the vote rule of the median discriminator errs at
/// rate `p_e`, found by bisection over a fixed noise draw so the error
/// count is monotone in the scale.
fn median_sigma(p_e: f64, sps: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let noise: Vec<f64> = (0..CALIBRATION_WINDOWS * sps).map(|_| rng.sample(StandardNormal)).collect();
    let error_rate = |sigma: f64| {
        let mut window = vec![0.0; sps];
        let errs = noise
            .chunks_exact(sps)
            .filter(|w| {
                window.iter_mut().zip(*w).for_each(|(x, n)| *x = sigma * n);
                decide_window(&window, 0.5).0 == 1
            })
            .count();
        errs as f64 / CALIBRATION_WINDOWS as f64
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while error_rate(hi) < p_e {
        hi *= 2.0;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if error_rate(mid) < p_e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Noise standard deviation per sample, for unit level separation, that
/// yields symbol error rate `p_e`.
pub fn noise_sigma(p_e: f64, sps: usize, disc: SweepDiscriminator) -> f64 {
    if p_e <= 0.0 {
        return 0.0;
    }
    if p_e >= 0.5 {
        return NO_SIGNAL_SIGMA;
    }
    match disc {
        // Linear decisions average the window.
        SweepDiscriminator::Classifier => {
            let z = Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(1.0 - p_e);
            0.5 * (sps as f64).sqrt() / z
        }
        SweepDiscriminator::Median => median_sigma(p_e, sps),
    }
}

struct Realization {
    /// Sample level per symbol. The more frequent symbol sits at level 0,
    /// as the denser hotspot does in a real capture.
    levels: Vec<u8>,
    samples: Vec<f64>,
}

fn realize(rng: &mut ChaCha8Rng, keystream: &[u8], sps: usize, sigma: f64, burst: Option<BurstModel>) -> Realization {
    let mut s = rng.random_range(0..2u8);
    let mut symbols = Vec::with_capacity(keystream.len() + 1);
    symbols.push(s);
    for &k in keystream {
        // IDLE plaintext is all ones.
        s ^= 1 ^ k;
        symbols.push(s);
    }
    let invert = u8::from(2 * symbols.iter().filter(|&&x| x == 1).count() > symbols.len());
    let levels: Vec<u8> = symbols.iter().map(|x| x ^ invert).collect();
    let mut bad = false;
    let mut samples = Vec::with_capacity(levels.len() * sps);
    for &sym in &levels {
        if let Some(b) = burst {
            let flip = if bad { b.p_bad_to_good } else { b.p_good_to_bad };
            if rng.random_bool(flip.clamp(0.0, 1.0)) {
                bad = !bad;
            }
        }
        let scale = match burst {
            Some(b) if bad => sigma * b.bad_noise_scale,
            _ => sigma,
        };
        for _ in 0..sps {
            let n: f64 = rng.sample(StandardNormal);
            samples.push(f64::from(sym) + scale * n);
        }
    }
    Realization { levels, samples }
}

fn discriminate(
    rng: &mut ChaCha8Rng,
    r: &Realization,
    cfg: &SweepConfig,
    sigma: f64,
) -> Result<ConfidentSymbols> {
    let sps = cfg.sps;
    match cfg.discriminator {
        SweepDiscriminator::Median => {
            let ls = LabeledSamples {
                d: r.samples.clone(),
                sample_rate_hz: sps as f64,
            };
            extract_symbols_median(&ls, 0, sps)
        }
        SweepDiscriminator::Classifier => {
            let seed = ScramblerState::new(rng.random_range(1..=0x7FF)).expect("nonzero");
            let ks: Vec<u8> = seed.keystream().take(cfg.training_symbols.max(2) - 1).collect();
            let train = realize(rng, &ks, sps, sigma, cfg.burst);
            let model = train_classifier(&windows(&train.samples, 0, sps), &train.levels, &TrainConfig::default())?;
            classify(&model, &windows(&r.samples, 0, sps))
        }
    }
}

fn sweep_point(index: usize, p_e: f64, cfg: &SweepConfig) -> Result<SweepPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let seed = ScramblerState::new(rng.random_range(1..=0x7FF)).expect("nonzero");
    let n = cfg.codes_per_point;
    let keystream: Vec<u8> = seed.keystream().take(5 * n).collect();
    let sigma = noise_sigma(p_e, cfg.sps, cfg.discriminator);
    let r = realize(&mut rng, &keystream, cfg.sps, sigma, cfg.burst);
    let cs = discriminate(&mut rng, &r, cfg, sigma)?;

    let table = xor_shift_table(cfg.mask);
    let stream = CodeStream {
        symbols: &cs.symbols,
        conf: &cs.confidence,
        keystream: &keystream,
        offset: 0,
    };
    let before = stream.translate(0..n, false, &table);
    let after = stream.translate(0..n, true, &table);
    let truth = Code5::IDLE;
    let (mut correct, mut invalid, mut gained) = (0usize, 0usize, 0usize);
    for (b, a) in before.iter().zip(&after) {
        let ok_before = b.is_valid() && b.code == truth;
        correct += usize::from(ok_before);
        invalid += usize::from(!b.is_valid());
        gained += usize::from(!ok_before && a.is_valid() && a.code == truth);
    }
    let sym_errs = cs.symbols.iter().zip(&r.levels).filter(|(a, b)| a != b).count();
    let total = before.len().max(1) as f64;
    Ok(SweepPoint {
        p_e,
        measured_ser: sym_errs as f64 / r.levels.len() as f64,
        incorrect: 1.0 - correct as f64 / total,
        invalid: invalid as f64 / total,
        uncorrupted_correct: correct as f64 / total,
        corrected_correct: gained as f64 / total,
    })
}

/// One point per grid entry, computed in parallel from independent
/// substreams of `cfg.seed`.
pub fn correction_sweep(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    if let Some(p) = cfg.grid.iter().find(|p| !(0.0..=0.5).contains(*p)) {
        return Err(Error::InvalidParameter(format!("p_e {p} outside [0, 0.5]")));
    }
    if cfg.sps < 2 || cfg.codes_per_point == 0 {
        return Err(Error::InvalidParameter("need sps >= 2 and at least one code".into()));
    }
    cfg.grid
        .par_iter()
        .enumerate()
        .map(|(i, &p)| sweep_point(i, p, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(grid: Vec<f64>, disc: SweepDiscriminator) -> SweepConfig {
        SweepConfig {
            grid,
            codes_per_point: 4000,
            discriminator: disc,
            ..Default::default()
        }
    }

    #[test]
    fn zero_error_point() {
        let pts = correction_sweep(&small(vec![0.0], SweepDiscriminator::Median)).unwrap();
        assert_eq!(pts[0].incorrect, 0.0);
        assert_eq!(pts[0].uncorrupted_correct, 1.0);
        assert_eq!(pts[0].measured_ser, 0.0);
    }

    #[test]
    fn calibration_hits_target_ser() {
        for disc in [SweepDiscriminator::Median, SweepDiscriminator::Classifier] {
            let pts = correction_sweep(&small(vec![0.05, 0.2], disc)).unwrap();
            for p in pts {
                assert!((p.measured_ser - p.p_e).abs() < 0.1 * p.p_e + 0.01, "{disc:?} {p:?}");
            }
        }
    }

    #[test]
    fn fractions_are_consistent_and_deterministic() {
        let cfg = small(vec![0.1, 0.3], SweepDiscriminator::Median);
        let a = correction_sweep(&cfg).unwrap();
        assert_eq!(a, correction_sweep(&cfg).unwrap());
        for p in &a {
            assert!(p.invalid <= p.incorrect);
            assert!((p.uncorrupted_correct + p.incorrect - 1.0).abs() < 1e-12);
            assert!(p.corrected_correct >= 0.0);
        }
    }

    #[test]
    fn sigma_edges() {
        assert_eq!(noise_sigma(0.0, 12, SweepDiscriminator::Median), 0.0);
        assert_eq!(noise_sigma(0.5, 12, SweepDiscriminator::Classifier), NO_SIGNAL_SIGMA);
        let a = noise_sigma(0.05, 12, SweepDiscriminator::Median);
        let b = noise_sigma(0.2, 12, SweepDiscriminator::Median);
        assert!(0.0 < a && a < b);
    }

    #[test]
    fn grid_out_of_range() {
        assert!(correction_sweep(&small(vec![0.7], SweepDiscriminator::Median)).is_err());
        assert_eq!(default_grid().len(), 21);
    }
}
