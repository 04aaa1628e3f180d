//! Linear hinge-loss classifier over per-sample hotspot distances.
//!
//! Training solves the L2-regularized, L1-loss SVM dual by coordinate
//! descent with the bias folded in as a constant feature. The visiting
//! order is a fixed permutation so training is reproducible.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::median::percentile;
use super::symbols::ConfidentSymbols;
use crate::error::{Error, Result};

pub const SCALE_PERCENTILE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// `|decision|` mapped to confidence 1.
    pub scale: f64,
    pub sps: usize,
    #[serde(default)]
    pub trained_on: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub max_epochs: usize,
    /// Stop when the projected-gradient spread falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_epochs: 500,
            tol: 0.1,
            seed: 0,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearModel {
    pub fn decision(&self, window: &[f64]) -> Result<f64> {
        if window.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: window.len(),
            });
        }
        Ok(dot(&self.weights, window) + self.bias)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<LinearModel> {
        let m: LinearModel = serde_json::from_slice(&fs::read(path)?)?;
        if m.weights.len() != m.sps || !(m.scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{}: model has {} weights for sps {} and scale {}",
                path.display(),
                m.weights.len(),
                m.sps,
                m.scale
            )));
        }
        Ok(m)
    }
}

/// Fits a margin-maximizing separator. Labels are bits; `1` is the
/// positive class.
pub fn train_classifier(windows: &[&[f64]], labels: &[u8], cfg: &TrainConfig) -> Result<LinearModel> {
    if windows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: windows.len(),
            got: labels.len(),
        });
    }
    if windows.is_empty() {
        return Err(Error::TooShort { need: 2, got: 0 });
    }
    if !(cfg.c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {}", cfg.c)));
    }
    let dim = windows[0].len();
    if let Some(w) = windows.iter().find(|w| w.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: w.len(),
        });
    }
    let positives = labels.iter().filter(|&&l| l & 1 == 1).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::SingleClass);
    }

    let y: Vec<f64> = labels.iter().map(|&l| if l & 1 == 1 { 1.0 } else { -1.0 }).collect();
    // Augmented weight vector: last entry is the bias.
    let mut w = vec![0.0; dim + 1];
    let mut alpha = vec![0.0; windows.len()];
    let qii: Vec<f64> = windows.iter().map(|x| dot(x, x) + 1.0).collect();
    let mut order: Vec<usize> = (0..windows.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for _ in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let x = windows[i];
            let g = y[i] * (dot(&w[..dim], x) + w[dim]) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == cfg.c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qii[i]).clamp(0.0, cfg.c);
                let delta = (alpha[i] - old) * y[i];
                for (wj, xj) in w[..dim].iter_mut().zip(x) {
                    *wj += delta * xj;
                }
                w[dim] += delta;
            }
        }
        if pg_max - pg_min < cfg.tol {
            break;
        }
    }

    let bias = w[dim];
    w.truncate(dim);
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter("training produced a zero weight vector".into()));
    }
    let mut model = LinearModel {
        weights: w,
        bias,
        scale: 1.0,
        sps: dim,
        trained_on: Value::Null,
    };
    let abs: Vec<f64> = windows.iter().map(|x| model.decision(x).map(f64::abs)).collect::<Result<_>>()?;
    let scale = percentile(&abs, SCALE_PERCENTILE);
    model.scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(model)
}

/// Symbol is the sign of the decision value; confidence is
/// `|decision| / scale` clamped to `[0, 1]`.
pub fn classify(m: &LinearModel, windows: &[&[f64]]) -> Result<ConfidentSymbols> {
    let mut symbols = Vec::with_capacity(windows.len());
    let mut confidence = Vec::with_capacity(windows.len());
    for w in windows {
        let v = m.decision(w)?;
        symbols.push(u8::from(v > 0.0));
        confidence.push((v.abs() / m.scale).clamp(0.0, 1.0));
    }
    ConfidentSymbols::new(symbols, confidence)
}

/// Aligned windows of `sps` samples starting at `offset`.
pub fn windows(d: &[f64], offset: usize, sps: usize) -> Vec<&[f64]> {
    d.get(offset..).unwrap_or(&[]).chunks_exact(sps).collect()
}
