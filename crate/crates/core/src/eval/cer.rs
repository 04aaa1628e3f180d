//! Code error rate as a function of symbol error rate.
//!
//! A code spans six symbols. Decoding looks only at transitions, so a
//! window whose six symbols are all inverted still decodes correctly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CerVariant {
    /// `1 - (1 - p)^6 + p^6`.
    AsPrinted,
    /// `1 - (1 - p)^6 - p^6`.
    Exclusion,
}

pub fn cer_model(p_e: f64, variant: CerVariant) -> Result<f64> {
    if !(0.0..=0.5).contains(&p_e) {
        return Err(Error::InvalidParameter(format!("p_e must be in [0, 0.5], got {p_e}")));
    }
    let clean = (1.0 - p_e).powi(6);
    let inverted = p_e.powi(6);
    Ok(match variant {
        CerVariant::AsPrinted => 1.0 - clean + inverted,
        CerVariant::Exclusion => 1.0 - clean - inverted,
    })
}

/// How a window with all six symbols flipped is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvertedWindow {
    /// Transition decoding is polarity blind, so it decodes correctly.
    Correct,
    Incorrect,
}

const CHUNK: usize = 1 << 16;

/// Fraction of six-symbol windows whose five transitions are wrong after
/// i.i.d. symbol flips at rate `p_e`.
pub fn cer_monte_carlo(p_e: f64, windows: usize, convention: InvertedWindow, seed: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::InvalidParameter(format!("p_e must be in [0, 1], got {p_e}")));
    }
    if windows == 0 {
        return Err(Error::InvalidParameter("need at least one window".into()));
    }
    let chunks = windows.div_ceil(CHUNK);
    let errors: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(windows - c * CHUNK);
            (0..n)
                .filter(|_| {
                    let flips: [bool; 6] = std::array::from_fn(|_| rng.random_bool(p_e));
                    let transitions_wrong = flips.windows(2).any(|w| w[0] != w[1]);
                    match convention {
                        InvertedWindow::Correct => transitions_wrong,
                        InvertedWindow::Incorrect => transitions_wrong || flips[0],
                    }
                })
                .count()
        })
        .sum();
    Ok(errors as f64 / windows as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CerCheck {
    pub p_e: f64,
    pub monte_carlo: f64,
    pub as_printed: f64,
    pub exclusion: f64,
    /// Variant closer to the simulation.
    pub closer: CerVariant,
}

/// Compares both closed forms with the transition-decoding simulation.
pub fn check_cer_model(p_e: f64, windows: usize, seed: u64) -> Result<CerCheck> {
    let mc = cer_monte_carlo(p_e, windows, InvertedWindow::Correct, seed)?;
    let as_printed = cer_model(p_e, CerVariant::AsPrinted)?;
    let exclusion = cer_model(p_e, CerVariant::Exclusion)?;
    let closer = if (mc - exclusion).abs() <= (mc - as_printed).abs() {
        CerVariant::Exclusion
    } else {
        CerVariant::AsPrinted
    };
    Ok(CerCheck {
        p_e,
        monte_carlo: mc,
        as_printed,
        exclusion,
        closer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        for v in [CerVariant::AsPrinted, CerVariant::Exclusion] {
            assert_eq!(cer_model(0.0, v).unwrap(), 0.0);
        }
        assert!((cer_model(0.1, CerVariant::AsPrinted).unwrap() - 0.468560).abs() < 1e-6);
        assert!((cer_model(0.5, CerVariant::AsPrinted).unwrap() - 1.0).abs() < 1e-12);
        assert!((cer_model(0.5, CerVariant::Exclusion).unwrap() - 0.96875).abs() < 1e-12);
        assert!(cer_model(0.6, CerVariant::Exclusion).is_err());
    }

    #[test]
    fn variants_differ_by_twice_p6() {
        for i in 0..=50 {
            let p = i as f64 / 100.0;
            let d = cer_model(p, CerVariant::AsPrinted).unwrap() - cer_model(p, CerVariant::Exclusion).unwrap();
            assert!((d - 2.0 * p.powi(6)).abs() < 1e-15);
        }
    }

    #[test]
    fn conventions_converge_to_their_forms() {
        let p = 0.5;
        let n = 400_000;
        let correct = cer_monte_carlo(p, n, InvertedWindow::Correct, 1).unwrap();
        let incorrect = cer_monte_carlo(p, n, InvertedWindow::Incorrect, 1).unwrap();
        assert!((correct - cer_model(p, CerVariant::Exclusion).unwrap()).abs() < 0.003);
        assert!((incorrect - (1.0 - (1.0 - p).powi(6))).abs() < 0.003);
    }

    #[test]
    fn deterministic() {
        let a = cer_monte_carlo(0.1, 100_000, InvertedWindow::Correct, 9).unwrap();
        let b = cer_monte_carlo(0.1, 100_000, InvertedWindow::Correct, 9).unwrap();
        assert_eq!(a, b);
    }
}
