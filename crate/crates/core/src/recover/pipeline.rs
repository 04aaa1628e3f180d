//! Symbols to frames, and classifier training from an IDLE capture.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::alignment::find_bit_alignment;
use super::bits::RecoveredBits;
use super::correct::{CodeStatus, CodeStream, CodeTable, CodeVerdict};
use super::frames::{assemble_frame, find_frame_boundaries, RecoveredFrame};
use super::lfsr::{descramble, sync_to_idle, LfsrSync, SyncConfig, SyncMode};
use crate::channel::IqCapture;
use crate::demod::{demodulate, train_classifier, DemodConfig, Demodulated, Discriminator, LinearModel, TrainConfig};
use crate::demod::ConfidentSymbols;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub sync: SyncConfig,
    pub correction: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            sync: SyncConfig::default(),
            correction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeCounts {
    /// Accepted as received, IDLE and delimiters included.
    pub uncorrupted: usize,
    pub corrected: usize,
    pub invalid_uncorrectable: usize,
}

impl CodeCounts {
    pub fn tally(v: &[CodeVerdict]) -> Self {
        let mut c = Self::default();
        for x in v {
            match x.status {
                CodeStatus::UncorruptedValid | CodeStatus::ValidUnknown => c.uncorrupted += 1,
                CodeStatus::CorrectedValid => c.corrected += 1,
                CodeStatus::InvalidUncorrectable => c.invalid_uncorrectable += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.uncorrupted + self.corrected + self.invalid_uncorrectable
    }
}

#[derive(Debug, Clone)]
pub struct DecodeOutput {
    pub frames: Vec<RecoveredFrame>,
    pub sync: LfsrSync,
    /// Bit offset of the first code.
    pub bit_offset: usize,
    /// One verdict per code. Frame payloads were judged against the data
    /// table, everything else against data plus control codes.
    pub verdicts: Vec<CodeVerdict>,
    /// Descrambled, uncorrected bits.
    pub plain: RecoveredBits,
}

impl DecodeOutput {
    pub fn counts(&self) -> CodeCounts {
        CodeCounts::tally(&self.verdicts)
    }

    /// Descrambled bits outside frames, which should all be 1.
    pub fn idle_bits(&self) -> Vec<u8> {
        let mut in_frame = vec![false; self.verdicts.len()];
        for f in &self.frames {
            let end = (f.end_index + 2).min(in_frame.len());
            in_frame[f.start_index..end].iter_mut().for_each(|x| *x = true);
        }
        in_frame
            .iter()
            .enumerate()
            .filter(|(_, &busy)| !busy)
            .flat_map(|(n, _)| {
                let base = self.bit_offset + 5 * n;
                self.plain.bits[base..base + 5].iter().copied()
            })
            .collect()
    }
}

pub fn decode_symbols(cs: &ConfidentSymbols, cfg: &DecodeConfig) -> Result<DecodeOutput> {
    let received = RecoveredBits::from_symbols(cs)?;
    let sync = sync_to_idle(&received.bits, &cfg.sync)?;
    let keystream = sync.keystream(received.len());
    let plain = descramble(&received, sync.state_at_zero);
    // IDLE is 11111 at every offset, so a stream with neither traffic nor a
    // start delimiter decodes the same under any alignment.
    let bit_offset = match find_bit_alignment(&plain.bits) {
        Err(Error::InsufficientData(why)) => {
            log::warn!("bit alignment undetermined ({why}); assuming an IDLE-only stream");
            0
        }
        other => other?,
    };
    let stream = CodeStream {
        symbols: &cs.symbols,
        conf: &cs.confidence,
        keystream: &keystream,
        offset: bit_offset,
    };
    let n = stream.code_count();
    let mut verdicts = stream.translate(0..n, cfg.correction, &CodeTable::extended());
    let data = CodeTable::data();
    let frames = find_frame_boundaries(&verdicts)
        .iter()
        .map(|b| {
            let payload = stream.translate(b.payload_start..b.payload_end, cfg.correction, &data);
            verdicts[b.payload_start..b.payload_end].copy_from_slice(&payload);
            assemble_frame(b, payload)
        })
        .collect();
    Ok(DecodeOutput {
        frames,
        sync,
        bit_offset,
        verdicts,
        plain,
    })
}

pub fn decode_capture(
    capture: &IqCapture,
    demod: &DemodConfig,
    disc: Discriminator<'_>,
    cfg: &DecodeConfig,
) -> Result<(Demodulated, DecodeOutput)> {
    let d = demodulate(capture, demod, disc)?;
    let out = decode_symbols(&d.symbols, cfg)?;
    Ok((d, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub sync: SyncConfig,
    pub svm: TrainConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        // Single-sequence candidates survive the error rates a classifier
        // is meant to fix; the check window still rejects wrong states.
        Self {
            sync: SyncConfig {
                sequences: 1,
                threshold: 0.7,
                mode: SyncMode::Best,
                ..SyncConfig::default()
            },
            svm: TrainConfig::default(),
        }
    }
}

/// Rectified symbols implied by an IDLE keystream, in the polarity that
/// best matches `observed`.
pub fn idle_symbol_truth(sync: &LfsrSync, observed: &[u8]) -> Vec<u8> {
    let mut truth = Vec::with_capacity(observed.len());
    let mut s = 0u8;
    truth.push(s);
    for k in sync.state_at_zero.keystream().take(observed.len().saturating_sub(1)) {
        s ^= 1 ^ k;
        truth.push(s);
    }
    let agree = truth.iter().zip(observed).filter(|(a, b)| a == b).count();
    if 2 * agree < observed.len() {
        truth.iter_mut().for_each(|t| *t ^= 1);
    }
    truth
}

/// Trains a classifier on an IDLE capture, labeling each symbol from the
/// synchronized scrambler rather than from the noisy decisions.
pub fn train_from_idle(capture: &IqCapture, demod: &DemodConfig, cfg: &TrainingConfig) -> Result<LinearModel> {
    let d = demodulate(capture, demod, Discriminator::Median)?;
    let received = RecoveredBits::from_symbols(&d.symbols)?;
    let sync = sync_to_idle(&received.bits, &cfg.sync)?;
    let labels = idle_symbol_truth(&sync, &d.symbols.symbols);
    let windows = d.windows();
    if windows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: windows.len(),
            got: labels.len(),
        });
    }
    let agreement =
        labels.iter().zip(&d.symbols.symbols).filter(|(a, b)| a == b).count() as f64 / labels.len() as f64;
    let mut model = train_classifier(&windows, &labels, &cfg.svm)?;
    model.trained_on = json!({
        "capture": Value::Object(capture.meta.clone()),
        "sample_rate_hz": capture.sample_rate_hz,
        "symbols": labels.len(),
        "idle_check_fraction": sync.idle_fraction,
        "median_label_agreement": agreement,
        "c": cfg.svm.c,
    });
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::framing::{encode_stream, Frame, WireConfig};

    fn frames() -> Vec<Frame> {
        vec![
            Frame::new("a", (0..300u32).map(|i| (i * 31 % 251) as u8).collect()).unwrap(),
            Frame::new("b", vec![0xDE, 0xAD, 0xBE, 0xEF]).unwrap(),
        ]
    }

    #[test]
    fn noiseless_symbols_roundtrip() {
        let enc = encode_stream(&frames(), &WireConfig::default()).unwrap();
        let out = decode_symbols(&ConfidentSymbols::certain(enc.symbols), &DecodeConfig::default()).unwrap();
        let got: Vec<Vec<u8>> = out.frames.iter().map(|f| f.bytes.clone()).collect();
        let want: Vec<Vec<u8>> = frames().into_iter().map(|f| f.payload).collect();
        assert_eq!(got, want);
        assert_eq!(out.counts().invalid_uncorrectable, 0);
        assert_eq!(out.counts().corrected, 0);
        assert!(out.idle_bits().iter().all(|&b| b == 1));
    }

    #[test]
    fn low_confidence_symbol_error_is_corrected() {
        let enc = encode_stream(&frames(), &WireConfig::default()).unwrap();
        let mut cs = ConfidentSymbols::certain(enc.symbols.clone());
        // A symbol inside the first payload.
        let at = 5 * (enc.spans[0].payload_code + 40) + 2;
        cs.symbols[at] ^= 1;
        cs.confidence[at] = 0.05;
        let out = decode_symbols(&cs, &DecodeConfig::default()).unwrap();
        assert_eq!(out.frames[0].bytes, frames()[0].payload);
        assert!(out.counts().corrected > 0);
    }

    #[test]
    fn polarity_follows_observation() {
        let seed = crate::phy::ScramblerState::new(0x123).unwrap();
        let sync = LfsrSync {
            state_at_zero: seed,
            sequences: 1,
            region: (0, 11),
            idle_fraction: 1.0,
        };
        let truth = idle_symbol_truth(&sync, &[0; 64]);
        let flipped: Vec<u8> = truth.iter().map(|t| t ^ 1).collect();
        assert_eq!(idle_symbol_truth(&sync, &flipped), flipped);
        let c: Vec<u8> = truth.windows(2).map(|w| w[0] ^ w[1]).collect();
        let k: Vec<u8> = seed.keystream().take(63).collect();
        assert!(c.iter().zip(&k).all(|(c, k)| c ^ k == 1));
    }
}
