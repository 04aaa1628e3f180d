//! Frame serialization onto the wire: IDLE fill, J/K, payload nibbles, T/R
//! and inter-packet gap, then scrambling, MLT-3 and rectification.

use serde::{Deserialize, Serialize};

use super::code5::{encode_4b5b, Code5, Nibble};
use super::mlt3::{mlt3_encode, rectify, Mlt3State};
use super::scrambler::{scramble, ScramblerState};
use crate::error::{Error, Result};

/// Minimum inter-packet gap in bit times, delimiters included.
pub const MIN_IPG_BITS: usize = 96;
pub const DEFAULT_IDLE_PREFIX: usize = 4096;
pub const SYMBOL_RATE_BAUD: f64 = 125e6;

/// A raw MAC frame as handed to the PHY.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub id: String,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(id: impl Into<String>, payload: Vec<u8>) -> Result<Self> {
        if payload.is_empty() {
            return Err(Error::EmptyFrame);
        }
        Ok(Self {
            id: id.into(),
            payload,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireConfig {
    /// Gap between frames in bit times, counting T/R and the next J/K.
    pub ipg_bits: usize,
    /// IDLE bits emitted before the first frame, rounded up to whole codes.
    pub idle_prefix_bits: usize,
    pub seed: ScramblerState,
    pub mlt3_start: Mlt3State,
}

impl Default for WireConfig {
    fn default() -> Self {
        Self {
            ipg_bits: MIN_IPG_BITS,
            idle_prefix_bits: DEFAULT_IDLE_PREFIX,
            seed: ScramblerState::ALL_ONES,
            mlt3_start: Mlt3State::default(),
        }
    }
}

/// Where a frame's payload landed in the code stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpan {
    /// Index of the J code.
    pub start_code: usize,
    /// First payload code.
    pub payload_code: usize,
    /// Index of the T code.
    pub end_code: usize,
}

/// Everything the transmitter produced, kept for ground-truth comparisons.
#[derive(Debug, Clone)]
pub struct EncodedStream {
    pub codes: Vec<Code5>,
    /// Unscrambled bits, five per code.
    pub plain_bits: Vec<u8>,
    pub scrambled_bits: Vec<u8>,
    /// Rectified wire symbols, one per bit.
    pub symbols: Vec<u8>,
    pub spans: Vec<FrameSpan>,
}

fn idle_codes_for(bits: usize) -> usize {
    bits.div_ceil(5)
}

/// Builds the code sequence for `frames`.
pub fn frame_codes(frames: &[Frame], cfg: &WireConfig) -> Result<(Vec<Code5>, Vec<FrameSpan>)> {
    if cfg.ipg_bits < MIN_IPG_BITS {
        return Err(Error::InvalidParameter(format!(
            "ipg_bits must be at least {MIN_IPG_BITS}, got {}",
            cfg.ipg_bits
        )));
    }
    // T, R, J, K take 20 of the gap bits.
    let gap_idle = idle_codes_for(cfg.ipg_bits - 20);
    let mut codes = vec![Code5::IDLE; idle_codes_for(cfg.idle_prefix_bits)];
    let mut spans = Vec::with_capacity(frames.len());
    for frame in frames {
        if frame.payload.is_empty() {
            return Err(Error::EmptyFrame);
        }
        let start_code = codes.len();
        codes.extend([Code5::J, Code5::K]);
        for &byte in &frame.payload {
            let (lo, hi) = Nibble::split_byte(byte);
            codes.push(encode_4b5b(lo));
            codes.push(encode_4b5b(hi));
        }
        let end_code = codes.len();
        codes.extend([Code5::T, Code5::R]);
        codes.extend(std::iter::repeat_n(Code5::IDLE, gap_idle));
        spans.push(FrameSpan {
            start_code,
            payload_code: start_code + 2,
            end_code,
        });
    }
    Ok((codes, spans))
}

pub fn encode_stream(frames: &[Frame], cfg: &WireConfig) -> Result<EncodedStream> {
    let (codes, spans) = frame_codes(frames, cfg)?;
    let plain_bits: Vec<u8> = codes.iter().flat_map(|c| c.bits()).collect();
    let scrambled_bits = scramble(&plain_bits, cfg.seed);
    let symbols = rectify(&mlt3_encode(&scrambled_bits, cfg.mlt3_start));
    Ok(EncodedStream {
        codes,
        plain_bits,
        scrambled_bits,
        symbols,
        spans,
    })
}

/// Rectified wire symbols for `frames`; an empty list yields pure IDLE.
pub fn frame_to_wire(frames: &[Frame], cfg: &WireConfig) -> Result<Vec<u8>> {
    Ok(encode_stream(frames, cfg)?.symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::mlt3::transitions_to_bits;

    #[test]
    fn empty_frame_rejected() {
        assert!(Frame::new("x", vec![]).is_err());
    }

    #[test]
    fn short_ipg_rejected() {
        let cfg = WireConfig {
            ipg_bits: 95,
            ..Default::default()
        };
        assert!(frame_to_wire(&[], &cfg).is_err());
    }

    #[test]
    fn pure_idle_descrambles_to_ones() {
        let cfg = WireConfig {
            idle_prefix_bits: 2047,
            ..Default::default()
        };
        let stream = encode_stream(&[], &cfg).unwrap();
        assert_eq!(stream.symbols.len(), 2050);
        // The first bit's transition is relative to the MLT-3 start state.
        let bits = transitions_to_bits(&stream.symbols).unwrap();
        let ks: Vec<u8> = cfg.seed.keystream().skip(1).take(bits.len()).collect();
        assert!(bits.iter().zip(ks).all(|(b, k)| b ^ k == 1));
    }

    #[test]
    fn byte_nibble_order() {
        let frame = Frame::new("f", vec![0xAB]).unwrap();
        let cfg = WireConfig {
            idle_prefix_bits: 10,
            ..Default::default()
        };
        let (codes, spans) = frame_codes(&[frame], &cfg).unwrap();
        assert_eq!(spans[0].payload_code, 4);
        assert_eq!(
            &codes[2..8],
            &[
                Code5::J,
                Code5::K,
                Code5::parse("10111").unwrap(),
                Code5::parse("10110").unwrap(),
                Code5::T,
                Code5::R
            ]
        );
    }

    #[test]
    fn minimum_gap_between_frames() {
        let frames = vec![
            Frame::new("a", vec![1, 2]).unwrap(),
            Frame::new("b", vec![3]).unwrap(),
        ];
        let (_, spans) = frame_codes(&frames, &WireConfig::default()).unwrap();
        // From the T of frame a to the end of the K of frame b.
        let gap_bits = (spans[1].payload_code - spans[0].end_code) * 5;
        assert!(gap_bits >= MIN_IPG_BITS);
        assert!(gap_bits < MIN_IPG_BITS + 5);
    }
}
