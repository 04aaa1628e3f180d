//! Scrambler state recovery from an IDLE region.
//!
//! On IDLE every plaintext bit is 1, so the keystream is the complement of
//! the received bits. Each run of eleven received bits yields a full
//! register candidate. Candidates are aligned to a common time, voted per
//! bit, and the vote is moved forward to the end of the consumed region.

use serde::{Deserialize, Serialize};

use super::bits::RecoveredBits;
use crate::error::{Error, Result};
use crate::phy::scrambler::{ScramblerState, PERIOD, REGISTER_BITS};

pub const DEFAULT_SEQUENCES: usize = 11;
pub const IDLE_CHECK_BITS: usize = 256;
pub const IDLE_THRESHOLD: f64 = 0.95;

const MASK: u16 = 0x7FF;

fn step_raw(r: u16) -> u16 {
    let k = ((r >> 8) ^ (r >> 10)) & 1;
    ((r << 1) | k) & MASK
}

/// Inverse clock: the dropped bit is recovered from the feedback relation.
fn step_back_raw(r: u16) -> u16 {
    let dropped = (r ^ (r >> 9)) & 1;
    (r >> 1) | (dropped << 10)
}

fn advance_raw(mut r: u16, steps: usize) -> u16 {
    for _ in 0..steps % PERIOD {
        r = step_raw(r);
    }
    r
}

/// Moving forward `PERIOD - n` steps is the same as moving back `n`.
fn align_raw(mut r: u16, back: usize) -> u16 {
    for _ in 0..back % PERIOD {
        r = step_back_raw(r);
    }
    r
}

/// Register candidate from `c[start..start + 11]`; the state just after
/// those bits were emitted.
fn candidate(c: &[u8], start: usize) -> u16 {
    (0..REGISTER_BITS).fold(0u16, |acc, i| acc | (u16::from(1 ^ (c[start + REGISTER_BITS - 1 - i] & 1)) << i))
}

/// State that generates the keystream from index `11 * n` of `c` onward.
///
/// Candidate `j` is advanced `2047 - 11j` steps so that all candidates
/// describe the same instant. Ties in the per-bit vote go to 1.
pub fn recover_lfsr_state(c: &[u8], n: usize) -> Result<ScramblerState> {
    if n == 0 {
        return Err(Error::InvalidParameter("sequence count must be at least 1".into()));
    }
    let need = REGISTER_BITS * n;
    if c.len() < need {
        return Err(Error::TooShort { need, got: c.len() });
    }
    let mut ones = [0usize; REGISTER_BITS];
    for j in 0..n {
        let aligned = align_raw(candidate(c, REGISTER_BITS * j), REGISTER_BITS * j);
        for (i, count) in ones.iter_mut().enumerate() {
            *count += usize::from((aligned >> i) & 1 == 1);
        }
    }
    let voted = ones
        .iter()
        .enumerate()
        .fold(0u16, |acc, (i, &k)| acc | (u16::from(2 * k >= n) << i));
    let end = advance_raw(voted, REGISTER_BITS * (n - 1));
    ScramblerState::new(end).map_err(|_| Error::LfsrRecovery("recovered register is all zero".into()))
}

/// XOR with the free-running keystream; confidences pass through.
pub fn descramble(c: &RecoveredBits, s: ScramblerState) -> RecoveredBits {
    RecoveredBits {
        bits: c.bits.iter().zip(s.keystream()).map(|(&b, k)| (b & 1) ^ k).collect(),
        conf: c.conf.clone(),
    }
}

/// Fraction of ones after descrambling `bits` with a keystream starting at `s`.
pub fn idle_fraction(bits: &[u8], s: ScramblerState) -> f64 {
    if bits.is_empty() {
        return 0.0;
    }
    let ones = bits.iter().zip(s.keystream()).filter(|(&b, k)| (b & 1) ^ k == 1).count();
    ones as f64 / bits.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyncMode {
    /// Earliest region passing the threshold.
    First,
    /// Region with the highest check score, if it passes the threshold.
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncConfig {
    pub sequences: usize,
    pub threshold: f64,
    pub check_bits: usize,
    pub mode: SyncMode,
    /// Candidate regions start every `stride` bits.
    pub stride: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self {
            sequences: DEFAULT_SEQUENCES,
            threshold: IDLE_THRESHOLD,
            check_bits: IDLE_CHECK_BITS,
            mode: SyncMode::First,
            stride: REGISTER_BITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfsrSync {
    /// Generates the keystream for bit 0 of the stream.
    pub state_at_zero: ScramblerState,
    pub sequences: usize,
    /// Consumed bits `[start, end)`.
    pub region: (usize, usize),
    pub idle_fraction: f64,
}

impl LfsrSync {
    pub fn keystream(&self, len: usize) -> Vec<u8> {
        self.state_at_zero.keystream().take(len).collect()
    }
}

/// Scans for an IDLE region whose recovered state explains the bits after it.
pub fn sync_to_idle(bits: &[u8], cfg: &SyncConfig) -> Result<LfsrSync> {
    if cfg.sequences == 0 || cfg.stride == 0 || cfg.check_bits == 0 {
        return Err(Error::InvalidParameter("sequences, stride and check_bits must be positive".into()));
    }
    let span = REGISTER_BITS * cfg.sequences;
    let need = span + cfg.check_bits;
    if bits.len() < need {
        return Err(Error::TooShort { need, got: bits.len() });
    }
    let mut best: Option<LfsrSync> = None;
    for start in (0..=bits.len() - need).step_by(cfg.stride) {
        let end = start + span;
        let Ok(state) = recover_lfsr_state(&bits[start..end], cfg.sequences) else {
            continue;
        };
        let frac = idle_fraction(&bits[end..end + cfg.check_bits], state);
        if best.is_some_and(|b| b.idle_fraction >= frac) {
            continue;
        }
        best = Some(LfsrSync {
            state_at_zero: state.rewind(end),
            sequences: cfg.sequences,
            region: (start, end),
            idle_fraction: frac,
        });
        if cfg.mode == SyncMode::First && frac >= cfg.threshold {
            break;
        }
    }
    match best {
        Some(b) if b.idle_fraction >= cfg.threshold => Ok(b),
        Some(b) => Err(Error::LfsrRecovery(format!(
            "no IDLE region found; best check score {:.3} below {:.3}",
            b.idle_fraction, cfg.threshold
        ))),
        None => Err(Error::LfsrRecovery("every candidate register was zero".into())),
    }
}
