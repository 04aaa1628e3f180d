//! Side-stream scrambler: an 11-bit LFSR with feedback `k[n] = k[n-9] ^ k[n-11]`.
//!
//! The register keeps the eleven most recent keystream bits. Position `i`
//! holds `k[n-i-1]`, so position 0 is the bit emitted last. Bit `i` of the
//! packed `u16` is register position `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keystream period of the maximal-length register.
pub const PERIOD: usize = 2047;
pub const REGISTER_BITS: usize = 11;
const MASK: u16 = 0x7FF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u16", into = "u16")]
pub struct ScramblerState(u16);

impl Default for ScramblerState {
    fn default() -> Self {
        Self::ALL_ONES
    }
}

impl ScramblerState {
    pub const ALL_ONES: ScramblerState = ScramblerState(MASK);

    /// Rejects the all-zero register, which is absorbing.
    pub fn new(register: u16) -> Result<Self> {
        if register == 0 || register > MASK {
            return Err(Error::InvalidScramblerState(register));
        }
        Ok(Self(register))
    }

    /// `register[i]` for `i` in `0..11`.
    pub fn from_register(register: &[u8]) -> Result<Self> {
        if register.len() != REGISTER_BITS {
            return Err(Error::DimensionMismatch {
                expected: REGISTER_BITS,
                got: register.len(),
            });
        }
        let packed = register
            .iter()
            .enumerate()
            .fold(0u16, |acc, (i, &b)| acc | (u16::from(b & 1) << i));
        Self::new(packed)
    }

    /// State that will emit `history[11..]` next, given the last eleven
    /// keystream bits in emission order (`history[10]` is the most recent).
    pub fn from_history(history: &[u8]) -> Result<Self> {
        if history.len() != REGISTER_BITS {
            return Err(Error::DimensionMismatch {
                expected: REGISTER_BITS,
                got: history.len(),
            });
        }
        let register: Vec<u8> = history.iter().rev().copied().collect();
        Self::from_register(&register)
    }

    pub fn register(self) -> [u8; REGISTER_BITS] {
        std::array::from_fn(|i| ((self.0 >> i) & 1) as u8)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// Emits one keystream bit and shifts it into position 0.
    pub fn step(self) -> (u8, ScramblerState) {
        let k = ((self.0 >> 8) ^ (self.0 >> 10)) & 1;
        (k as u8, ScramblerState(((self.0 << 1) | k) & MASK))
    }

    pub fn advance(self, steps: usize) -> ScramblerState {
        (0..steps % PERIOD).fold(self, |s, _| s.step().1)
    }

    /// Inverse of [`advance`](Self::advance).
    pub fn rewind(self, steps: usize) -> ScramblerState {
        self.advance(PERIOD - steps % PERIOD)
    }

    pub fn keystream(self) -> Keystream {
        Keystream { state: self }
    }
}

impl TryFrom<u16> for ScramblerState {
    type Error = Error;

    fn try_from(value: u16) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ScramblerState> for u16 {
    fn from(s: ScramblerState) -> u16 {
        s.0
    }
}

/// One scrambler clock: output bit and next state.
pub fn scrambler_step(s: ScramblerState) -> (u8, ScramblerState) {
    s.step()
}

/// Free-running, infinite keystream.
#[derive(Debug, Clone)]
pub struct Keystream {
    state: ScramblerState,
}

impl Keystream {
    pub fn state(&self) -> ScramblerState {
        self.state
    }
}

impl Iterator for Keystream {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        let (k, next) = self.state.step();
        self.state = next;
        Some(k)
    }
}

/// XORs `bits` with the keystream started at `seed`. Descrambling is the
/// same operation.
pub fn scramble(bits: &[u8], seed: ScramblerState) -> Vec<u8> {
    bits.iter()
        .zip(seed.keystream())
        .map(|(&b, k)| (b & 1) ^ k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain recurrence over a growing history, kept independent of the
    /// packed register.
    fn reference_keystream(register: [u8; 11], len: usize) -> Vec<u8> {
        // register[i] = k[n-i-1]: history in time order is the reverse.
        let mut history: Vec<u8> = register.iter().rev().copied().collect();
        for _ in 0..len {
            let n = history.len();
            history.push(history[n - 9] ^ history[n - 11]);
        }
        history.split_off(11)
    }

    #[test]
    fn all_ones_step() {
        let (k, next) = ScramblerState::ALL_ONES.step();
        assert_eq!(k, 0);
        assert_eq!(next.register(), [0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn rejects_zero() {
        assert!(ScramblerState::new(0).is_err());
        assert!(ScramblerState::new(0x800).is_err());
        assert!(ScramblerState::from_register(&[0; 11]).is_err());
    }

    #[test]
    fn seed_00000000001_matches_oracle() {
        let reg = [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        let seed = ScramblerState::from_register(&reg).unwrap();
        let got: Vec<u8> = seed.keystream().take(11).collect();
        let want = reference_keystream(reg, 11);
        assert_eq!(got, want);
        // Only k[n-11] is set: k[0] = 1, and that bit reaches tap 9 again
        // at k[9].
        assert_eq!(got, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0]);
    }

    #[test]
    fn period_is_2047() {
        let seed = ScramblerState::new(0x3A5).unwrap();
        let mut s = seed;
        for i in 1..=PERIOD {
            s = s.step().1;
            if s == seed {
                assert_eq!(i, PERIOD);
                return;
            }
        }
        panic!("state did not return");
    }

    #[test]
    fn history_roundtrip_predicts_keystream() {
        let ks: Vec<u8> = ScramblerState::new(0x123).unwrap().keystream().take(40).collect();
        let s = ScramblerState::from_history(&ks[5..16]).unwrap();
        let next: Vec<u8> = s.keystream().take(24).collect();
        assert_eq!(next, ks[16..40]);
    }

    #[test]
    fn rewind_inverts_advance() {
        let s = ScramblerState::new(0x555).unwrap();
        assert_eq!(s.advance(123).rewind(123), s);
        assert_eq!(s.advance(PERIOD), s);
    }

    #[test]
    fn idle_scrambles_to_complement() {
        let seed = ScramblerState::new(0x0F0).unwrap();
        let ks: Vec<u8> = seed.keystream().take(64).collect();
        let out = scramble(&[1; 64], seed);
        assert!(out.iter().zip(&ks).all(|(o, k)| *o == 1 - k));
    }
}
