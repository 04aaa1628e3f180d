//! MLT-3 line coding and the rectified view an implant observes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mlt3Level {
    Minus,
    Zero,
    Plus,
}

impl Mlt3Level {
    pub fn value(self) -> i8 {
        match self {
            Mlt3Level::Minus => -1,
            Mlt3Level::Zero => 0,
            Mlt3Level::Plus => 1,
        }
    }
}

/// Position in the four-state cycle `+1 -> 0 -> -1 -> 0 -> +1`.
///
/// The two zero states differ only in which level comes next, so a state
/// carries both the current level and the cycle phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Mlt3State {
    Plus,
    /// At 0, heading to -1.
    ZeroFalling,
    Minus,
    /// At 0, heading to +1.
    #[default]
    ZeroRising,
}

impl Mlt3State {
    pub fn level(self) -> Mlt3Level {
        match self {
            Mlt3State::Plus => Mlt3Level::Plus,
            Mlt3State::Minus => Mlt3Level::Minus,
            Mlt3State::ZeroFalling | Mlt3State::ZeroRising => Mlt3Level::Zero,
        }
    }

    pub fn next(self) -> Mlt3State {
        match self {
            Mlt3State::Plus => Mlt3State::ZeroFalling,
            Mlt3State::ZeroFalling => Mlt3State::Minus,
            Mlt3State::Minus => Mlt3State::ZeroRising,
            Mlt3State::ZeroRising => Mlt3State::Plus,
        }
    }
}

/// One output level per input bit: a 1 advances the cycle, a 0 stalls.
pub fn mlt3_encode(bits: &[u8], start: Mlt3State) -> Vec<Mlt3Level> {
    bits.iter()
        .scan(start, |state, &b| {
            if b & 1 == 1 {
                *state = state.next();
            }
            Some(state.level())
        })
        .collect()
}

/// `|D+ - D-|` as a bit.
pub fn rectify(levels: &[Mlt3Level]) -> Vec<u8> {
    levels
        .iter()
        .map(|&l| u8::from(l != Mlt3Level::Zero))
        .collect()
}

/// `c[i] = s[i+1] ^ s[i]`. The output is one shorter than the input.
pub fn transitions_to_bits(symbols: &[u8]) -> Result<Vec<u8>> {
    if symbols.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: symbols.len(),
        });
    }
    Ok(symbols.windows(2).map(|w| (w[0] ^ w[1]) & 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Mlt3Level::*;

    #[test]
    fn ones_from_plus_cycle() {
        let levels = mlt3_encode(&[1, 1, 1, 1], Mlt3State::Plus);
        assert_eq!(levels, vec![Zero, Minus, Zero, Plus]);
    }

    #[test]
    fn zeros_stall() {
        for start in [
            Mlt3State::Plus,
            Mlt3State::ZeroFalling,
            Mlt3State::Minus,
            Mlt3State::ZeroRising,
        ] {
            let levels = mlt3_encode(&[0; 4], start);
            assert!(levels.iter().all(|&l| l == start.level()));
        }
    }

    #[test]
    fn continuous_ones_have_period_four() {
        let levels = mlt3_encode(&[1; 64], Mlt3State::default());
        for i in 4..levels.len() {
            assert_eq!(levels[i], levels[i - 4]);
        }
        assert_ne!(levels[0], levels[2]);
    }

    #[test]
    fn rectify_examples() {
        assert_eq!(rectify(&[Plus, Zero, Minus, Zero]), vec![1, 0, 1, 0]);
        assert_eq!(rectify(&[Zero; 5]), vec![0; 5]);
    }

    #[test]
    fn rectified_transition_is_the_bit_for_every_state() {
        // Exhaustive over the 4 states x 2 input bits.
        let states = [
            Mlt3State::Plus,
            Mlt3State::ZeroFalling,
            Mlt3State::Minus,
            Mlt3State::ZeroRising,
        ];
        for s in states {
            for bit in [0u8, 1] {
                let before = u8::from(s.level() != Zero);
                let after = rectify(&mlt3_encode(&[bit], s))[0];
                assert_eq!(before ^ after, bit, "state {s:?} bit {bit}");
            }
        }
    }

    #[test]
    fn transitions_examples() {
        assert_eq!(transitions_to_bits(&[1, 0, 1, 0]).unwrap(), vec![1, 1, 1]);
        assert_eq!(transitions_to_bits(&[1; 6]).unwrap(), vec![0; 5]);
        assert!(transitions_to_bits(&[1]).is_err());
    }
}
