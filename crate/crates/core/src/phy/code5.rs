//! 4B/5B block code.
//!
//! Codes are stored as the integer value of the 5-bit pattern read left to
//! right as conventionally written (`11110` for nibble 0), so bit 4 is transmitted first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 4-bit data value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Nibble(u8);

impl Nibble {
    pub fn new(value: u8) -> Result<Self> {
        if value > 0x0F {
            return Err(Error::InvalidNibble(value));
        }
        Ok(Self(value))
    }

    /// Low and high nibble of a byte, in that order.
    pub fn split_byte(byte: u8) -> (Self, Self) {
        (Self(byte & 0x0F), Self(byte >> 4))
    }

    pub fn join(low: Self, high: Self) -> u8 {
        low.0 | (high.0 << 4)
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Nibble {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Nibble> for u8 {
    fn from(n: Nibble) -> u8 {
        n.0
    }
}

/// A 5-bit line code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Code5(u8);

impl Code5 {
    pub const IDLE: Code5 = Code5(0b11111);
    pub const J: Code5 = Code5(0b11000);
    pub const K: Code5 = Code5(0b10001);
    pub const T: Code5 = Code5(0b01101);
    pub const R: Code5 = Code5(0b00111);

    pub fn new(value: u8) -> Result<Self> {
        if value > 0x1F {
            return Err(Error::InvalidCode(value));
        }
        Ok(Self(value))
    }

    /// Builds a code from exactly five 0/1 bits, first transmitted bit first.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() != 5 {
            return Err(Error::DimensionMismatch {
                expected: 5,
                got: bits.len(),
            });
        }
        Ok(Self(bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))))
    }

    /// Parses a five character string such as `"11110"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidParameter(format!("not a 5-bit code: {s:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// The five bits in transmission order.
    pub fn bits(self) -> [u8; 5] {
        std::array::from_fn(|i| (self.0 >> (4 - i)) & 1)
    }

    pub fn xor(self, mask: Code5) -> Code5 {
        Code5(self.0 ^ mask.0)
    }

    pub fn hamming(self, other: Code5) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    pub fn all() -> impl Iterator<Item = Code5> {
        (0..32).map(Code5)
    }
}

impl TryFrom<u8> for Code5 {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Code5> for u8 {
    fn from(c: Code5) -> u8 {
        c.0
    }
}

impl fmt::Debug for Code5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code5({self})")
    }
}

impl fmt::Display for Code5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:05b}", self.0)
    }
}

/// Why a code is not accepted by the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvalidReason {
    /// `00000`, SLEEP.
    Sleep,
    /// `00100`, H.
    ForceTransmitError,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeClass {
    Data(Nibble),
    Idle,
    J,
    K,
    T,
    R,
    Invalid(InvalidReason),
}

/// Data codes indexed by nibble value.
pub const DATA_CODES: [u8; 16] = [
    0b11110, 0b01001, 0b10100, 0b10101, 0b01010, 0b01011, 0b01110, 0b01111, 0b10010, 0b10011,
    0b10110, 0b10111, 0b11010, 0b11011, 0b11100, 0b11101,
];

const fn build_decode_table() -> [i8; 32] {
    let mut table = [-1i8; 32];
    let mut i = 0;
    while i < 16 {
        table[DATA_CODES[i] as usize] = i as i8;
        i += 1;
    }
    table
}

const DATA_DECODE: [i8; 32] = build_decode_table();

pub fn encode_4b5b(n: Nibble) -> Code5 {
    Code5(DATA_CODES[n.0 as usize])
}

/// Total classification over all 32 codes.
pub fn classify_code5(c: Code5) -> CodeClass {
    if let Ok(idx) = u8::try_from(DATA_DECODE[c.0 as usize]) {
        return CodeClass::Data(Nibble(idx));
    }
    match c {
        Code5::IDLE => CodeClass::Idle,
        Code5::J => CodeClass::J,
        Code5::K => CodeClass::K,
        Code5::T => CodeClass::T,
        Code5::R => CodeClass::R,
        Code5(0b00000) => CodeClass::Invalid(InvalidReason::Sleep),
        Code5(0b00100) => CodeClass::Invalid(InvalidReason::ForceTransmitError),
        _ => CodeClass::Invalid(InvalidReason::Undefined),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> Code5 {
        Code5::parse(s).unwrap()
    }

    #[test]
    fn table_examples() {
        assert_eq!(encode_4b5b(Nibble::new(0x0).unwrap()), code("11110"));
        assert_eq!(encode_4b5b(Nibble::new(0x5).unwrap()), code("01011"));
        assert_eq!(encode_4b5b(Nibble::new(0xF).unwrap()), code("11101"));
        assert_eq!(classify_code5(code("11111")), CodeClass::Idle);
        assert_eq!(
            classify_code5(code("00100")),
            CodeClass::Invalid(InvalidReason::ForceTransmitError)
        );
        assert_eq!(
            classify_code5(code("10010")),
            CodeClass::Data(Nibble::new(8).unwrap())
        );
    }

    #[test]
    fn classification_counts() {
        let mut data = 0;
        let mut control = 0;
        let mut idle = 0;
        let mut invalid = 0;
        for c in Code5::all() {
            match classify_code5(c) {
                CodeClass::Data(_) => data += 1,
                CodeClass::Idle => idle += 1,
                CodeClass::J | CodeClass::K | CodeClass::T | CodeClass::R => control += 1,
                CodeClass::Invalid(_) => invalid += 1,
            }
        }
        assert_eq!((data, idle, control, invalid), (16, 1, 4, 11));
        assert_eq!(
            classify_code5(code("00000")),
            CodeClass::Invalid(InvalidReason::Sleep)
        );
    }

    #[test]
    fn bits_are_msb_first() {
        assert_eq!(code("10001").bits(), [1, 0, 0, 0, 1]);
        assert_eq!(Code5::from_bits(&[0, 1, 1, 0, 1]).unwrap(), Code5::T);
        assert!(Code5::from_bits(&[1, 1]).is_err());
        assert!(Code5::new(32).is_err());
        assert!(Nibble::new(16).is_err());
    }

    #[test]
    fn byte_split_is_low_first() {
        let (lo, hi) = Nibble::split_byte(0xAB);
        assert_eq!((lo.value(), hi.value()), (0xB, 0xA));
        assert_eq!(Nibble::join(lo, hi), 0xAB);
    }
}
