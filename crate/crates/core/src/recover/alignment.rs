//! 5-bit code boundary search over descrambled bits.

use super::correct::CodeTable;
use crate::error::{Error, Result};
use crate::phy::code5::Code5;

pub const MIN_NON_IDLE_CODES: usize = 200;

/// Bits of IDLE followed by J and K.
const START_PATTERN: [u8; 15] = [1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1];

fn codes_at(plain: &[u8], offset: usize) -> impl Iterator<Item = Code5> + '_ {
    plain
        .get(offset..)
        .unwrap_or(&[])
        .chunks_exact(5)
        .map(|c| Code5::from_bits(c).expect("five bits"))
}

/// `(invalid, non_idle)` code counts at `offset`.
pub fn code_counts(plain: &[u8], offset: usize, table: &CodeTable) -> (usize, usize) {
    codes_at(plain, offset).fold((0, 0), |(inv, busy), c| {
        (inv + usize::from(!table.contains(c)), busy + usize::from(c != Code5::IDLE))
    })
}

/// Offset in `[0, 5)` with the fewest invalid codes against the data and
/// control table; ties go to the smallest offset.
pub fn recover_bit_alignment(plain: &[u8]) -> Result<usize> {
    let table = CodeTable::extended();
    let counts: Vec<(usize, usize)> = (0..5).map(|o| code_counts(plain, o, &table)).collect();
    let busy = counts.iter().map(|c| c.1).min().unwrap_or(0);
    if busy < MIN_NON_IDLE_CODES {
        return Err(Error::InsufficientData(format!(
            "{busy} non-IDLE codes, need {MIN_NON_IDLE_CODES}"
        )));
    }
    let mut best = 0;
    for o in 1..5 {
        if counts[o].0 < counts[best].0 {
            best = o;
        }
    }
    Ok(best)
}

/// Offset implied by the first IDLE-to-J/K transition.
pub fn alignment_from_delimiter(plain: &[u8]) -> Result<usize> {
    plain
        .windows(START_PATTERN.len())
        .position(|w| w == START_PATTERN)
        .map(|p| (p + 5) % 5)
        .ok_or_else(|| Error::InsufficientData("no start delimiter found".into()))
}

/// Invalid-count search when there is enough traffic, delimiter search
/// otherwise.
pub fn find_bit_alignment(plain: &[u8]) -> Result<usize> {
    match recover_bit_alignment(plain) {
        Err(Error::InsufficientData(_)) => alignment_from_delimiter(plain),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::framing::{frame_codes, Frame, WireConfig};

    fn plain_for(frames: &[Frame], shift: usize) -> Vec<u8> {
        let (codes, _) = frame_codes(frames, &WireConfig::default()).unwrap();
        codes.iter().flat_map(|c| c.bits()).skip(shift).collect()
    }

    fn payload(n: usize) -> Vec<u8> {
        (0..n).map(|i| (i * 37 + 11) as u8).collect()
    }

    #[test]
    fn busy_stream_alignment_and_margin() {
        let frames = [Frame::new("a", payload(500)).unwrap()];
        for shift in 0..5 {
            let plain = plain_for(&frames, shift);
            let want = (5 - shift) % 5;
            assert_eq!(recover_bit_alignment(&plain).unwrap(), want);
            let table = CodeTable::extended();
            let right = code_counts(&plain, want, &table).0;
            for o in (0..5).filter(|&o| o != want) {
                let wrong = code_counts(&plain, o, &table).0;
                assert!(wrong >= 10 * right.max(1), "offset {o}: {wrong} vs {right}");
            }
        }
    }

    #[test]
    fn short_frame_falls_back_to_delimiter() {
        let frames = [Frame::new("a", vec![0xDE, 0xAD, 0xBE, 0xEF]).unwrap()];
        for shift in 0..5 {
            let plain = plain_for(&frames, shift);
            assert!(matches!(recover_bit_alignment(&plain), Err(Error::InsufficientData(_))));
            assert_eq!(find_bit_alignment(&plain).unwrap(), (5 - shift) % 5);
        }
    }

    #[test]
    fn pure_idle_is_insufficient() {
        assert!(find_bit_alignment(&[1; 4000]).is_err());
    }
}
