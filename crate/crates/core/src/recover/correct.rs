//! Code translation with confidence-driven correction of invalid codes.
//!
//! Code `n` at bit offset `o` is carried by the transitions of the six
//! symbols `o + 5n ..= o + 5n + 5`. Adjacent windows share one symbol. An
//! invalid code is replaced by the valid six-symbol hypothesis that best
//! agrees with the observed symbols, weighting each symbol by its
//! confidence. Symbols shared with an accepted neighbour stay frozen.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::code5::{classify_code5, Code5, CodeClass, Nibble, DATA_CODES};

/// Accepted codes and the nibble each one carries, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeTable {
    valid: [bool; 32],
    nibble: [Option<Nibble>; 32],
}

impl CodeTable {
    /// The sixteen data codes.
    pub fn data() -> Self {
        let mut t = CodeTable {
            valid: [false; 32],
            nibble: [None; 32],
        };
        for (n, &c) in DATA_CODES.iter().enumerate() {
            t.valid[c as usize] = true;
            t.nibble[c as usize] = Nibble::new(n as u8).ok();
        }
        t
    }

    /// Data codes plus IDLE, J, K, T and R.
    pub fn extended() -> Self {
        let mut t = Self::data();
        for c in [Code5::IDLE, Code5::J, Code5::K, Code5::T, Code5::R] {
            t.valid[c.value() as usize] = true;
        }
        t
    }

    /// Every entry XORed with `mask`; the nibble follows its code.
    pub fn xor_shift(&self, mask: Code5) -> Self {
        let mut t = CodeTable {
            valid: [false; 32],
            nibble: [None; 32],
        };
        for c in Code5::all() {
            let to = c.xor(mask).value() as usize;
            t.valid[to] = self.valid[c.value() as usize];
            t.nibble[to] = self.nibble[c.value() as usize];
        }
        t
    }

    pub fn contains(&self, c: Code5) -> bool {
        self.valid[c.value() as usize]
    }

    pub fn nibble(&self, c: Code5) -> Option<Nibble> {
        self.nibble[c.value() as usize]
    }

    pub fn codes(&self) -> Vec<Code5> {
        Code5::all().filter(|&c| self.contains(c)).collect()
    }

    pub fn len(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Data table with every entry XORed with `mask`.
pub fn xor_shift_table(mask: Code5) -> CodeTable {
    CodeTable::data().xor_shift(mask)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeStatus {
    /// Accepted as received.
    UncorruptedValid,
    /// Accepted after its window was changed.
    CorrectedValid,
    InvalidUncorrectable,
    /// Accepted but carries no nibble (IDLE or a delimiter).
    ValidUnknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeVerdict {
    /// Code as received, before any correction.
    pub raw5: Code5,
    /// Code after correction; equal to `raw5` unless corrected.
    pub code: Code5,
    pub status: CodeStatus,
    pub nibble: Option<Nibble>,
}

impl CodeVerdict {
    pub fn is_valid(&self) -> bool {
        self.status != CodeStatus::InvalidUncorrectable
    }

    /// Control or IDLE meaning of the decided code, if any.
    pub fn class(&self) -> CodeClass {
        classify_code5(self.code)
    }
}

/// Six symbols with confidences and the keystream bits for their five
/// transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeWindow {
    pub symbols: [u8; 6],
    pub conf: [f64; 6],
    pub keystream: [u8; 5],
    /// Symbols that may not change.
    pub frozen: [bool; 6],
}

impl CodeWindow {
    pub fn decode(&self) -> Code5 {
        decode_window(&self.symbols, &self.keystream)
    }
}

fn decode_window(s: &[u8; 6], k: &[u8; 5]) -> Code5 {
    let v = (0..5).fold(0u8, |acc, i| (acc << 1) | ((s[i] ^ s[i + 1] ^ k[i]) & 1));
    Code5::new(v).expect("five bits")
}

fn candidate_symbols(bits: u8) -> [u8; 6] {
    std::array::from_fn(|i| (bits >> (5 - i)) & 1)
}

const SCORE_EPS: f64 = 1e-12;

/// Best valid hypothesis for an invalid window.
///
/// Scores are `sum(conf_i * (+1 if symbol i kept else -1))`. Candidates are
/// visited in lexicographic order and only a strictly better score replaces
/// the incumbent, so ties resolve to the smallest sequence.
pub fn correct_code(w: &CodeWindow, table: &CodeTable) -> Result<(CodeVerdict, [u8; 6])> {
    let observed = w.decode();
    if table.contains(observed) {
        return Err(Error::Precondition(format!("code {observed} is already valid")));
    }
    let mut best: Option<(f64, [u8; 6], Code5)> = None;
    for bits in 0u8..64 {
        let cand = candidate_symbols(bits);
        if (0..6).any(|i| w.frozen[i] && cand[i] != w.symbols[i] & 1) {
            continue;
        }
        let code = decode_window(&cand, &w.keystream);
        if !table.contains(code) {
            continue;
        }
        let score: f64 = (0..6)
            .map(|i| if cand[i] == w.symbols[i] & 1 { w.conf[i] } else { -w.conf[i] })
            .sum();
        if best.is_none_or(|(b, _, _)| score > b + SCORE_EPS) {
            best = Some((score, cand, code));
        }
    }
    Ok(match best {
        Some((_, cand, code)) => (
            CodeVerdict {
                raw5: observed,
                code,
                status: CodeStatus::CorrectedValid,
                nibble: table.nibble(code),
            },
            cand,
        ),
        None => (
            CodeVerdict {
                raw5: observed,
                code: observed,
                status: CodeStatus::InvalidUncorrectable,
                nibble: None,
            },
            w.symbols,
        ),
    })
}

/// Symbols, confidences and keystream for one capture, viewed as codes.
#[derive(Debug, Clone, Copy)]
pub struct CodeStream<'a> {
    pub symbols: &'a [u8],
    pub conf: &'a [f64],
    /// `keystream[i]` applies to the transition after symbol `i`.
    pub keystream: &'a [u8],
    /// Bit offset of code 0.
    pub offset: usize,
}

impl CodeStream<'_> {
    pub fn code_count(&self) -> usize {
        let bits = self.symbols.len().saturating_sub(1).min(self.keystream.len());
        bits.saturating_sub(self.offset) / 5
    }

    fn window(&self, syms: &[u8], n: usize) -> ([u8; 6], [u8; 5], usize) {
        let base = self.offset + 5 * n;
        (
            std::array::from_fn(|i| syms[base + i] & 1),
            std::array::from_fn(|i| self.keystream[base + i] & 1),
            base,
        )
    }

    /// Translates the codes in `range`. Symbols just outside the range are
    /// never modified.
    pub fn translate(&self, range: Range<usize>, correction: bool, table: &CodeTable) -> Vec<CodeVerdict> {
        let end = range.end.min(self.code_count());
        let start = range.start.min(end);
        let original = &self.symbols;
        let mut syms = self.symbols.to_vec();
        // Whether a neighbour's correction changed code n's window.
        let mut touched = vec![false; end - start + 1];
        let mut out = Vec::with_capacity(end - start);
        for n in start..end {
            let (s, k, base) = self.window(&syms, n);
            let (raw_s, _, _) = self.window(original, n);
            let raw5 = decode_window(&raw_s, &k);
            let code = decode_window(&s, &k);
            if table.contains(code) {
                let modified = touched[n - start];
                let status = match (table.nibble(code), modified) {
                    (_, true) => CodeStatus::CorrectedValid,
                    (Some(_), false) => CodeStatus::UncorruptedValid,
                    (None, false) => CodeStatus::ValidUnknown,
                };
                out.push(CodeVerdict {
                    raw5,
                    code,
                    status,
                    nibble: table.nibble(code),
                });
                continue;
            }
            if !correction {
                out.push(CodeVerdict {
                    raw5,
                    code,
                    status: CodeStatus::InvalidUncorrectable,
                    nibble: None,
                });
                continue;
            }
            let next_valid = if n + 1 < end {
                let (ns, nk, _) = self.window(&syms, n + 1);
                table.contains(decode_window(&ns, &nk))
            } else {
                true
            };
            let w = CodeWindow {
                symbols: s,
                conf: std::array::from_fn(|i| self.conf[base + i]),
                keystream: k,
                frozen: [n > 0, false, false, false, false, next_valid],
            };
            let (mut verdict, fixed) = correct_code(&w, table).expect("window is invalid");
            verdict.raw5 = raw5;
            if verdict.status == CodeStatus::CorrectedValid {
                syms[base + 1..base + 6].copy_from_slice(&fixed[1..]);
                if fixed[5] != s[5] {
                    touched[n - start + 1] = true;
                }
            }
            out.push(verdict);
        }
        out
    }
}
