//! Frame delimiting and byte reassembly.

use serde::{Deserialize, Serialize};

use super::correct::{CodeStatus, CodeVerdict};
use crate::phy::code5::CodeClass;

/// Code-index extent of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameBounds {
    /// Index of the start delimiter's first code.
    pub start: usize,
    /// Payload codes `[payload_start, payload_end)`.
    pub payload_start: usize,
    pub payload_end: usize,
    /// No end delimiter was seen before the stream or IDLE ended.
    pub partial: bool,
}

fn is(v: Option<&CodeVerdict>, class: CodeClass) -> bool {
    v.is_some_and(|v| v.is_valid() && v.class() == class)
}

fn is_idle(v: Option<&CodeVerdict>) -> bool {
    is(v, CodeClass::Idle)
}

/// Tolerant start test at `i`: J,K, or a single delimiter code damaged
/// right after IDLE.
fn starts_at(v: &[CodeVerdict], i: usize) -> bool {
    let prev_idle = i > 0 && is_idle(v.get(i - 1));
    let j = is(v.get(i), CodeClass::J);
    let k = is(v.get(i + 1), CodeClass::K);
    (j && k) || (prev_idle && j && !is_idle(v.get(i + 1))) || (prev_idle && !is_idle(v.get(i)) && k)
}

/// End test at `i`: T,R, or T before IDLE, or a damaged T before R,IDLE.
fn ends_at(v: &[CodeVerdict], i: usize) -> bool {
    let t = is(v.get(i), CodeClass::T);
    let r = is(v.get(i + 1), CodeClass::R);
    (t && r) || (t && is_idle(v.get(i + 1))) || (r && is_idle(v.get(i + 2)))
}

/// Frames delimited by J,K ... T,R. Two consecutive IDLE codes also close
/// a frame, which is then flagged partial, as is one still open at the end.
pub fn find_frame_boundaries(v: &[CodeVerdict]) -> Vec<FrameBounds> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < v.len() {
        if !starts_at(v, i) {
            i += 1;
            continue;
        }
        let payload_start = i + 2;
        let mut j = payload_start;
        let (payload_end, partial, resume) = loop {
            if j >= v.len() {
                break (v.len(), true, v.len());
            }
            if ends_at(v, j) {
                break (j, false, j + 2);
            }
            if is_idle(v.get(j)) && is_idle(v.get(j + 1)) {
                break (j, true, j);
            }
            j += 1;
        };
        out.push(FrameBounds {
            start: i,
            payload_start,
            payload_end: payload_end.max(payload_start),
            partial,
        });
        i = resume.max(i + 1);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredFrame {
    pub bytes: Vec<u8>,
    /// Set where either nibble of the byte was uncorrectable.
    pub byte_error_mask: Vec<bool>,
    pub verdicts: Vec<CodeVerdict>,
    /// Code-stream indices of the start delimiter and one past the payload.
    pub start_index: usize,
    pub end_index: usize,
    pub partial: bool,
    /// An odd payload code count left one nibble unpaired.
    pub dropped_nibble: bool,
}

impl RecoveredFrame {
    pub fn has_errors(&self) -> bool {
        self.partial || self.dropped_nibble || self.byte_error_mask.iter().any(|&e| e)
    }
}

/// Pairs payload nibbles low then high. A code without a nibble stands in
/// as zero and marks its byte.
pub fn assemble_frame(bounds: &FrameBounds, payload: Vec<CodeVerdict>) -> RecoveredFrame {
    let mut bytes = Vec::with_capacity(payload.len() / 2);
    let mut mask = Vec::with_capacity(payload.len() / 2);
    for pair in payload.chunks_exact(2) {
        let lo = pair[0].nibble;
        let hi = pair[1].nibble;
        let byte = lo.map_or(0, |n| n.value()) | (hi.map_or(0, |n| n.value()) << 4);
        bytes.push(byte);
        let bad = |v: &CodeVerdict| v.nibble.is_none() || v.status == CodeStatus::InvalidUncorrectable;
        mask.push(bad(&pair[0]) || bad(&pair[1]));
    }
    RecoveredFrame {
        bytes,
        byte_error_mask: mask,
        dropped_nibble: payload.len() % 2 == 1,
        verdicts: payload,
        start_index: bounds.start,
        end_index: bounds.payload_end,
        partial: bounds.partial,
    }
}

/// Frames from a single verdict stream, using it for both delimiting and
/// payload.
pub fn extract_frames(v: &[CodeVerdict]) -> Vec<RecoveredFrame> {
    find_frame_boundaries(v)
        .iter()
        .map(|b| assemble_frame(b, v[b.payload_start..b.payload_end].to_vec()))
        .collect()
}
