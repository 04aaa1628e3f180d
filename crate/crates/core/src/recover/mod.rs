//! Confident symbols to frames: transition decoding, scrambler recovery,
//! code alignment, correction and frame extraction.

pub mod alignment;
pub mod bits;
pub mod correct;
pub mod frames;
pub mod lfsr;
pub mod pipeline;
pub mod report;

pub use alignment::{find_bit_alignment, recover_bit_alignment};
pub use bits::RecoveredBits;
pub use correct::{correct_code, xor_shift_table, CodeStatus, CodeStream, CodeTable, CodeVerdict, CodeWindow};
pub use frames::{extract_frames, find_frame_boundaries, FrameBounds, RecoveredFrame};
pub use lfsr::{descramble, recover_lfsr_state, sync_to_idle, LfsrSync, SyncConfig, SyncMode};
pub use pipeline::{decode_capture, decode_symbols, idle_symbol_truth, train_from_idle, CodeCounts, DecodeConfig, DecodeOutput, TrainingConfig};
pub use report::{build_report, recovered_frames, DecodeReport};
