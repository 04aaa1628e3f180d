//! 100BASE-TX transmit and receive encoding stages.

pub mod code5;
pub mod framing;
pub mod io;
pub mod mlt3;
pub mod scrambler;

pub use code5::{classify_code5, encode_4b5b, Code5, CodeClass, InvalidReason, Nibble};
pub use framing::{encode_stream, frame_to_wire, EncodedStream, Frame, FrameSpan, WireConfig};
pub use mlt3::{mlt3_encode, rectify, transitions_to_bits, Mlt3Level, Mlt3State};
pub use scrambler::{scramble, scrambler_step, Keystream, ScramblerState, PERIOD};
