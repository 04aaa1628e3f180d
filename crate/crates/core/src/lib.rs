//! Encoding, channel simulation and error-tolerant recovery of 100BASE-TX
//! traffic observed through a rectifying retroreflector implant.
//!
//! The transmit side ([`phy`]) produces the rectified symbol stream
//! `|D+ - D-|`. [`channel`] turns it into a noisy complex baseband capture.
//! [`demod`] recovers confidence-annotated symbols from a capture and
//! [`recover`] turns those into frames, correcting invalid 4B/5B codes
//! where the symbol confidences allow. [`eval`] holds the metrics and
//! experiment harness.

// `!(x > 0.0)` is the idiom used to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod demod;
pub mod error;
pub mod eval;
pub mod phy;
pub mod recover;

pub use error::{Error, Result};
pub use num_complex::{Complex32, Complex64};
