//! Implant and radio channel model, receive filtering and link budget.

pub mod budget;
pub mod capture;
pub mod filter;
pub mod synth;

pub use budget::{link_budget, wavelength_m, LinkBudget};
pub use capture::IqCapture;
pub use filter::bandlimit;
pub use synth::{synthesize_capture, ChannelParams};
