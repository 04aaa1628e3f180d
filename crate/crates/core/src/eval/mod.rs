//! Metrics and experiment harness.

pub mod cer;
pub mod correlation;
pub mod stats;
pub mod sweep;

pub use cer::{cer_model, cer_monte_carlo, check_cer_model, CerCheck, CerVariant, InvertedWindow};
pub use correlation::{correlation_map, pearson, CorrelationResult};
pub use stats::{compute_stats, frame_bit_error_rate, idle_ber, ErrorStats};
pub use sweep::{correction_sweep, default_grid, SweepConfig, SweepDiscriminator, SweepPoint};
