//! Monostatic radar equation for the backscatter link.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub pt_dbm: f64,
    /// Gain of each antenna; transmit and receive are assumed identical.
    pub gain_dbi: f64,
    pub wavelength_m: f64,
    /// Implant radar cross-section, taken as given.
    pub rcs_m2: f64,
    pub range_m: f64,
}

pub fn wavelength_m(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

/// Received power in dBm, `Pt G^2 lambda^2 sigma / ((4 pi)^3 R^4)`.
pub fn link_budget(b: &LinkBudget) -> Result<f64> {
    let positive = [
        ("range_m", b.range_m),
        ("wavelength_m", b.wavelength_m),
        ("rcs_m2", b.rcs_m2),
    ];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if !(b.pt_dbm.is_finite() && b.gain_dbi.is_finite()) {
        return Err(Error::InvalidParameter("powers and gains must be finite".into()));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(b.pt_dbm + 2.0 * b.gain_dbi + 20.0 * b.wavelength_m.log10() + 10.0 * b.rcs_m2.log10()
        - 30.0 * four_pi.log10()
        - 40.0 * b.range_m.log10())
}
