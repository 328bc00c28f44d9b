//! Calibrated constants.
//!
//! Values come from `examples/calibrate.rs`, run on its own seed, with a 2x
//! margin over the smallest passing value.

use serde::{Deserialize, Serialize};

/// `Delta_i = C / s_i` for cumulated pattern rows.
pub const C: f64 = 8.0;
/// Entropy budget `C_L * sigma * beta / Delta^2`.
pub const C_L: f64 = 4.5;
/// Goodness threshold multiplier for the sdp backend.
pub const C_PRIME: f64 = 2.2;
/// Additive slack multiplier in the bin packing cost checks.
pub const SLACK: f64 = 0.37;

/// The four constants, overridable at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c: f64,
    pub c_l: f64,
    pub c_prime: f64,
    pub slack: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            c: C,
            c_l: C_L,
            c_prime: C_PRIME,
            slack: SLACK,
        }
    }
}
