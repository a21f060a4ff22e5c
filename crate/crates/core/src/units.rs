//! Unit conversions and physical constants.
//!
//! Internally everything runs in angular frequency (rad/µs) and time (µs)
//! with ħ = 1, so matrix entries stay O(1–1000). Configuration boundaries
//! accept Hz-family units and convert here.

use std::f64::consts::TAU;

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact, SI 2019).
pub const KB: f64 = 1.380_649e-23;

/// Frequency in GHz to angular frequency in rad/µs.
pub fn ghz(f: f64) -> f64 {
    TAU * 1e3 * f
}

/// Frequency in MHz to angular frequency in rad/µs.
pub fn mhz(f: f64) -> f64 {
    TAU * f
}

/// Frequency in kHz to angular frequency in rad/µs.
pub fn khz(f: f64) -> f64 {
    TAU * 1e-3 * f
}

/// Angular frequency in rad/µs to frequency in MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU
}

/// Temperature in millikelvin to kelvin.
pub fn mk(t: f64) -> f64 {
    1e-3 * t
}

/// Time in nanoseconds to microseconds.
pub fn ns(t: f64) -> f64 {
    1e-3 * t
}

/// Angular frequency in rad/µs to angular frequency in rad/s.
pub fn angular_per_second(omega: f64) -> f64 {
    1e6 * omega
}
