//! Simulation and analysis toolkit for resetting a transmon qubit through a
//! multimode phononic bath.
//!
//! The crate models a transmon coupled to several acoustic modes of a
//! high-overtone bulk acoustic resonator, integrates the Lindblad master
//! equation over piecewise-constant control segments, builds the iSWAP-based
//! reset schedule, and turns Rabi-population-measurement records into
//! residual-population estimates with a truncated-Gaussian Bayesian analysis.
//!
//! Module map:
//!
//! - [`hilbert`] — dense complex operator algebra and density matrices for
//!   small composite Hilbert spaces.
//! - [`model`] — device Hamiltonians (multimode Jaynes-Cummings, driven
//!   rotating-frame form) and dispersive effective parameters.
//! - [`dynamics`] — Lindblad master-equation integration with thermal
//!   dissipators over piecewise-constant segments.
//! - [`protocol`] — reset schedule construction, reset simulation, and the
//!   swap-count sweep.
//! - [`thermometry`] — RPM contrast statistics and the truncated-normal
//!   posterior for residual populations.
//! - [`error_budget`] — closed-form and simulated estimates of off-resonant
//!   hybridization and spurious phonon-displacement errors.
//!
//! Internal units: angular frequency in rad/µs, time in µs, ħ = 1. Subsystem
//! ordering is fixed everywhere as (qubit, mode 1, mode 2, ...).

pub mod dynamics;
pub mod error;
pub mod error_budget;
pub mod hilbert;
pub mod model;
pub mod protocol;
pub mod thermometry;
pub mod units;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
