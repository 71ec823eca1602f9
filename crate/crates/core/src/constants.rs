//! Frozen physical constants.
//!
//! The values are fixed at four significant figures so every derived number
//! in the test suite is bit-stable across builds. They are not configurable.

/// Speed of light in vacuum (m/s).
pub const C: f64 = 2.998e8;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.381e-23;
/// Elementary charge (C).
pub const E_CHARGE: f64 = 1.602e-19;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.055e-34;

/// The constant set as a value, for reports.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub c: f64,
    pub k_b: f64,
    pub e: f64,
    pub hbar: f64,
}

pub const PHYSICAL_CONSTANTS: PhysicalConstants = PhysicalConstants {
    c: C,
    k_b: K_B,
    e: E_CHARGE,
    hbar: HBAR,
};
