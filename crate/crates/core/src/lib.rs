//! Sensitivity analysis for frequency-modulation spectroscopy read out by a
//! radiation-pressure-driven nano-mechanical cantilever.
//!
//! The analytic modules ([`cantilever`], [`electronic`], [`analysis`]) work
//! in paper frequency units, where a quoted "20 MHz" enters formulas as
//! 2×10⁷ s⁻¹ with no 2π. The [`sim`] module integrates the physical
//! dynamics in rad/s and compares against budgets recomputed in that
//! convention.

pub mod analysis;
pub mod cantilever;
pub mod constants;
pub mod electronic;
pub mod error;
pub mod model;
pub mod optics;
pub mod params;
pub mod presets;
pub mod sim;

pub use error::{Error, Result, Violation};
pub use model::{
    validate_scenario, AbsorberLine, Cantilever, DetectorChain, LaserSource, ModulationSpec,
    RinSpectrum, Scenario, ValidatedScenario,
};
