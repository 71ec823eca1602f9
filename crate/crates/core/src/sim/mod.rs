//! Time-domain Monte-Carlo check of the analytic noise budget.
//!
//! Frequencies from the scenario are converted to rad/s here and nowhere
//! else; analytic targets for comparison come from
//! [`experiment::analytic_target`], which uses the same convention.

pub mod experiment;
pub mod lockin;
pub mod noise;
pub mod oscillator;
pub mod welch;

pub use experiment::{
    analytic_target, equipartition_variance, run_experiment, simulate_trajectory, ChannelNoise,
    Estimate, ExperimentResult, SimConfig,
};
pub use lockin::{lock_in_demodulate, LockIn, Phasor};
pub use noise::{colored_noise_series, thermal_force_series};
pub use oscillator::{propagate_oscillator, OscillatorState, Propagator, Trajectory};
pub use welch::{welch_psd, Psd};
