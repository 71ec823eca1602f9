//! Dotted parameter paths (`section.key`) for every numeric scenario field.
//!
//! Frequency fields are addressed with an explicit unit suffix:
//! `_paperHz` for paper frequency units and `_rad_per_s` for angular
//! frequency (value = 2π × paper value). Other keys carry their SI unit in
//! the name.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyUnit {
    /// Plain SI quantity; the key name is used verbatim.
    Si,
    /// Frequency; accepted with `_paperHz` or `_rad_per_s`.
    Frequency,
}

pub struct ParamKey {
    pub name: &'static str,
    pub unit: KeyUnit,
    pub get: fn(&Scenario) -> Option<f64>,
    pub set: fn(&mut Scenario, f64),
}

macro_rules! key {
    ($name:literal, $unit:ident, |$s:ident| $field:expr) => {
        ParamKey {
            name: $name,
            unit: KeyUnit::$unit,
            get: |$s: &Scenario| Some($field),
            set: |$s: &mut Scenario, v: f64| $field = v,
        }
    };
}

pub static KEYS: &[ParamKey] = &[
    key!("laser.power_W", Si, |s| s.laser.power_w),
    key!("laser.wavelength_m", Si, |s| s.laser.wavelength_m),
    key!("laser.broadband_rin_rtHz", Si, |s| s.laser.broadband_rin_rt_hz),
    key!("rin.xi_peak_rtHz", Si, |s| s.laser.rin.xi_peak_rt_hz),
    key!("rin.omega_L", Frequency, |s| s.laser.rin.omega_l),
    key!("rin.gamma", Frequency, |s| s.laser.rin.gamma),
    key!("modulation.omega_mod", Frequency, |s| s.modulation.omega_mod),
    key!("modulation.index", Si, |s| s.modulation.index),
    ParamKey {
        name: "modulation.source_quality",
        unit: KeyUnit::Si,
        get: |s| s.modulation.source_quality,
        set: |s, v| s.modulation.source_quality = Some(v),
    },
    key!("absorber.omega_a", Frequency, |s| s.absorber.omega_a),
    key!("absorber.gamma_a", Frequency, |s| s.absorber.gamma_a),
    key!("absorber.alpha_L_peak", Si, |s| s.absorber.alpha_l_peak),
    key!("absorber.carrier_detuning", Frequency, |s| s.absorber.carrier_detuning),
    key!("cantilever.spring_N_per_m", Si, |s| s.cantilever.spring_n_per_m),
    key!("cantilever.quality", Si, |s| s.cantilever.quality),
    key!("cantilever.omega_0", Frequency, |s| s.cantilever.omega_0),
    key!("cantilever.reflectivity", Si, |s| s.cantilever.reflectivity),
    key!("cantilever.temperature_K", Si, |s| s.cantilever.temperature_k),
    key!("cantilever.force_enhancement", Si, |s| s.cantilever.force_enhancement),
    key!("detector.quantum_efficiency", Si, |s| s.detector.quantum_efficiency),
    key!("detector.load_resistance_ohm", Si, |s| s.detector.load_resistance_ohm),
    key!("detector.bandwidth_Hz", Si, |s| s.detector.bandwidth_hz),
    key!("detector.temperature_K", Si, |s| s.detector.temperature_k),
];

/// The list-valued noise-figure key, written as comma-separated dB values.
pub const NOISE_FIGURES_KEY: &str = "detector.stage_noise_figures_dB";

pub const PAPER_SUFFIX: &str = "_paperHz";
pub const ANGULAR_SUFFIX: &str = "_rad_per_s";

/// A resolved path: the key plus the factor converting the user value to
/// the stored paper-unit value.
pub struct ResolvedKey {
    pub key: &'static ParamKey,
    pub scale: f64,
}

impl ResolvedKey {
    pub fn apply(&self, s: &mut Scenario, value: f64) {
        (self.key.set)(s, value * self.scale)
    }

    pub fn read(&self, s: &Scenario) -> Option<f64> {
        (self.key.get)(s).map(|v| v / self.scale)
    }
}

pub fn resolve(path: &str) -> Result<ResolvedKey> {
    for key in KEYS {
        match key.unit {
            KeyUnit::Si if path == key.name => return Ok(ResolvedKey { key, scale: 1.0 }),
            KeyUnit::Frequency => {
                if let Some(rest) = path.strip_prefix(key.name) {
                    if rest == PAPER_SUFFIX {
                        return Ok(ResolvedKey { key, scale: 1.0 });
                    }
                    if rest == ANGULAR_SUFFIX {
                        return Ok(ResolvedKey {
                            key,
                            scale: 1.0 / (2.0 * PI),
                        });
                    }
                }
            }
            _ => {}
        }
    }
    Err(Error::Config(format!("unknown parameter '{path}'")))
}

/// Canonical name of a key as written in config files.
pub fn canonical_name(key: &ParamKey) -> String {
    match key.unit {
        KeyUnit::Si => key.name.to_string(),
        KeyUnit::Frequency => format!("{}{PAPER_SUFFIX}", key.name),
    }
}

/// All scalar values of a scenario under their canonical names, in registry order.
pub fn flatten(s: &Scenario) -> Vec<(String, f64)> {
    KEYS.iter()
        .filter_map(|k| (k.get)(s).map(|v| (canonical_name(k), v)))
        .collect()
}
