//! Domain value types shared by every analysis, plus scenario validation.
//!
//! Frequencies written as `omega_*` or `gamma*` are in "paper frequency
//! units": plain per-second numbers that are inserted into the closed-form
//! noise budgets without a 2π factor. The stochastic simulator is the only
//! place where they are converted to angular frequency, via [`to_angular`].

use std::f64::consts::PI;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{C, HBAR};
use crate::error::{Error, Result, Violation};

/// Lorentzian-peaked relative intensity noise, amplitude convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RinSpectrum {
    /// RIN density at the peak (Hz^-1/2).
    pub xi_peak_rt_hz: f64,
    /// Centre of the noise peak.
    pub omega_l: f64,
    /// Half-width of the noise peak.
    pub gamma: f64,
}

impl RinSpectrum {
    /// A spectrum with no Lorentzian structure.
    pub fn none() -> Self {
        Self {
            xi_peak_rt_hz: 0.0,
            omega_l: 0.0,
            gamma: 1.0,
        }
    }

    /// Relative density ξ·[Γ²/(Γ²+(ω_L−ω)²)]^½ at `omega`.
    pub fn relative_density(&self, omega: f64) -> f64 {
        let g2 = self.gamma * self.gamma;
        let d = self.omega_l - omega;
        self.xi_peak_rt_hz * (g2 / (g2 + d * d)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserSource {
    pub power_w: f64,
    pub wavelength_m: f64,
    pub rin: RinSpectrum,
    /// Frequency-independent RIN floor (Hz^-1/2).
    pub broadband_rin_rt_hz: f64,
}

impl LaserSource {
    /// Total relative intensity noise density at `omega`.
    ///
    /// The flat floor and the Lorentzian peak are independent noise processes,
    /// so their power densities add.
    pub fn rin_at(&self, omega: f64) -> f64 {
        let peak = self.rin.relative_density(omega);
        let floor = self.broadband_rin_rt_hz;
        (floor * floor + peak * peak).sqrt()
    }

    /// Absolute intensity noise P_N(ω) = P₀·ξ(ω) in W·Hz^-1/2.
    pub fn intensity_noise_at(&self, omega: f64) -> f64 {
        self.power_w * self.rin_at(omega)
    }

    pub fn photon_energy(&self) -> f64 {
        photon_energy_unchecked(self.wavelength_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationSpec {
    pub omega_mod: f64,
    /// Modulation index M.
    pub index: f64,
    /// Quality factor of the modulation source, when known.
    pub source_quality: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorberLine {
    pub omega_a: f64,
    /// Half width at half maximum.
    pub gamma_a: f64,
    /// On-resonance single-pass absorbance αL.
    pub alpha_l_peak: f64,
    /// Carrier minus line centre, ω_c − ω_a.
    pub carrier_detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cantilever {
    pub spring_n_per_m: f64,
    pub quality: f64,
    pub omega_0: f64,
    pub reflectivity: f64,
    pub temperature_k: f64,
    /// Near-field intensity enhancement applied to the optical force.
    pub force_enhancement: f64,
}

impl Cantilever {
    /// Detection bandwidth ω₀/Q implied by the resonator.
    pub fn bandwidth(&self) -> f64 {
        self.omega_0 / self.quality
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorChain {
    pub quantum_efficiency: f64,
    /// Photodetector load resistance. Distinct from the mirror reflectivity.
    pub load_resistance_ohm: f64,
    pub stage_noise_figures_db: Vec<f64>,
    pub bandwidth_hz: f64,
    /// Temperature of the electronic front end.
    pub temperature_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub laser: LaserSource,
    pub modulation: ModulationSpec,
    pub absorber: AbsorberLine,
    pub cantilever: Cantilever,
    pub detector: DetectorChain,
}

impl Scenario {
    /// Stable short hash of every parameter, used to tag tables and trajectories.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario is always serializable");
        let digest = Sha256::digest(&json);
        hex::encode(&digest[..8])
    }
}

/// A scenario that has passed [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario(Scenario);

impl ValidatedScenario {
    pub fn into_inner(self) -> Scenario {
        self.0
    }
}

impl Deref for ValidatedScenario {
    type Target = Scenario;

    fn deref(&self) -> &Scenario {
        &self.0
    }
}

impl AsRef<Scenario> for ValidatedScenario {
    fn as_ref(&self) -> &Scenario {
        &self.0
    }
}

// `!(x > 0.0)` rather than `x <= 0.0` so NaN is rejected too.
fn positive(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !(x > 0.0) || !x.is_finite() {
        v.push(Violation::new(field, "> 0"));
    }
}

fn non_negative(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !(x >= 0.0) || !x.is_finite() {
        v.push(Violation::new(field, ">= 0"));
    }
}

fn finite(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !x.is_finite() {
        v.push(Violation::new(field, "finite"));
    }
}

/// Checks every type invariant and reports all violations at once.
pub fn validate_scenario(s: Scenario) -> std::result::Result<ValidatedScenario, Vec<Violation>> {
    let mut v = Vec::new();

    positive(&mut v, "laser.power_W", s.laser.power_w);
    positive(&mut v, "laser.wavelength_m", s.laser.wavelength_m);
    non_negative(&mut v, "laser.broadband_rin_rtHz", s.laser.broadband_rin_rt_hz);
    non_negative(&mut v, "rin.xi_peak_rtHz", s.laser.rin.xi_peak_rt_hz);
    finite(&mut v, "rin.omega_L", s.laser.rin.omega_l);
    positive(&mut v, "rin.gamma", s.laser.rin.gamma);

    positive(&mut v, "modulation.omega_mod", s.modulation.omega_mod);
    non_negative(&mut v, "modulation.index", s.modulation.index);
    if let Some(q) = s.modulation.source_quality {
        positive(&mut v, "modulation.source_quality", q);
    }

    finite(&mut v, "absorber.omega_a", s.absorber.omega_a);
    positive(&mut v, "absorber.gamma_a", s.absorber.gamma_a);
    non_negative(&mut v, "absorber.alpha_L_peak", s.absorber.alpha_l_peak);
    finite(&mut v, "absorber.carrier_detuning", s.absorber.carrier_detuning);

    let c = &s.cantilever;
    positive(&mut v, "cantilever.spring_N_per_m", c.spring_n_per_m);
    positive(&mut v, "cantilever.quality", c.quality);
    positive(&mut v, "cantilever.omega_0", c.omega_0);
    if !(0.0..=1.0).contains(&c.reflectivity) {
        v.push(Violation::new("cantilever.reflectivity", "in [0, 1]"));
    }
    positive(&mut v, "cantilever.temperature_K", c.temperature_k);
    if !(c.force_enhancement >= 1.0) || !c.force_enhancement.is_finite() {
        v.push(Violation::new("cantilever.force_enhancement", ">= 1"));
    }

    let d = &s.detector;
    if !(d.quantum_efficiency > 0.0 && d.quantum_efficiency <= 1.0) {
        v.push(Violation::new("detector.quantum_efficiency", "in (0, 1]"));
    }
    positive(&mut v, "detector.load_resistance_ohm", d.load_resistance_ohm);
    positive(&mut v, "detector.bandwidth_Hz", d.bandwidth_hz);
    non_negative(&mut v, "detector.temperature_K", d.temperature_k);
    if d.stage_noise_figures_db.iter().any(|nf| !(*nf >= 0.0) || !nf.is_finite()) {
        v.push(Violation::new("detector.stage_noise_figures_dB", ">= 0 for every stage"));
    }

    if v.is_empty() {
        Ok(ValidatedScenario(s))
    } else {
        Err(v)
    }
}

/// Relative tolerance used when checking that the drive is on resonance.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

/// The optical beat drives the cantilever only if Ω equals ω₀.
pub fn check_resonant_drive(s: &Scenario) -> Result<()> {
    let (w, w0) = (s.modulation.omega_mod, s.cantilever.omega_0);
    if ((w - w0) / w0).abs() > RESONANCE_TOLERANCE {
        return Err(Error::Validation(vec![Violation::new(
            "modulation.omega_mod",
            format!("equal to cantilever.omega_0 ({w0}) for resonant drive, got {w}"),
        )]));
    }
    Ok(())
}

/// Photon energy 2πħc/λ in joules.
pub fn photon_energy(wavelength_m: f64) -> Result<f64> {
    if !(wavelength_m > 0.0) || !wavelength_m.is_finite() {
        return Err(Error::domain(
            "wavelength_m",
            format!("must be positive and finite, got {wavelength_m}"),
        ));
    }
    Ok(photon_energy_unchecked(wavelength_m))
}

pub(crate) fn photon_energy_unchecked(wavelength_m: f64) -> f64 {
    2.0 * PI * HBAR * C / wavelength_m
}

/// Converts a paper-unit frequency to angular frequency (rad/s).
pub fn to_angular(paper: f64) -> f64 {
    2.0 * PI * paper
}
