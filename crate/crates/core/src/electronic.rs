//! Conventional photodetector + amplifier chain used as the benchmark.

use serde::Serialize;

use crate::cantilever::MinAlphaMode;
use crate::constants::{E_CHARGE, K_B};
use crate::error::{Error, Result};
use crate::model::{photon_energy, Scenario};

/// How the load-resistor noise enters the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JohnsonModel {
    /// Δf·e·2k_B T/R, exactly as the closed-form SNR is usually printed.
    #[default]
    AsPrinted,
    /// 4k_B T Δf/R in A².
    Conventional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseFigure {
    pub db: f64,
    pub linear: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectronicBudget {
    pub responsivity_a_per_w: f64,
    pub shot_term: f64,
    pub johnson_term: f64,
    pub rin_term: f64,
    pub signal_term: f64,
}

impl ElectronicBudget {
    pub fn noise(&self) -> f64 {
        self.shot_term + self.johnson_term + self.rin_term
    }

    pub fn snr(&self) -> f64 {
        self.signal_term / self.noise()
    }
}

/// g = eη/ħω in A/W.
pub fn responsivity(wavelength_m: f64, quantum_efficiency: f64) -> Result<f64> {
    if !(quantum_efficiency >= 0.0 && quantum_efficiency <= 1.0) {
        return Err(Error::domain("quantum_efficiency", "must lie in [0, 1]"));
    }
    Ok(E_CHARGE * quantum_efficiency / photon_energy(wavelength_m)?)
}

/// Cascaded noise figure: stage dB values add, linear factor is 10^(dB/10).
pub fn total_noise_figure(stages_db: &[f64]) -> Result<NoiseFigure> {
    if let Some(bad) = stages_db.iter().find(|nf| !(**nf >= 0.0)) {
        return Err(Error::domain("noise figure", format!("stage value {bad} dB is negative")));
    }
    let db: f64 = stages_db.iter().sum();
    Ok(NoiseFigure {
        db,
        linear: 10f64.powf(db / 10.0),
    })
}

/// Δf = f_mod / Q_m.
pub fn detection_bandwidth(omega_mod: f64, source_quality: f64) -> Result<f64> {
    if !(omega_mod > 0.0) || !(source_quality > 0.0) {
        return Err(Error::domain("bandwidth", "modulation frequency and Q_m must be > 0"));
    }
    Ok(omega_mod / source_quality)
}

/// Effective RIN ξ·NF seen by the electronic chain at the modulation frequency.
pub fn effective_rin(s: &Scenario) -> Result<f64> {
    let nf = total_noise_figure(&s.detector.stage_noise_figures_db)?;
    Ok(s.laser.rin_at(s.modulation.omega_mod) * nf.linear)
}

pub fn snr_electronic(s: &Scenario, alpha_l: f64) -> Result<(f64, ElectronicBudget)> {
    snr_electronic_with(s, alpha_l, JohnsonModel::default())
}

/// g²P₀²(αL)² / (Δf·e·(gP₀ + 2k_B T/R) + Δf·g²ξ_eff²P₀²).
pub fn snr_electronic_with(
    s: &Scenario,
    alpha_l: f64,
    johnson: JohnsonModel,
) -> Result<(f64, ElectronicBudget)> {
    let d = &s.detector;
    let g = responsivity(s.laser.wavelength_m, d.quantum_efficiency)?;
    let p0 = s.laser.power_w;
    let df = d.bandwidth_hz;
    let xi_eff = effective_rin(s)?;
    let kt_r = K_B * d.temperature_k / d.load_resistance_ohm;

    let budget = ElectronicBudget {
        responsivity_a_per_w: g,
        shot_term: df * E_CHARGE * g * p0,
        johnson_term: match johnson {
            JohnsonModel::AsPrinted => df * E_CHARGE * 2.0 * kt_r,
            JohnsonModel::Conventional => 4.0 * kt_r * df,
        },
        rin_term: df * g * g * xi_eff * xi_eff * p0 * p0,
        signal_term: g * g * p0 * p0 * alpha_l * alpha_l,
    };
    Ok((budget.snr(), budget))
}

pub fn min_alpha_electronic(s: &Scenario, mode: MinAlphaMode) -> Result<f64> {
    if !(s.laser.power_w > 0.0) {
        return Err(Error::domain("laser.power_W", "must be > 0"));
    }
    match mode {
        MinAlphaMode::RinOnly => Ok(effective_rin(s)? * s.detector.bandwidth_hz.sqrt()),
        MinAlphaMode::Full => {
            let (_, b) = snr_electronic(s, 0.0)?;
            Ok(b.noise().sqrt() / (b.responsivity_a_per_w * s.laser.power_w))
        }
    }
}
