//! Built-in parameter sets.

use std::f64::consts::PI;

use crate::model::{
    AbsorberLine, Cantilever, DetectorChain, LaserSource, ModulationSpec, RinSpectrum, Scenario,
};

/// Carrier wavelength used when none is given (m).
pub const DEFAULT_WAVELENGTH_M: f64 = 680e-9;

/// Resonance assumed for the `yang2002` cantilever, 2π × 10 kHz.
pub const YANG_OMEGA_0: f64 = 2.0 * PI * 1e4;

/// Angular resonance of the desk-scale Monte-Carlo scenario (rad/s).
pub const DESK_OMEGA_ANGULAR: f64 = 1e5;

#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub build: fn() -> Scenario,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "paper-main",
        summary: "T=4 K, k=0.3 N/m, Q=2e5, R=0.5, P0=100 uW, w0=2e7, flat RIN 1.8e-5/rtHz, 680 nm",
        build: paper_main,
    },
    PresetInfo {
        name: "paper-electronic",
        summary: "electronic benchmark: R_load=50 ohm, eta=0.8, NF stages [2,4,4] dB, df=100 Hz, 20 GHz source with Q_m=2e8",
        build: paper_electronic,
    },
    PresetInfo {
        name: "paper-eq4",
        summary: "paper-main with a Lorentzian RIN peak: w_L=0.3e6, Gamma=1e6, xi_peak=1.46e-4 (no flat floor)",
        build: paper_eq4,
    },
    PresetInfo {
        name: "yang2002",
        summary: "k=4.4e-3 N/m, Q=1e5, 680 nm, 40 uW, T=300 K, assumed w0=2*pi*1e4",
        build: yang2002,
    },
    PresetInfo {
        name: "desk-scaled",
        summary: "paper-main scaled for Monte-Carlo: w0_angular=1e5 rad/s, Q=500, strong absorber on the upper sideband",
        build: desk_scaled,
    },
];

pub fn lookup(name: &str) -> Option<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn paper_main() -> Scenario {
    let omega_0 = 2e7;
    Scenario {
        laser: LaserSource {
            power_w: 1e-4,
            wavelength_m: DEFAULT_WAVELENGTH_M,
            rin: RinSpectrum {
                xi_peak_rt_hz: 0.0,
                omega_l: 0.3e6,
                gamma: 1e6,
            },
            broadband_rin_rt_hz: 1.8e-5,
        },
        modulation: ModulationSpec {
            omega_mod: omega_0,
            index: 0.1,
            source_quality: None,
        },
        absorber: AbsorberLine {
            omega_a: 2.998e8 / DEFAULT_WAVELENGTH_M,
            gamma_a: omega_0 / 10.0,
            alpha_l_peak: 1.8e-4,
            carrier_detuning: omega_0 / 10.0,
        },
        cantilever: Cantilever {
            spring_n_per_m: 0.3,
            quality: 2e5,
            omega_0,
            reflectivity: 0.5,
            temperature_k: 4.0,
            force_enhancement: 1.0,
        },
        detector: DetectorChain {
            quantum_efficiency: 0.8,
            load_resistance_ohm: 50.0,
            stage_noise_figures_db: vec![2.0, 4.0, 4.0],
            bandwidth_hz: 100.0,
            temperature_k: 300.0,
        },
    }
}

pub fn paper_electronic() -> Scenario {
    let mut s = paper_main();
    s.modulation.omega_mod = 2e10;
    s.modulation.source_quality = Some(2e8);
    s
}

pub fn paper_eq4() -> Scenario {
    let mut s = paper_main();
    s.laser.broadband_rin_rt_hz = 0.0;
    s.laser.rin = RinSpectrum {
        xi_peak_rt_hz: 1.46e-4,
        omega_l: 0.3e6,
        gamma: 1e6,
    };
    s
}

pub fn yang2002() -> Scenario {
    let mut s = paper_main();
    s.cantilever.spring_n_per_m = 4.4e-3;
    s.cantilever.quality = 1e5;
    s.cantilever.omega_0 = YANG_OMEGA_0;
    s.cantilever.temperature_k = 300.0;
    s.laser.power_w = 4e-5;
    s.modulation.omega_mod = YANG_OMEGA_0;
    s.absorber.gamma_a = YANG_OMEGA_0 / 10.0;
    s.absorber.carrier_detuning = YANG_OMEGA_0 / 10.0;
    s
}

/// Paper parameters with ω₀ and Q shrunk so a ring-up takes ~5·10⁴ steps.
///
/// The upper sideband sits on the line centre of a strong absorber so the
/// drive is large against the 4 K thermal floor.
pub fn desk_scaled() -> Scenario {
    let mut s = paper_main();
    let omega_0 = DESK_OMEGA_ANGULAR / (2.0 * PI);
    s.cantilever.omega_0 = omega_0;
    s.cantilever.quality = 500.0;
    s.modulation.omega_mod = omega_0;
    s.modulation.index = 0.2;
    s.absorber.gamma_a = omega_0 / 10.0;
    s.absorber.carrier_detuning = -omega_0;
    s.absorber.alpha_l_peak = 0.5;
    s
}
