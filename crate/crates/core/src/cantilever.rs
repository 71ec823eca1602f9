//! Radiation-pressure cantilever detector: force, mechanical response, the
//! four vibrational amplitudes, the closed-form SNR and the thermal-limit
//! condition for a Lorentzian RIN peak.

use serde::Serialize;

use crate::constants::{C, K_B};
use crate::error::{Error, Result};
use crate::model::{to_angular, Cantilever, RinSpectrum, Scenario};
use crate::optics::beat_signal;

/// Where the drive amplitude comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalMode {
    /// The absorber's `alpha_l_peak` is used directly as αL.
    #[default]
    Paper,
    /// αL_eff = |beat| / P₀ from the FM optics chain.
    Chain,
}

/// Which thermal amplitude is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalMode {
    /// x_T² = 4 k_B T / k, as in the closed-form SNR.
    #[default]
    Paper,
    /// x_T² = k_B T / k.
    Equipartition,
}

/// Frequency convention and readout bandwidth for the noise amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// ω₀ used as a plain per-second number; bandwidth ω₀/Q.
    #[default]
    Paper,
    /// ω₀ converted to rad/s; bandwidth is the resonator's noise-equivalent
    /// bandwidth ω_ang/(4Q), narrowed by a single-pole lock-in when present.
    Angular { lock_in_time_constant_s: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Channels {
    pub thermal: bool,
    pub shot: bool,
    pub rin: bool,
}

impl Channels {
    pub const ALL: Channels = Channels {
        thermal: true,
        shot: true,
        rin: true,
    };
    pub const THERMAL: Channels = Channels {
        thermal: true,
        shot: false,
        rin: false,
    };
    pub const SHOT: Channels = Channels {
        thermal: false,
        shot: true,
        rin: false,
    };
    pub const RIN: Channels = Channels {
        thermal: false,
        shot: false,
        rin: true,
    };
}

impl Default for Channels {
    fn default() -> Self {
        Channels::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BudgetOptions {
    pub signal: SignalMode,
    pub thermal: ThermalMode,
    pub convention: Convention,
    pub channels: Channels,
}

/// The four vibrational amplitudes (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub x_sig_m: f64,
    pub x_t_m: f64,
    pub x_sn_m: f64,
    pub x_n_m: f64,
}

impl NoiseBudget {
    pub fn noise_sq(&self) -> f64 {
        self.x_t_m * self.x_t_m + self.x_sn_m * self.x_sn_m + self.x_n_m * self.x_n_m
    }

    /// x_sig² / (x_T² + x_SN² + x_N²).
    pub fn snr(&self) -> f64 {
        self.x_sig_m * self.x_sig_m / self.noise_sq()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalLimitReport {
    pub mu: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResonanceBound {
    /// The RIN peak never violates the thermal-limit condition.
    Unconstrained,
    Bounded { mu: f64, omega_0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinAlphaMode {
    RinOnly,
    Full,
}

/// F = enhancement·(1+R)·P/c.
pub fn radiation_force(power_w: f64, reflectivity: f64, enhancement: f64) -> f64 {
    enhancement * (1.0 + reflectivity) * power_w / C
}

/// |χ(ω)| in m/N, with `drive_frequency` and ω₀ in the same units.
pub fn mechanical_gain(c: &Cantilever, drive_frequency: f64) -> f64 {
    let w0 = c.omega_0;
    let w = drive_frequency;
    let detune = w0 * w0 - w * w;
    let damp = w0 * w / c.quality;
    w0 * w0 / (c.spring_n_per_m * (detune * detune + damp * damp).sqrt())
}

/// Force per unit optical power, (1+R)·enhancement/c.
fn coupling(c: &Cantilever) -> f64 {
    radiation_force(1.0, c.reflectivity, c.force_enhancement)
}

/// αL used for the signal amplitude under `mode`.
pub fn effective_alpha_l(s: &Scenario, mode: SignalMode) -> Result<f64> {
    match mode {
        SignalMode::Paper => Ok(s.absorber.alpha_l_peak),
        SignalMode::Chain => Ok(beat_signal(s)?.amplitude_w() / s.laser.power_w),
    }
}

/// Readout bandwidth relative to the resonator's own.
fn bandwidth_and_ratio(c: &Cantilever, conv: Convention) -> (f64, f64) {
    match conv {
        Convention::Paper => (c.bandwidth(), 1.0),
        Convention::Angular {
            lock_in_time_constant_s,
        } => {
            let w = to_angular(c.omega_0);
            let half_width = w / (2.0 * c.quality);
            let narrowing = 1.0 / (1.0 + half_width * lock_in_time_constant_s.unwrap_or(0.0));
            (w / (4.0 * c.quality) * narrowing, narrowing)
        }
    }
}

/// Vibrational amplitudes in the closed-form (plain-Hz) conventions.
pub fn noise_budget(s: &Scenario) -> NoiseBudget {
    noise_budget_with(s, &BudgetOptions::default()).expect("paper-mode budget is infallible")
}

pub fn noise_budget_with(s: &Scenario, opts: &BudgetOptions) -> Result<NoiseBudget> {
    let c = &s.cantilever;
    let p0 = s.laser.power_w;
    let gain = c.quality / c.spring_n_per_m;
    let g = coupling(c);
    let (bandwidth, narrowing) = bandwidth_and_ratio(c, opts.convention);

    let alpha = effective_alpha_l(s, opts.signal)?;
    let x_sig = gain * g * alpha * p0;

    let thermal_var = match opts.thermal {
        ThermalMode::Paper => 4.0 * K_B * c.temperature_k / c.spring_n_per_m,
        ThermalMode::Equipartition => K_B * c.temperature_k / c.spring_n_per_m,
    } * narrowing;
    let force_to_x = gain * g;
    let shot_var = force_to_x * force_to_x * p0 * s.laser.photon_energy() * bandwidth;
    let pn = s.laser.intensity_noise_at(c.omega_0);
    let rin_var = force_to_x * force_to_x * pn * pn * bandwidth;

    let on = |flag: bool, v: f64| if flag { v.sqrt() } else { 0.0 };
    Ok(NoiseBudget {
        x_sig_m: x_sig,
        x_t_m: on(opts.channels.thermal, thermal_var),
        x_sn_m: on(opts.channels.shot, shot_var),
        x_n_m: on(opts.channels.rin, rin_var),
    })
}

/// Closed-form SNR
/// Q²(1+R)²(αL)²P₀² / (4k_B T k c² + Q(1+R)²ω₀[P₀ħω + P_N(ω₀)²]).
pub fn snr_cantilever(s: &Scenario) -> f64 {
    snr_cantilever_channels(s, Channels::ALL)
}

/// Closed-form SNR with individual denominator terms switched off.
pub fn snr_cantilever_channels(s: &Scenario, ch: Channels) -> f64 {
    let c = &s.cantilever;
    let p0 = s.laser.power_w;
    let al = s.absorber.alpha_l_peak;
    let r1 = c.force_enhancement * (1.0 + c.reflectivity);
    let q = c.quality;
    let pn = s.laser.intensity_noise_at(c.omega_0);

    let num = q * q * r1 * r1 * al * al * p0 * p0;
    let mut den = 0.0;
    if ch.thermal {
        den += 4.0 * K_B * c.temperature_k * c.spring_n_per_m * C * C;
    }
    let laser = f64::from(u8::from(ch.shot)) * p0 * s.laser.photon_energy()
        + f64::from(u8::from(ch.rin)) * pn * pn;
    den += q * r1 * r1 * c.omega_0 * laser;
    num / den
}

/// Smallest αL with SNR = 1.
pub fn min_alpha_cantilever(s: &Scenario, mode: MinAlphaMode) -> Result<f64> {
    let c = &s.cantilever;
    if !(c.quality > 0.0) {
        return Err(Error::domain("cantilever.quality", "must be > 0"));
    }
    if !(s.laser.power_w > 0.0) {
        return Err(Error::domain("laser.power_W", "must be > 0"));
    }
    Ok(match mode {
        MinAlphaMode::RinOnly => s.laser.rin_at(c.omega_0) * (c.omega_0 / c.quality).sqrt(),
        MinAlphaMode::Full => {
            let b = noise_budget(s);
            let per_alpha = c.quality / c.spring_n_per_m * coupling(c) * s.laser.power_w;
            b.noise_sq().sqrt() / per_alpha
        }
    })
}

/// P_N(ω) = P₀ξ[Γ²/(Γ²+(ω_L−ω)²)]^½.
pub fn rin_power_density(r: &RinSpectrum, p0: f64, omega: f64) -> f64 {
    p0 * r.relative_density(omega)
}

/// Right-hand side of the thermal-limit inequality,
/// (c/((1+R)P₀))·√(4π k_B T k/(QΓ)).
pub fn thermal_limit_rhs(s: &Scenario) -> f64 {
    let c = &s.cantilever;
    let g = coupling(c) * s.laser.power_w;
    (4.0 * std::f64::consts::PI * K_B * c.temperature_k * c.spring_n_per_m
        / (c.quality * s.laser.rin.gamma))
        .sqrt()
        / g
}

/// Left-hand side [μ/(1+μ²)]^½·ξ_peak.
pub fn thermal_limit_lhs(xi_peak: f64, mu: f64) -> f64 {
    (mu / (1.0 + mu * mu)).sqrt() * xi_peak
}

/// Whether the thermal noise exceeds the Lorentzian laser noise at ω₀.
///
/// Only the ω₀ > ω_L branch (μ > 0) is defined.
pub fn thermal_limit_margin(s: &Scenario) -> Result<ThermalLimitReport> {
    let r = &s.laser.rin;
    let mu = (s.cantilever.omega_0 - r.omega_l) / r.gamma;
    if !(mu > 0.0) {
        return Err(Error::domain(
            "mu",
            format!("thermal-limit condition needs omega_0 > omega_L (mu > 0), got mu = {mu}"),
        ));
    }
    let lhs = thermal_limit_lhs(r.xi_peak_rt_hz, mu);
    let rhs = thermal_limit_rhs(s);
    Ok(ThermalLimitReport {
        mu,
        lhs,
        rhs,
        satisfied: lhs < rhs,
    })
}

const MAX_BISECTION_STEPS: usize = 200;

/// Smallest ω₀ above the RIN peak for which the thermal limit holds.
///
/// The left-hand side peaks at μ = 1 with value ξ_peak/√2 and decreases
/// monotonically beyond it, so the boundary is bisected on μ > 1.
pub fn min_resonant_frequency(s: &Scenario) -> Result<ResonanceBound> {
    let r = &s.laser.rin;
    let xi = r.xi_peak_rt_hz;
    let rhs = thermal_limit_rhs(s);
    if xi / std::f64::consts::SQRT_2 < rhs {
        return Ok(ResonanceBound::Unconstrained);
    }
    let excess = |mu: f64| thermal_limit_lhs(xi, mu) - rhs;
    let (mut lo, mut hi) = (1.0_f64, 4.0 * (xi / rhs).powi(2) + 2.0);
    debug_assert!(excess(hi) < 0.0);
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if excess(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            let mu = hi;
            return Ok(ResonanceBound::Bounded {
                mu,
                omega_0: r.omega_l + mu * r.gamma,
            });
        }
    }
    Err(Error::Numeric(format!(
        "bisection for the resonance bound did not converge in {MAX_BISECTION_STEPS} steps"
    )))
}

/// Thermal force noise √(4k_B T k/(Qω₀)) in N·Hz^-1/2, paper units.
pub fn thermal_force_sensitivity(c: &Cantilever) -> f64 {
    (4.0 * K_B * c.temperature_k * c.spring_n_per_m / (c.quality * c.omega_0)).sqrt()
}
