//! Monte-Carlo experiment: noisy optical drive → oscillator → lock-in.
//!
//! Each trial `t` uses seed `cfg.seed + t` (wrapping). Within a trial, run
//! `r` (0 = signal with every enabled channel, then one run per enabled
//! channel with αL = 0) draws source `s` from ChaCha stream `16·r + s`.
//! Trials run on the rayon pool and are reduced in index order, so the
//! result does not depend on the number of threads.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cantilever::{
    noise_budget_with, radiation_force, BudgetOptions, Channels, Convention, NoiseBudget,
    SignalMode, ThermalMode,
};
use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::model::{check_resonant_drive, to_angular, validate_scenario, Cantilever, Scenario};
use crate::optics::{beat_signal, BeatSignal};
use crate::sim::lockin::{LockIn, Phasor, MIN_PERIODS_PER_TAU, SETTLE_TAUS};
use crate::sim::noise::{stream, thermal_force_density, LorentzianNoise, WhiteNoise};
use crate::sim::oscillator::{OscillatorState, Propagator, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt_s: f64,
    pub duration_s: f64,
    pub burn_in_s: f64,
    pub seed: u64,
    pub lock_in_time_constant_s: f64,
    /// Spacing of the I/Q samples used for statistics.
    pub sample_interval_s: f64,
    pub channels: Channels,
}

/// Default time grid in units of the resonator: 32 steps per period, a
/// lock-in time constant of 10 periods, 10 ring-up times of burn-in and
/// 100 ring-up times of measurement sampled 4 times per ring-up.
pub const STEPS_PER_PERIOD: f64 = 32.0;
pub const TAU_PERIODS: f64 = 10.0;
pub const BURN_IN_RINGUPS: f64 = 10.0;
pub const MEASURE_RINGUPS: f64 = 100.0;
pub const SAMPLES_PER_RINGUP: f64 = 4.0;
/// Minimum samples per resonant period accepted by [`SimConfig::validate`].
pub const MIN_STEPS_PER_PERIOD: f64 = 20.0;

impl SimConfig {
    pub fn for_scenario(s: &Scenario) -> Self {
        let w = to_angular(s.cantilever.omega_0);
        let period = 2.0 * PI / w;
        let ring = 2.0 * s.cantilever.quality / w;
        let tau = TAU_PERIODS * period;
        let burn = (BURN_IN_RINGUPS * ring).max(SETTLE_TAUS * tau);
        Self {
            dt_s: period / STEPS_PER_PERIOD,
            duration_s: burn + MEASURE_RINGUPS * ring,
            burn_in_s: burn,
            seed: 0,
            lock_in_time_constant_s: tau,
            sample_interval_s: ring / SAMPLES_PER_RINGUP,
            channels: Channels::ALL,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_channels(mut self, channels: Channels) -> Self {
        self.channels = channels;
        self
    }

    pub fn steps(&self) -> usize {
        (self.duration_s / self.dt_s).round() as usize
    }

    fn burn_in_steps(&self) -> usize {
        (self.burn_in_s / self.dt_s).round() as usize
    }

    fn sample_every(&self) -> usize {
        ((self.sample_interval_s / self.dt_s).round() as usize).max(1)
    }

    /// Checks the time grid against the cantilever; lists every problem.
    pub fn validate(&self, c: &Cantilever) -> Result<()> {
        let mut bad = Vec::new();
        let w = to_angular(c.omega_0);
        let period = 2.0 * PI / w;
        if !(self.dt_s > 0.0) || !self.dt_s.is_finite() {
            bad.push("sim.dt_s must be > 0".to_string());
        } else if self.dt_s > period / MIN_STEPS_PER_PERIOD * (1.0 + 1e-12) {
            bad.push(format!(
                "sim.dt_s must be <= {:e} ({MIN_STEPS_PER_PERIOD} steps per resonant period)",
                period / MIN_STEPS_PER_PERIOD
            ));
        }
        if !(self.burn_in_s >= 0.0) {
            bad.push("sim.burn_in_s must be >= 0".into());
        }
        if !(self.duration_s > self.burn_in_s) || !self.duration_s.is_finite() {
            bad.push("sim.duration_s must exceed sim.burn_in_s".into());
        }
        let tau = self.lock_in_time_constant_s;
        if !(tau >= MIN_PERIODS_PER_TAU * period * (1.0 - 1e-12)) {
            bad.push(format!(
                "sim.lock_in_time_constant_s must be >= {:e} ({MIN_PERIODS_PER_TAU} periods)",
                MIN_PERIODS_PER_TAU * period
            ));
        } else if !(self.burn_in_s >= SETTLE_TAUS * tau * (1.0 - 1e-12)) {
            bad.push(format!(
                "sim.burn_in_s must be >= {SETTLE_TAUS} lock-in time constants ({:e} s)",
                SETTLE_TAUS * tau
            ));
        }
        if !(self.sample_interval_s > 0.0) {
            bad.push("sim.sample_interval_s must be > 0".into());
        } else if self.duration_s - self.burn_in_s < self.sample_interval_s {
            bad.push("measurement window must hold at least one sample interval".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }
}

/// Mean and standard error over trials (absent for a single trial).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Estimate {
    fn from_samples(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std_error = (v.len() > 1).then(|| {
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        });
        Self {
            value: mean,
            std_error,
        }
    }

    /// √ of a non-negative estimate, with first-order error propagation.
    fn sqrt(self) -> Self {
        let value = self.value.sqrt();
        Self {
            value,
            std_error: self
                .std_error
                .map(|e| if value > 0.0 { e / (2.0 * value) } else { 0.0 }),
        }
    }

    pub fn relative_error(&self) -> Option<f64> {
        self.std_error.map(|e| e / self.value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelNoise {
    pub thermal: Option<Estimate>,
    pub shot: Option<Estimate>,
    pub rin: Option<Estimate>,
}

impl ChannelNoise {
    fn iter(&self) -> impl Iterator<Item = Estimate> + '_ {
        [self.thermal, self.shot, self.rin].into_iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub trials: usize,
    pub scenario_fingerprint: String,
    pub config: SimConfig,
    /// Resonant displacement amplitude of the coherent mean phasor (m).
    pub signal_m: Estimate,
    pub signal_phasor: Phasor,
    /// Per-quadrature rms lock-in output, αL = 0, one channel at a time (m).
    pub noise_m: ChannelNoise,
    /// Per-quadrature rms lock-in output of the signal run about its mean (m).
    pub noise_all_on_m: Estimate,
    /// Stationary displacement variance of the thermal-only run (m²).
    pub thermal_variance_m2: Option<Estimate>,
    /// signal² / Σ channel noise²; absent when no channel is enabled.
    pub snr: Option<Estimate>,
    /// signal² / noise_all_on².
    pub snr_all_on: Option<Estimate>,
    /// Analytic budget in the simulator's own convention.
    pub analytic: NoiseBudget,
    pub analytic_snr: Option<f64>,
}

/// k_B T / k.
pub fn equipartition_variance(c: &Cantilever) -> f64 {
    K_B * c.temperature_k / c.spring_n_per_m
}

/// The analytic budget recomputed under the simulator's angular convention,
/// chain-mode signal and equipartition thermal amplitude.
pub fn analytic_target(s: &Scenario, cfg: &SimConfig) -> Result<NoiseBudget> {
    noise_budget_with(
        s,
        &BudgetOptions {
            signal: SignalMode::Chain,
            thermal: ThermalMode::Equipartition,
            convention: Convention::Angular {
                lock_in_time_constant_s: Some(cfg.lock_in_time_constant_s),
            },
            channels: cfg.channels,
        },
    )
}

#[derive(Debug, Clone, Copy)]
enum Run {
    Signal,
    Only(Source),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Thermal,
    Shot,
    Rin,
}

impl Run {
    fn index(self) -> u64 {
        match self {
            Run::Signal => 0,
            Run::Only(Source::Thermal) => 1,
            Run::Only(Source::Shot) => 2,
            Run::Only(Source::Rin) => 3,
        }
    }
}

/// Everything needed to integrate one run; built once per experiment.
struct Plant<'a> {
    s: &'a Scenario,
    cfg: &'a SimConfig,
    beat: BeatSignal,
    coupling: f64,
    propagator: Propagator,
}

impl<'a> Plant<'a> {
    fn new(s: &'a Scenario, cfg: &'a SimConfig) -> Result<Self> {
        let c = &s.cantilever;
        Ok(Self {
            s,
            cfg,
            beat: beat_signal(s)?,
            coupling: radiation_force(1.0, c.reflectivity, c.force_enhancement),
            propagator: Propagator::new(c, cfg.dt_s)?,
        })
    }

    /// Integrates one run and calls `visit(i, x(t_i) − x_eq)` for every step.
    fn integrate(&self, seed: u64, run: Run, mut visit: impl FnMut(usize, f64)) {
        let s = self.s;
        let dt = self.cfg.dt_s;
        let ch = self.cfg.channels;
        let (with_signal, thermal, shot, rin) = match run {
            Run::Signal => (true, ch.thermal, ch.shot, ch.rin),
            Run::Only(src) => (
                false,
                src == Source::Thermal,
                src == Source::Shot,
                src == Source::Rin,
            ),
        };
        let beat = if with_signal {
            self.beat
        } else {
            // αL = 0: the carrier passes untouched.
            BeatSignal {
                dc_power_w: s.laser.power_w,
                inphase_w: 0.0,
                quadrature_w: 0.0,
            }
        };
        let r = run.index();
        let p0 = s.laser.power_w;
        let off = |on: bool, d: f64| if on { d } else { 0.0 };
        let mut f_thermal = WhiteNoise::new(
            off(thermal, thermal_force_density(&s.cantilever)),
            dt,
            seed,
            stream::for_run(r, stream::THERMAL),
        );
        let mut p_shot = WhiteNoise::new(
            off(shot, p0 * s.laser.photon_energy()),
            dt,
            seed,
            stream::for_run(r, stream::SHOT),
        );
        let mut p_floor = WhiteNoise::new(
            off(rin, (p0 * s.laser.broadband_rin_rt_hz).powi(2)),
            dt,
            seed,
            stream::for_run(r, stream::RIN_FLOOR),
        );
        let mut peak_spec = s.laser.rin;
        if !rin {
            peak_spec.xi_peak_rt_hz = 0.0;
        }
        let mut p_peak = LorentzianNoise::with_stream(
            &peak_spec,
            p0,
            dt,
            seed,
            stream::for_run(r, stream::RIN_PEAK),
        );

        let k = s.cantilever.spring_n_per_m;
        let x_eq = self.coupling * beat.dc_power_w / k;
        let mut state = OscillatorState::at_rest(x_eq);
        let w_drive = to_angular(s.modulation.omega_mod);
        let driven = beat.inphase_w != 0.0 || beat.quadrature_w != 0.0;
        for i in 0..self.cfg.steps() {
            visit(i, state.x_m - x_eq);
            let mut power = beat.dc_power_w;
            if driven {
                let (sin, cos) = (w_drive * dt * i as f64).sin_cos();
                power += beat.inphase_w * cos + beat.quadrature_w * sin;
            }
            power += p_shot.sample() + p_floor.sample() + p_peak.sample();
            let force = self.coupling * power + f_thermal.sample();
            self.propagator.step(&mut state, force);
        }
    }
}

/// Running sums of the sampled lock-in output and of the displacement.
#[derive(Debug, Clone, Copy, Default)]
struct RunStats {
    n: f64,
    si: f64,
    sq: f64,
    si2: f64,
    sq2: f64,
    x2: f64,
    nx: f64,
}

impl RunStats {
    fn mean(&self) -> Phasor {
        Phasor {
            i: self.si / self.n,
            q: self.sq / self.n,
        }
    }

    /// mean((I−m_I)² + (Q−m_Q)²)/2 about a given centre.
    fn quadrature_variance(&self, c: Phasor) -> f64 {
        let di = self.si2 - 2.0 * c.i * self.si + self.n * c.i * c.i;
        let dq = self.sq2 - 2.0 * c.q * self.sq + self.n * c.q * c.q;
        (di + dq) / (2.0 * self.n)
    }
}

fn measure(plant: &Plant, seed: u64, run: Run) -> Result<RunStats> {
    let cfg = plant.cfg;
    let w_ref = to_angular(plant.s.cantilever.omega_0);
    let mut li = LockIn::new(w_ref, cfg.lock_in_time_constant_s, cfg.dt_s)?;
    let burn = cfg.burn_in_steps();
    let every = cfg.sample_every();
    let mut st = RunStats::default();
    plant.integrate(seed, run, |i, x| {
        let p = li.push(x);
        if i >= burn {
            st.x2 += x * x;
            st.nx += 1.0;
            if (i - burn) % every == 0 {
                st.n += 1.0;
                st.si += p.i;
                st.sq += p.q;
                st.si2 += p.i * p.i;
                st.sq2 += p.q * p.q;
            }
        }
    });
    if st.n < 1.0 || ![st.si2, st.sq2, st.x2].iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("simulation produced no finite samples".into()));
    }
    Ok(st)
}

struct TrialStats {
    signal: RunStats,
    thermal: Option<RunStats>,
    shot: Option<RunStats>,
    rin: Option<RunStats>,
}

fn prepare(s: &Scenario, cfg: &SimConfig) -> Result<()> {
    validate_scenario(s.clone()).map_err(Error::Validation)?;
    check_resonant_drive(s)?;
    cfg.validate(&s.cantilever)
}

/// Displacement deviation x(t_i) − x_eq of a single run with the signal and
/// every channel enabled in `cfg`.
pub fn simulate_trajectory(s: &Scenario, cfg: &SimConfig) -> Result<Trajectory> {
    prepare(s, cfg)?;
    let plant = Plant::new(s, cfg)?;
    let mut samples = Vec::with_capacity(cfg.steps());
    plant.integrate(cfg.seed, Run::Signal, |_, x| samples.push(x));
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("trajectory became non-finite".into()));
    }
    Ok(Trajectory {
        dt_s: cfg.dt_s,
        samples,
        scenario_fingerprint: Some(s.fingerprint()),
        seed: Some(cfg.seed),
    })
}

pub fn run_experiment(s: &Scenario, cfg: &SimConfig, n_trials: usize) -> Result<ExperimentResult> {
    if n_trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    prepare(s, cfg)?;
    let plant = Plant::new(s, cfg)?;
    let ch = cfg.channels;

    let trials: Vec<TrialStats> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = cfg.seed.wrapping_add(t);
            let only = |on: bool, src| on.then(|| measure(&plant, seed, Run::Only(src))).transpose();
            Ok(TrialStats {
                signal: measure(&plant, seed, Run::Signal)?,
                thermal: only(ch.thermal, Source::Thermal)?,
                shot: only(ch.shot, Source::Shot)?,
                rin: only(ch.rin, Source::Rin)?,
            })
        })
        .collect::<Result<_>>()?;

    let n = n_trials as f64;
    let centre = Phasor {
        i: trials.iter().map(|t| t.signal.mean().i).sum::<f64>() / n,
        q: trials.iter().map(|t| t.signal.mean().q).sum::<f64>() / n,
    };
    let amp = centre.amplitude();
    let (ui, uq) = if amp > 0.0 {
        (centre.i / amp, centre.q / amp)
    } else {
        (1.0, 0.0)
    };
    let projected: Vec<f64> = trials
        .iter()
        .map(|t| {
            let m = t.signal.mean();
            m.i * ui + m.q * uq
        })
        .collect();
    let signal = Estimate {
        value: amp,
        std_error: Estimate::from_samples(&projected).std_error,
    };

    let all_on: Vec<f64> = trials
        .iter()
        .map(|t| t.signal.quadrature_variance(centre))
        .collect();
    let all_on_var = Estimate::from_samples(&all_on);

    let channel_var = |pick: fn(&TrialStats) -> Option<RunStats>| {
        let v: Option<Vec<f64>> = trials
            .iter()
            .map(|t| pick(t).map(|r| r.quadrature_variance(Phasor::default())))
            .collect();
        v.map(|v| Estimate::from_samples(&v))
    };
    let thermal_var = channel_var(|t| t.thermal);
    let shot_var = channel_var(|t| t.shot);
    let rin_var = channel_var(|t| t.rin);
    let noise_m = ChannelNoise {
        thermal: thermal_var.map(Estimate::sqrt),
        shot: shot_var.map(Estimate::sqrt),
        rin: rin_var.map(Estimate::sqrt),
    };

    let thermal_variance_m2 = trials
        .iter()
        .map(|t| t.thermal.map(|r| r.x2 / r.nx))
        .collect::<Option<Vec<f64>>>()
        .map(|v| Estimate::from_samples(&v));

    let vars: Vec<Estimate> = [thermal_var, shot_var, rin_var].into_iter().flatten().collect();
    let snr = (!vars.is_empty()).then(|| {
        let total: f64 = vars.iter().map(|e| e.value).sum();
        let total_se = vars
            .iter()
            .map(|e| e.std_error.map(|x| x * x))
            .sum::<Option<f64>>()
            .map(f64::sqrt);
        ratio_estimate(signal, total, total_se)
    });
    let snr_all_on = (!vars.is_empty()).then(|| ratio_estimate(signal, all_on_var.value, all_on_var.std_error));

    let analytic = analytic_target(s, cfg)?;
    let analytic_snr = (!vars.is_empty()).then(|| analytic.snr());
    let result = ExperimentResult {
        trials: n_trials,
        scenario_fingerprint: s.fingerprint(),
        config: *cfg,
        signal_m: signal,
        signal_phasor: centre,
        noise_m,
        noise_all_on_m: all_on_var.sqrt(),
        thermal_variance_m2,
        snr,
        snr_all_on,
        analytic,
        analytic_snr,
    };
    debug_assert!(result.noise_m.iter().all(|e| e.value.is_finite()));
    Ok(result)
}

/// A² / V with relative errors added in quadrature.
fn ratio_estimate(a: Estimate, v: f64, v_se: Option<f64>) -> Estimate {
    let value = a.value * a.value / v;
    let rel = match (a.std_error, v_se) {
        (Some(ea), Some(ev)) => {
            let ra = if a.value > 0.0 { 2.0 * ea / a.value } else { 0.0 };
            Some((ra * ra + (ev / v).powi(2)).sqrt())
        }
        _ => None,
    };
    Estimate {
        value,
        std_error: rel.map(|r| r * value),
    }
}
