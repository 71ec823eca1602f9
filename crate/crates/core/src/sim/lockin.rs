//! Digital lock-in amplifier: mix with cos/sin, single-pole low-pass.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::oscillator::Trajectory;

/// Minimum time constant in reference periods.
pub const MIN_PERIODS_PER_TAU: f64 = 10.0;
/// Settling time discarded before averaging, in time constants.
pub const SETTLE_TAUS: f64 = 5.0;

/// Demodulated amplitudes. For x = A·cos(ωt − θ), I = A·cos θ and Q = A·sin θ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Phasor {
    pub i: f64,
    pub q: f64,
}

impl Phasor {
    pub fn amplitude(&self) -> f64 {
        self.i.hypot(self.q)
    }

    pub fn phase(&self) -> f64 {
        self.q.atan2(self.i)
    }
}

/// Streaming lock-in. Each sample updates I ← I + α(2x·cos ωt − I) with
/// α = 1 − exp(−dt/τ), and likewise for Q with sin ωt.
#[derive(Debug, Clone)]
pub struct LockIn {
    omega_dt: f64,
    alpha: f64,
    n: u64,
    out: Phasor,
}

impl LockIn {
    /// `ref_angular` in rad/s.
    pub fn new(ref_angular: f64, time_constant: f64, dt: f64) -> Result<Self> {
        check_time_constant(ref_angular, time_constant)?;
        if !(dt > 0.0) {
            return Err(Error::Config("lock-in needs dt > 0".into()));
        }
        Ok(Self {
            omega_dt: ref_angular * dt,
            alpha: -(-dt / time_constant).exp_m1(),
            n: 0,
            out: Phasor::default(),
        })
    }

    #[inline]
    pub fn push(&mut self, x: f64) -> Phasor {
        let (sin, cos) = (self.omega_dt * self.n as f64).sin_cos();
        self.out.i += self.alpha * (2.0 * x * cos - self.out.i);
        self.out.q += self.alpha * (2.0 * x * sin - self.out.q);
        self.n += 1;
        self.out
    }

    pub fn output(&self) -> Phasor {
        self.out
    }
}

fn check_time_constant(ref_angular: f64, time_constant: f64) -> Result<()> {
    if !(ref_angular > 0.0) || !ref_angular.is_finite() {
        return Err(Error::Config("reference frequency must be > 0".into()));
    }
    let period = 2.0 * PI / ref_angular;
    if !(time_constant >= MIN_PERIODS_PER_TAU * period * (1.0 - 1e-12)) {
        return Err(Error::Config(format!(
            "lock-in time constant {time_constant:e} s is shorter than {MIN_PERIODS_PER_TAU} reference periods ({:e} s)",
            MIN_PERIODS_PER_TAU * period
        )));
    }
    Ok(())
}

/// Converged I/Q of a trajectory at `ref_angular` (rad/s).
///
/// The first 5τ of filter output is discarded; the rest is averaged over a
/// whole number of reference periods to cancel the 2ω ripple.
pub fn lock_in_demodulate(traj: &Trajectory, ref_angular: f64, time_constant: f64) -> Result<Phasor> {
    let dt = traj.dt_s;
    let mut li = LockIn::new(ref_angular, time_constant, dt)?;
    let settle = (SETTLE_TAUS * time_constant / dt).ceil() as usize;
    let period_samples = 2.0 * PI / ref_angular / dt;
    let avail = traj.samples.len().saturating_sub(settle) as f64;
    let periods = (avail / period_samples).floor();
    if periods < 1.0 {
        return Err(Error::Config(format!(
            "trajectory of {:e} s is too short: need more than {SETTLE_TAUS} time constants plus one reference period",
            traj.duration_s()
        )));
    }
    let window = (periods * period_samples).round() as usize;
    let mut acc = Phasor::default();
    for (n, &x) in traj.samples[..settle + window].iter().enumerate() {
        let p = li.push(x);
        if n >= settle {
            acc.i += p.i;
            acc.q += p.q;
        }
    }
    Ok(Phasor {
        i: acc.i / window as f64,
        q: acc.q / window as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(amp: f64, w: f64, phase: f64, dt: f64, n: usize) -> Trajectory {
        Trajectory {
            dt_s: dt,
            samples: (0..n).map(|i| amp * (w * i as f64 * dt - phase).cos()).collect(),
            scenario_fingerprint: None,
            seed: None,
        }
    }

    const W: f64 = 1e5;

    fn setup(tau_periods: f64) -> (f64, f64, usize) {
        let period = 2.0 * PI / W;
        let dt = period / 32.0;
        let tau = tau_periods * period;
        let n = ((SETTLE_TAUS * tau + 20.0 * period) / dt) as usize;
        (dt, tau, n)
    }

    #[test]
    fn recovers_amplitude() {
        let (dt, tau, n) = setup(10.0);
        for phase in [0.0, 0.3, 2.0] {
            let p = lock_in_demodulate(&tone(3e-9, W, phase, dt, n), W, tau).unwrap();
            assert!((p.amplitude() / 3e-9 - 1.0).abs() < 5e-3, "{}", p.amplitude());
            assert!((p.phase() - phase).abs() < 1e-2);
        }
    }

    #[test]
    fn quadrature_swap() {
        let (dt, tau, n) = setup(10.0);
        let a = lock_in_demodulate(&tone(1.0, W, 0.0, dt, n), W, tau).unwrap();
        let b = lock_in_demodulate(&tone(1.0, W, PI / 2.0, dt, n), W, tau).unwrap();
        assert!((a.i - b.q).abs() < 5e-3 && (a.q + b.i).abs() < 5e-3, "{a:?} {b:?}");
        assert!((a.i - 1.0).abs() < 5e-3 && a.q.abs() < 5e-3);
    }

    #[test]
    fn rejects_off_reference_tone() {
        let (dt, tau, n) = setup(100.0);
        let p = lock_in_demodulate(&tone(1.0, 1.5 * W, 0.0, dt, n), W, tau).unwrap();
        assert!(p.amplitude() < 0.01, "{}", p.amplitude());
    }

    #[test]
    fn rejects_bad_inputs() {
        let (dt, tau, _) = setup(10.0);
        let short = tone(1.0, W, 0.0, dt, (SETTLE_TAUS * tau / dt) as usize);
        assert!(lock_in_demodulate(&short, W, tau).is_err());
        let (dt, tau, n) = setup(5.0);
        assert!(lock_in_demodulate(&tone(1.0, W, 0.0, dt, n), W, tau).is_err());
    }
}
