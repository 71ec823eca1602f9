//! Exact discrete-time propagator for the damped harmonic oscillator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{to_angular, Cantilever};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OscillatorState {
    pub x_m: f64,
    pub v_m_per_s: f64,
}

impl OscillatorState {
    pub fn at_rest(x_m: f64) -> Self {
        Self { x_m, v_m_per_s: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub dt_s: f64,
    /// x(t_i) at t_i = i·dt.
    pub samples: Vec<f64>,
    pub scenario_fingerprint: Option<String>,
    pub seed: Option<u64>,
}

impl Trajectory {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 * self.dt_s
    }
}

/// One-step map s ↦ x_F + Φ·(s − x_F) for a force held constant over dt,
/// where x_F = F/k is the static deflection. Φ = exp(A·dt) for
/// A = [[0, 1], [−ω², −ω/Q]], evaluated in closed form.
#[derive(Debug, Clone, Copy)]
pub struct Propagator {
    phi: [[f64; 2]; 2],
    inv_k: f64,
}

impl Propagator {
    pub fn new(c: &Cantilever, dt: f64) -> Result<Self> {
        let w = to_angular(c.omega_0);
        let q = c.quality;
        let k = c.spring_n_per_m;
        if !(w > 0.0 && q > 0.0 && k > 0.0 && dt > 0.0) || !w.is_finite() || !dt.is_finite() {
            return Err(Error::Config(
                "propagator needs positive finite ω₀, Q, k and dt".into(),
            ));
        }
        let a = w / (2.0 * q);
        let e = (-a * dt).exp();
        let disc = 1.0 - 1.0 / (4.0 * q * q);
        // (c, s) are cos/sin (under-damped), cosh/sinh (over-damped) or the
        // critical limit, with s already divided by the branch frequency.
        let (cc, ss) = if disc > 0.0 {
            let wd = w * disc.sqrt();
            let (sn, cs) = (wd * dt).sin_cos();
            (cs, sn / wd)
        } else if disc < 0.0 {
            let wh = w * (-disc).sqrt();
            ((wh * dt).cosh(), (wh * dt).sinh() / wh)
        } else {
            (1.0, dt)
        };
        let phi = [
            [e * (cc + a * ss), e * ss],
            [-w * w * e * ss, e * (cc - a * ss)],
        ];
        Ok(Self { phi, inv_k: 1.0 / k })
    }

    #[inline]
    pub fn step(&self, s: &mut OscillatorState, force: f64) {
        let xf = force * self.inv_k;
        let dx = s.x_m - xf;
        let dv = s.v_m_per_s;
        s.x_m = xf + self.phi[0][0] * dx + self.phi[0][1] * dv;
        s.v_m_per_s = self.phi[1][0] * dx + self.phi[1][1] * dv;
    }
}

/// Integrates m·ẍ + (mω/Q)·ẋ + k·x = F(t) with force[i] held over [t_i, t_{i+1}).
/// Returns the trajectory x(t_0..t_{n−1}) and the state at t_n.
pub fn propagate_oscillator(
    c: &Cantilever,
    force: &[f64],
    dt: f64,
    initial: OscillatorState,
) -> Result<(Trajectory, OscillatorState)> {
    let p = Propagator::new(c, dt)?;
    let mut s = initial;
    let mut samples = Vec::with_capacity(force.len());
    for &f in force {
        samples.push(s.x_m);
        p.step(&mut s, f);
    }
    if !s.x_m.is_finite() || !s.v_m_per_s.is_finite() {
        return Err(Error::Numeric("oscillator state became non-finite".into()));
    }
    Ok((
        Trajectory {
            dt_s: dt,
            samples,
            scenario_fingerprint: None,
            seed: None,
        },
        s,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantilever::mechanical_gain;
    use crate::presets;
    use std::f64::consts::PI;

    fn desk() -> Cantilever {
        presets::desk_scaled().cantilever
    }

    /// Fine-step RK4 on the same ODE, used as an independent reference.
    fn rk4(c: &Cantilever, f: impl Fn(f64) -> f64, t_end: f64, n: usize, x0: f64) -> (f64, f64) {
        let w = to_angular(c.omega_0);
        let m = c.spring_n_per_m / (w * w);
        let rhs = |t: f64, x: f64, v: f64| (v, (f(t) - c.spring_n_per_m * x - m * w / c.quality * v) / m);
        let h = t_end / n as f64;
        let (mut x, mut v) = (x0, 0.0);
        for i in 0..n {
            let t = i as f64 * h;
            let k1 = rhs(t, x, v);
            let k2 = rhs(t + h / 2.0, x + h / 2.0 * k1.0, v + h / 2.0 * k1.1);
            let k3 = rhs(t + h / 2.0, x + h / 2.0 * k2.0, v + h / 2.0 * k2.1);
            let k4 = rhs(t + h, x + h * k3.0, v + h * k3.1);
            x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (x, v)
    }

    #[test]
    fn matches_rk4_in_all_damping_regimes() {
        for q in [0.2, 0.5, 3.0, 500.0] {
            let mut c = desk();
            c.quality = q;
            let w = to_angular(c.omega_0);
            let t_end = 20.0 / w;
            let steps = 400;
            let dt = t_end / steps as f64;
            let force = vec![1e-9; steps];
            let (_, end) = propagate_oscillator(&c, &force, dt, OscillatorState::at_rest(2e-9)).unwrap();
            let (x, v) = rk4(&c, |_| 1e-9, t_end, 200_000, 2e-9);
            let xs = 1e-9 / c.spring_n_per_m + 2e-9;
            assert!((end.x_m - x).abs() < 1e-9 * xs, "Q={q}: {} vs {x}", end.x_m);
            assert!((end.v_m_per_s - v).abs() < 1e-9 * xs * w, "Q={q}");
        }
    }

    #[test]
    fn free_decay_envelope() {
        let c = desk();
        let w = to_angular(c.omega_0);
        let a = w / (2.0 * c.quality);
        let wd = w * (1.0 - 1.0 / (4.0 * c.quality * c.quality)).sqrt();
        let dt = 2.0 * PI / w / 32.0;
        let n = (5.0 / a / dt) as usize;
        let x0 = 1e-9;
        let (traj, _) = propagate_oscillator(&c, &vec![0.0; n], dt, OscillatorState::at_rest(x0)).unwrap();
        assert_eq!(traj.samples.len(), n);
        // For the free solution √(x² + ((v + a·x)/ω_d)²) is exactly the
        // envelope x₀·e^{−at}·√(1 + a²/ω_d²).
        let p = Propagator::new(&c, dt).unwrap();
        let mut s = OscillatorState::at_rest(x0);
        let scale = (1.0 + (a / wd).powi(2)).sqrt();
        for i in 1..=n {
            p.step(&mut s, 0.0);
            let t = i as f64 * dt;
            let env = s.x_m.hypot((s.v_m_per_s + a * s.x_m) / wd);
            let want = x0 * (-a * t).exp() * scale;
            assert!((env / want - 1.0).abs() < 1e-3, "t={t}: {}", env / want);
        }
    }

    fn steady_amplitude(c: &Cantilever, drive_w: f64, f0: f64, dt: f64) -> f64 {
        let w = to_angular(c.omega_0);
        let ring = 2.0 * c.quality / w;
        let n = (12.0 * ring / dt) as usize;
        let p = Propagator::new(c, dt).unwrap();
        let mut s = OscillatorState::default();
        for i in 0..n {
            // Midpoint sampling of the drive keeps the zero-order hold unbiased in phase.
            let t = (i as f64 + 0.5) * dt;
            p.step(&mut s, f0 * (drive_w * t).cos());
        }
        // Once the transient has decayed (e^-12) the motion is a pure sinusoid.
        s.x_m.hypot(s.v_m_per_s / drive_w)
    }

    #[test]
    fn resonant_and_off_resonant_steady_state() {
        let c = desk();
        let w = to_angular(c.omega_0);
        let dt = 2.0 * PI / w / 64.0;
        let f0 = 1e-12;
        let a = steady_amplitude(&c, w, f0, dt);
        let want = c.quality * f0 / c.spring_n_per_m;
        assert!((a / want - 1.0).abs() < 0.01, "{}", a / want);

        let half = steady_amplitude(&c, 0.5 * w, f0, dt);
        let want = mechanical_gain(&c, 0.5 * c.omega_0) * f0;
        assert!((half / want - 1.0).abs() < 0.01, "{}", half / want);
    }

    #[test]
    fn step_size_robustness() {
        let c = desk();
        let w = to_angular(c.omega_0);
        let dt = 2.0 * PI / w / 32.0;
        let a1 = steady_amplitude(&c, w, 1e-12, dt);
        let a2 = steady_amplitude(&c, w, 1e-12, dt / 2.0);
        assert!((a1 / a2 - 1.0).abs() < 2e-3, "{}", a1 / a2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut c = desk();
        c.quality = 0.0;
        assert!(Propagator::new(&c, 1e-6).is_err());
        assert!(Propagator::new(&desk(), 0.0).is_err());
    }
}
