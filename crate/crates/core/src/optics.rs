//! FM laser spectrum, absorber transfer and the resulting intensity beat.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{to_angular, AbsorberLine, Scenario};

/// Largest modulation index accepted by [`beat_signal`].
pub const MAX_FIRST_ORDER_INDEX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralComponent {
    pub order: i32,
    /// Field amplitude relative to the unmodulated field, signed.
    pub amplitude: f64,
}

/// Power at Ω of the detected beam, split into cos(Ωt) and sin(Ωt) parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeatSignal {
    pub dc_power_w: f64,
    pub inphase_w: f64,
    pub quadrature_w: f64,
}

impl BeatSignal {
    pub fn amplitude_w(&self) -> f64 {
        self.inphase_w.hypot(self.quadrature_w)
    }
}

/// Bessel functions J_0(x)..=J_nmax(x) for x ≥ 0.
pub fn bessel_j_all(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 2.0 {
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = bessel_series(n, x);
        }
        return out;
    }

    // Miller's backward recurrence, normalised with J0 + 2ΣJ_2k = 1.
    let start = nmax.max(x as usize) + 20 + (40.0 * x).sqrt() as usize;
    let start = start + start % 2;
    let (mut next, mut cur) = (0.0_f64, 1e-30_f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for o in out.iter_mut() {
                *o *= 1e-250;
            }
        }
    }
    norm += cur;
    for o in out.iter_mut() {
        *o /= norm;
    }
    out
}

fn bessel_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (0..n).fold(1.0, |acc, k| acc * half / (k + 1) as f64);
    let mut sum = term;
    let q = -half * half;
    for k in 1..60 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Field components of a sinusoidally frequency-modulated carrier.
///
/// Orders −N..=N with amplitude J_n(M), using J_{−n} = (−1)ⁿ J_n. An
/// unmodulated carrier (M = 0) returns the single order-0 component.
pub fn fm_component_spectrum(index: f64, order_cap: usize) -> Result<Vec<SpectralComponent>> {
    if !(index >= 0.0) || !index.is_finite() {
        return Err(Error::domain("modulation index", format!("must be >= 0, got {index}")));
    }
    if order_cap < 1 {
        return Err(Error::domain("order cap", "must be >= 1"));
    }
    if index == 0.0 {
        return Ok(vec![SpectralComponent {
            order: 0,
            amplitude: 1.0,
        }]);
    }
    let j = bessel_j_all(index, order_cap);
    let cap = order_cap as i32;
    Ok((-cap..=cap)
        .map(|order| {
            let jn = j[order.unsigned_abs() as usize];
            let amplitude = if order < 0 && order % 2 != 0 { -jn } else { jn };
            SpectralComponent { order, amplitude }
        })
        .collect())
}

/// Lorentzian attenuation δ and Kramers–Kronig phase φ at `detuning` from
/// line centre. Field transmission is exp(−δ − iφ).
pub fn absorber_transfer(line: &AbsorberLine, detuning: f64) -> (f64, f64) {
    let g = line.gamma_a;
    let denom = g * g + detuning * detuning;
    let half = 0.5 * line.alpha_l_peak;
    (half * g * g / denom, half * g * detuning / denom)
}

fn field_transmission(line: &AbsorberLine, detuning: f64) -> Complex64 {
    let (delta, phi) = absorber_transfer(line, detuning);
    Complex64::new(-delta, -phi).exp()
}

/// Intensity beat at Ω from the carrier and first-order sidebands.
///
/// The three fields carry amplitudes (−M/2, 1, +M/2) and are each
/// multiplied by the absorber transmission at their own frequency. The Ω
/// component of |E|² is projected without linearising the transmissions,
/// so for small δ and φ it reduces to inphase = P₀M e^{−2δ₀}(δ₋₁ − δ₊₁) and
/// quadrature = P₀M e^{−2δ₀}(φ₊₁ + φ₋₁ − 2φ₀). The DC level is P₀e^{−2δ₀}.
pub fn beat_signal(s: &Scenario) -> Result<BeatSignal> {
    let m = s.modulation.index;
    if m > MAX_FIRST_ORDER_INDEX {
        return Err(Error::IndexTooLarge {
            index: m,
            cap: MAX_FIRST_ORDER_INDEX,
        });
    }
    let line = &s.absorber;
    let omega = s.modulation.omega_mod;
    let dc_detuning = line.carrier_detuning;
    let t0 = field_transmission(line, dc_detuning);
    let t_up = field_transmission(line, dc_detuning + omega);
    let t_dn = field_transmission(line, dc_detuning - omega);

    let cross = t_up * t0.conj() - t0 * t_dn.conj();
    let p0 = s.laser.power_w;
    let (delta0, _) = absorber_transfer(line, dc_detuning);
    Ok(BeatSignal {
        dc_power_w: p0 * (-2.0 * delta0).exp(),
        inphase_w: p0 * m * cross.re,
        quadrature_w: -p0 * m * cross.im,
    })
}

/// Noise-free transmitted power P(tᵢ) sampled at tᵢ = i·dt (seconds).
pub fn transmitted_power_series(s: &Scenario, dt: f64, n_samples: usize) -> Result<Vec<f64>> {
    if !(dt > 0.0) || n_samples < 1 {
        return Err(Error::domain("sampling", "need dt > 0 and n_samples >= 1"));
    }
    let beat = beat_signal(s)?;
    let w = to_angular(s.modulation.omega_mod);
    Ok((0..n_samples)
        .map(|i| {
            let (sin, cos) = (w * dt * i as f64).sin_cos();
            beat.dc_power_w + beat.inphase_w * cos + beat.quadrature_w * sin
        })
        .collect())
}
