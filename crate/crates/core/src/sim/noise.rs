//! Seeded Gaussian noise sources.
//!
//! Every source draws from its own ChaCha8 stream: the generator is seeded
//! with the run seed and then switched to a fixed per-source stream id, so
//! enabling or disabling one source never changes the samples of another.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constants::K_B;
use crate::model::{to_angular, Cantilever, RinSpectrum};

/// ChaCha stream ids, one per physical source.
pub mod stream {
    pub const THERMAL: u64 = 1;
    pub const SHOT: u64 = 2;
    pub const RIN_PEAK: u64 = 3;
    pub const RIN_FLOOR: u64 = 4;

    /// Streams used by run `run` of a multi-run experiment: 16·run + source,
    /// so run 0 coincides with the plain source ids above.
    pub const fn for_run(run: u64, source: u64) -> u64 {
        16 * run + source
    }
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Piecewise-constant white noise with a given one-sided density.
///
/// A sample held for `dt` with variance S/(2dt) has one-sided density S at
/// frequencies well below 1/dt.
pub struct WhiteNoise {
    rng: ChaCha8Rng,
    sigma: f64,
}

impl WhiteNoise {
    pub fn new(one_sided_density: f64, dt: f64, seed: u64, stream: u64) -> Self {
        Self {
            rng: stream_rng(seed, stream),
            sigma: (one_sided_density / (2.0 * dt)).sqrt(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    pub fn sample(&mut self) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.sigma * z
    }
}

/// Real process with a Lorentzian power spectrum centred on ω_L.
///
/// A complex first-order autoregressive (Ornstein–Uhlenbeck) baseband
/// process with correlation rate Γ is shifted to ω_L and its real part
/// taken. Its one-sided density is
/// (P₀ξ)²·Γ²·[1/(Γ²+(ω−ω_L)²) + 1/(Γ²+(ω+ω_L)²)],
/// i.e. the target Lorentzian plus its mirror image, which is negligible
/// when ω_L ≫ Γ.
pub struct LorentzianNoise {
    rng: ChaCha8Rng,
    z: Complex64,
    rho: f64,
    kick: f64,
    omega_l: f64,
    dt: f64,
    n: u64,
}

impl LorentzianNoise {
    pub fn new(r: &RinSpectrum, p0: f64, dt: f64, seed: u64) -> Self {
        Self::with_stream(r, p0, dt, seed, stream::RIN_PEAK)
    }

    pub fn with_stream(r: &RinSpectrum, p0: f64, dt: f64, seed: u64, stream_id: u64) -> Self {
        let gamma = to_angular(r.gamma);
        let amp = p0 * r.xi_peak_rt_hz;
        // E|z|² = (P₀ξ)²Γ puts (P₀ξ)² at the peak of the one-sided density.
        let rms = amp * gamma.sqrt();
        let rho = (-gamma * dt).exp();
        let mut rng = stream_rng(seed, stream_id);
        let z = complex_normal(&mut rng) * rms;
        Self {
            rng,
            z,
            rho,
            kick: rms * (1.0 - rho * rho).sqrt(),
            omega_l: to_angular(r.omega_l),
            dt,
            n: 0,
        }
    }

    #[inline]
    pub fn sample(&mut self) -> f64 {
        if self.kick == 0.0 && self.z == Complex64::new(0.0, 0.0) {
            return 0.0;
        }
        let (sin, cos) = (self.omega_l * self.dt * self.n as f64).sin_cos();
        let y = self.z.re * cos - self.z.im * sin;
        let w = complex_normal(&mut self.rng);
        self.z = self.z * self.rho + w * self.kick;
        self.n += 1;
        y
    }
}

/// Unit-power complex Gaussian, E|w|² = 1.
fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Power fluctuations (W) with the Lorentzian RIN spectrum.
pub fn colored_noise_series(r: &RinSpectrum, p0: f64, dt: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut g = LorentzianNoise::new(r, p0, dt, seed);
    (0..n).map(|_| g.sample()).collect()
}

/// One-sided thermal force density 4k_B T k/(Q ω_ang) in N²/Hz.
pub fn thermal_force_density(c: &Cantilever) -> f64 {
    4.0 * K_B * c.temperature_k * c.spring_n_per_m / (c.quality * to_angular(c.omega_0))
}

pub fn thermal_force_source(c: &Cantilever, dt: f64, seed: u64) -> WhiteNoise {
    WhiteNoise::new(thermal_force_density(c), dt, seed, stream::THERMAL)
}

/// Langevin force series (N) for the cantilever at its temperature.
pub fn thermal_force_series(c: &Cantilever, dt: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut g = thermal_force_source(c, dt, seed);
    (0..n).map(|_| g.sample()).collect()
}
