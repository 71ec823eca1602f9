//! Welch spectral density estimate.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

/// One-sided density on bins 0..=L/2, in (series unit)²/Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Psd {
    pub frequencies_hz: Vec<f64>,
    pub density: Vec<f64>,
    pub segments: usize,
}

impl Psd {
    pub fn resolution_hz(&self) -> f64 {
        self.frequencies_hz.get(1).copied().unwrap_or(0.0)
    }

    /// Σ density·df over bins whose centre lies in [lo, hi].
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        let df = self.resolution_hz();
        self.frequencies_hz
            .iter()
            .zip(&self.density)
            .filter(|(f, _)| **f >= lo && **f <= hi)
            .map(|(_, d)| d * df)
            .sum()
    }

    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.resolution_hz()
    }
}

/// Periodic Hann window, constant detrend per segment, averaged periodograms.
///
/// Scaling is 1/(fs·Σw²) with interior bins doubled, so Σ density·df equals
/// the window-weighted mean square of each detrended segment.
pub fn welch_psd(series: &[f64], dt: f64, segment_length: usize, overlap: f64) -> Result<Psd> {
    let l = segment_length;
    if l < 2 || l > series.len() {
        return Err(Error::Config(format!(
            "segment length {l} must be in [2, {}]",
            series.len()
        )));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::Config("overlap must be in [0, 1)".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Config("dt must be > 0".into()));
    }
    let hop = (((1.0 - overlap) * l as f64).round() as usize).max(1);
    let window: Vec<f64> = (0..l)
        .map(|k| 0.5 * (1.0 - (2.0 * PI * k as f64 / l as f64).cos()))
        .collect();
    let w_sq: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(l);

    let bins = l / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); l];
    let mut segments = 0;
    let mut start = 0;
    while start + l <= series.len() {
        let seg = &series[start..start + l];
        let mean = seg.iter().sum::<f64>() / l as f64;
        for ((b, x), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex64::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let fs = 1.0 / dt;
    let scale = 1.0 / (fs * w_sq * segments as f64);
    let density = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let edge = k == 0 || (l % 2 == 0 && k == l / 2);
            a * scale * if edge { 1.0 } else { 2.0 }
        })
        .collect();
    Ok(Psd {
        frequencies_hz: (0..bins).map(|k| k as f64 * fs / l as f64).collect(),
        density,
        segments,
    })
}
