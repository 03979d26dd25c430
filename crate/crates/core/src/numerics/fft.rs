use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// One-sided amplitude spectrum of a real series.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Angular frequencies of the bins.
    pub frequencies: Vec<f64>,
    /// Cosine-amplitude of each bin (a pure `c cos(w t)` on a bin reads `c`).
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    /// Mean square of the signal implied by the amplitudes.
    pub fn mean_square(&self) -> f64 {
        let n = self.magnitudes.len();
        let mut ms = 0.0;
        for (k, a) in self.magnitudes.iter().enumerate() {
            if k == 0 || k == n - 1 {
                ms += a * a;
            } else {
                ms += 0.5 * a * a;
            }
        }
        ms
    }

    /// Index of the largest bin, skipping DC.
    pub fn dominant_bin(&self) -> usize {
        (1..self.magnitudes.len())
            .max_by(|&a, &b| self.magnitudes[a].total_cmp(&self.magnitudes[b]))
            .unwrap_or(0)
    }

    /// Bin nearest to `omega`.
    pub fn bin_of(&self, omega: f64) -> usize {
        let dw = self.frequencies.get(1).copied().unwrap_or(1.0);
        ((omega / dw).round() as usize).min(self.magnitudes.len() - 1)
    }
}

/// Amplitude spectrum of samples spaced by `dt`. The length must be a power
/// of two and at least 8.
pub fn fft_magnitudes(samples: &[f64], dt: f64) -> Result<Spectrum> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 samples, got {n}")));
    }
    if !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!("sample count {n} is not a power of two")));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("sample step must be positive".into()));
    }
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let mut frequencies = Vec::with_capacity(half + 1);
    let mut magnitudes = Vec::with_capacity(half + 1);
    for (k, c) in buf.iter().enumerate().take(half + 1) {
        let scale = if k == 0 || k == half { 1.0 } else { 2.0 };
        frequencies.push(k as f64 * dw);
        magnitudes.push(scale * c.norm() / n as f64);
    }
    Ok(Spectrum { frequencies, magnitudes })
}
