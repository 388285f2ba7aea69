use num_complex::Complex64;

use crate::error::{ensure_positive, invalid, Result};
use crate::io::complex_table;

/// Complex field envelope sampled in time.
///
/// Samples carry units of √W when the trace represents an optical field, so
/// `Σ|s|²·dt` is an energy. Traces built from pulse sequences carry Rabi
/// frequencies instead; propagation is linear, so ratios are unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrace {
    dt: f64,
    t0: f64,
    samples: Vec<Complex64>,
}

impl FieldTrace {
    pub fn new(dt: f64, t0: f64, samples: Vec<Complex64>) -> Result<Self> {
        ensure_positive("dt", dt)?;
        if !t0.is_finite() {
            return Err(invalid("t0", "must be finite"));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(invalid("samples", "must be finite"));
        }
        Ok(Self { dt, t0, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| self.time(i)).collect()
    }

    /// Total record length, `len·dt`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Energy of the samples whose times fall in `[start, end]`.
    pub fn energy_between(&self, start: f64, end: f64) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let t = self.time(*i);
                t >= start && t <= end
            })
            .map(|(_, s)| s.norm_sqr())
            .sum::<f64>()
            * self.dt
    }

    pub fn powers(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// Index of the largest |s|², first one on ties.
    pub fn peak_index(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in self.samples.iter().enumerate() {
            let p = s.norm_sqr();
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((i, p));
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn peak_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max)
    }

    /// Full width at half maximum of |s|², measured between the outermost
    /// samples at or above half the peak power. Falls back to `dt` for a
    /// single-sample pulse.
    pub fn fwhm(&self) -> f64 {
        let peak = self.peak_power();
        if peak == 0.0 {
            return 0.0;
        }
        let above: Vec<usize> =
            (0..self.samples.len()).filter(|&i| self.samples[i].norm_sqr() >= 0.5 * peak).collect();
        let first = *above.first().unwrap();
        let last = *above.last().unwrap();
        (last - first + 1) as f64 * self.dt
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { dt: self.dt, t0: self.t0, samples: self.samples.iter().map(|s| s * factor).collect() }
    }

    /// Zero-extend (or truncate) to exactly `len` samples.
    pub fn with_len(&self, len: usize) -> Self {
        let mut samples = self.samples.clone();
        samples.resize(len, Complex64::new(0.0, 0.0));
        Self { dt: self.dt, t0: self.t0, samples }
    }

    /// Linear interpolation onto a new sample interval, covering the same
    /// record length.
    pub fn resampled(&self, dt: f64) -> Result<Self> {
        ensure_positive("dt", dt)?;
        let len = (self.duration() / dt).round().max(1.0) as usize;
        let samples = (0..len)
            .map(|j| {
                let pos = j as f64 * dt / self.dt;
                let i = pos.floor() as usize;
                let frac = pos - i as f64;
                let a = self.samples.get(i).copied().unwrap_or_default();
                let b = self.samples.get(i + 1).copied().unwrap_or_default();
                a * (1.0 - frac) + b * frac
            })
            .collect();
        Self::new(dt, self.t0, samples)
    }

    /// `t_s,re,im,power` table.
    pub fn to_text(&self, header: &[String]) -> String {
        complex_table(header, "t_s", &self.times(), &self.samples)
    }
}
