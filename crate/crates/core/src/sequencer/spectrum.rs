use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::peaks::find_minima;
use crate::error::{ensure_positive, Error, Result};
use crate::io::complex_table;
use crate::spectral::{lorentzian_convolve, SpectralGrid};

use super::pulse::{Pulse, Sequence};

/// Fourier amplitude of a drive envelope sampled on a spectral grid.
/// `|amplitude|²` is the spectral energy density of the drive.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpectrum {
    grid: SpectralGrid,
    amplitude: Vec<Complex64>,
}

impl EnvelopeSpectrum {
    pub fn new(grid: SpectralGrid, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a {}-point grid",
                amplitude.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitude })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn power(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|amplitude|²` scaled to unit peak; all zeros for an empty spectrum.
    pub fn normalized_power(&self) -> Vec<f64> {
        let p = self.power();
        let max = p.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            p.iter().map(|v| v / max).collect()
        } else {
            p
        }
    }

    /// `Σ|amplitude|²·df`, the frequency-domain side of Parseval.
    pub fn energy(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.df()
    }

    /// Power density seen by ions of homogeneous FWHM `gamma`: the power
    /// spectrum convolved with their absorption Lorentzian. The result keeps
    /// only the magnitude.
    pub fn homogeneously_broadened(&self, gamma: f64) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        let smoothed = lorentzian_convolve(&self.grid, &self.power(), gamma);
        let amplitude = smoothed.iter().map(|c| Complex64::new(c.re.max(0.0).sqrt(), 0.0)).collect();
        Self::new(self.grid, amplitude)
    }

    /// `frequency_hz,re,im,power` table.
    pub fn to_text(&self, header: &[String]) -> String {
        complex_table(header, "frequency_hz", &self.grid.frequencies(), &self.amplitude)
    }
}

fn check_grid_width(seq: &Sequence, grid: &SpectralGrid) -> Result<()> {
    if let Some(min) = seq.min_duration() {
        if grid.span() < 1.0 / min {
            return Err(Error::GridTooNarrow { span: grid.span(), min: 1.0 / min });
        }
        if grid.span() < 2.0 / min {
            log::warn!("grid span {:e} Hz is under twice the shortest pulse bandwidth", grid.span());
        }
    }
    Ok(())
}

/// Runs equal up to round-off in their relative timing and phase.
fn same_run(a: &[Pulse], b: &[Pulse]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(p, q)| {
            (p.t_start - q.t_start).abs() <= 1e-9 * p.duration
                && (p.phase - q.phase).abs() <= 1e-12
                && Pulse { t_start: 0.0, phase: 0.0, ..*p } == Pulse { t_start: 0.0, phase: 0.0, ..*q }
        })
}

fn segment_spectrum(pulses: &[Pulse], grid: &SpectralGrid) -> Vec<Complex64> {
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let f = grid.frequency(k);
            pulses.iter().map(|p| p.spectrum_at(f)).sum()
        })
        .collect()
}

/// Continuous Fourier transform of the sequence envelope evaluated at every
/// grid frequency.
///
/// Each pulse is transformed in closed form, so the result carries no
/// sampling or aliasing error; `Σ|A|²·df` matches `∫|Ω|²dt` whenever the grid
/// resolves the sequence (`df ≲ 1/duration`) and covers its bandwidth.
pub fn power_spectrum(seq: &Sequence, grid: &SpectralGrid) -> Result<EnvelopeSpectrum> {
    check_grid_width(seq, grid)?;
    EnvelopeSpectrum::new(*grid, segment_spectrum(seq.pulses(), grid))
}

/// Spectrum with interference only inside runs of pulses separated by less
/// than `coherence_gap`; separate runs add in power.
///
/// This is the ensemble average over independent random phases between the
/// runs, i.e. what a medium that dephases between pulse pairs responds to.
/// The returned amplitude is real: `sqrt(Σ_runs |A_run|²)`.
pub fn incoherent_power_spectrum(seq: &Sequence, grid: &SpectralGrid, coherence_gap: f64) -> Result<EnvelopeSpectrum> {
    ensure_positive("coherence_gap", coherence_gap)?;
    check_grid_width(seq, grid)?;
    let mut power = vec![0.0; grid.len()];
    let mut cache: Vec<(Vec<Pulse>, Vec<f64>)> = Vec::new();
    for segment in seq.coherent_segments(coherence_gap) {
        // A common time shift or phase leaves |A|² unchanged when the run
        // shares one carrier offset, so such runs reuse a cached spectrum.
        let first = segment[0];
        let key: Vec<Pulse> = segment
            .iter()
            .map(|p| Pulse { t_start: p.t_start - first.t_start, phase: p.phase - first.phase, ..*p })
            .collect();
        let shareable = segment.iter().all(|p| p.carrier_offset == first.carrier_offset);
        let cached = if shareable { cache.iter().find(|(k, _)| same_run(k, &key)) } else { None };
        let seg_power = match cached {
            Some((_, p)) => p.clone(),
            None => {
                let p: Vec<f64> = segment_spectrum(segment, grid).iter().map(|a| a.norm_sqr()).collect();
                if shareable {
                    cache.push((key, p.clone()));
                }
                p
            }
        };
        for (acc, v) in power.iter_mut().zip(&seg_power) {
            *acc += v;
        }
    }
    EnvelopeSpectrum::new(*grid, power.iter().map(|p| Complex64::new(p.sqrt(), 0.0)).collect())
}

/// Acousto-optic modulator passband: Gaussian power transmission with FWHM
/// `bandwidth_fwhm` centered at `center`.
pub fn aom_filter(spec: &EnvelopeSpectrum, bandwidth_fwhm: f64, center: f64) -> Result<EnvelopeSpectrum> {
    ensure_positive("bandwidth_fwhm", bandwidth_fwhm)?;
    let amplitude = spec
        .amplitude
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let x = (spec.grid.frequency(k) - center) / bandwidth_fwhm;
            a * (-2.0 * LN_2 * x * x).exp()
        })
        .collect();
    EnvelopeSpectrum::new(spec.grid, amplitude)
}

/// Fringe period of a power spectrum inside `window`, from the median
/// spacing of its interference nulls.
///
/// Nulls of a pulse-pair spectrum sit exactly at `(m + ½)/T` whatever the
/// single-pulse envelope, so they locate the fringes more reliably than the
/// maxima. Each null is refined with a parabola through its neighbours.
pub fn fringe_spacing(spec: &EnvelopeSpectrum, window: (f64, f64)) -> Option<f64> {
    let grid = spec.grid;
    let power = spec.power();
    let lo = grid.nearest_index(window.0);
    let hi = grid.nearest_index(window.1);
    if hi <= lo + 2 {
        return None;
    }
    let slice = &power[lo..=hi];
    let max = slice.iter().cloned().fold(0.0, f64::max);
    let nulls = find_minima(slice, 0.1 * max);
    let positions: Vec<f64> = nulls
        .iter()
        .map(|&i| {
            let (a, b, c) = (slice[i - 1], slice[i], slice[i + 1]);
            let curvature = a - 2.0 * b + c;
            let offset = if curvature > 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
            grid.frequency(lo + i) + offset * grid.df()
        })
        .collect();
    if positions.len() < 2 {
        return None;
    }
    let mut gaps: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    Some(crate::analysis::median(&mut gaps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequencer::{afc_burn_sequence, probe_pulse, BurnConfig, InterPairPhase};
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    /// Brute-force DFT of the sampled envelope at one frequency.
    fn dft_at(seq: &Sequence, dt: f64, f: f64) -> Complex64 {
        let n = (seq.t_end() / dt).round() as usize;
        (0..n)
            .map(|k| {
                let t = (k as f64 + 0.5) * dt;
                seq.rabi_at(t) * Complex64::from_polar(dt, -2.0 * PI * f * t)
            })
            .sum()
    }

    #[test]
    fn single_pulse_sinc_nulls() {
        let grid = make_grid(400e6, 4096).unwrap();
        let seq = probe_pulse(10e-9, 0.0, 1.0).unwrap();
        let spec = power_spectrum(&seq, &grid).unwrap();
        let p = spec.power();
        let peak = p[grid.len() / 2];
        assert!((peak - 1e-16).abs() < 1e-28);
        for f in [100e6, -100e6] {
            assert!(p[grid.nearest_index(f)] < 1e-12 * peak);
        }
        assert!(p[grid.nearest_index(150e6)] > 0.01 * peak);
    }

    #[test]
    fn pair_matches_brute_force_dft() {
        let grid = make_grid(100e6, 256).unwrap();
        let cfg = BurnConfig { n_pairs: 1, ..BurnConfig::new(130e-9, 1.0) };
        let seq = afc_burn_sequence(&cfg).unwrap();
        let spec = power_spectrum(&seq, &grid).unwrap();
        for k in (0..256).step_by(17) {
            let f = grid.frequency(k);
            let brute = dft_at(&seq, 1e-12, f);
            assert!((spec.amplitude()[k] - brute).norm() < 1e-4 * 20e-9, "k={k}");
        }
    }

    #[test]
    fn pair_fringes_follow_separation() {
        let grid = make_grid(200e6, 1 << 14).unwrap();
        let cfg = BurnConfig { n_pairs: 1, ..BurnConfig::new(130e-9, 1.0) };
        let spec = power_spectrum(&afc_burn_sequence(&cfg).unwrap(), &grid).unwrap();
        let spacing = fringe_spacing(&spec, (-40e6, 40e6)).unwrap();
        assert!((spacing - 1.0 / 130e-9).abs() < grid.df(), "{spacing}");
    }

    #[test]
    fn long_train_keeps_pair_fringes() {
        let grid = make_grid(200e6, 1 << 14).unwrap();
        let cfg = BurnConfig::new(158.7e-9, 1.0);
        let seq = afc_burn_sequence(&cfg).unwrap();
        let avg = incoherent_power_spectrum(&seq, &grid, 1e-6).unwrap();
        let spacing = fringe_spacing(&avg, (-40e6, 40e6)).unwrap();
        assert!((spacing - 6.3e6).abs() < 2.0 * grid.df(), "{spacing}");
        // Averaged power is the sum of the per-pair powers.
        let single = power_spectrum(&afc_burn_sequence(&BurnConfig { n_pairs: 1, ..cfg }).unwrap(), &grid).unwrap();
        let single = single.power();
        let max = single.iter().cloned().fold(0.0, f64::max);
        for (a, b) in avg.power().iter().zip(&single) {
            assert!((a - 150.0 * b).abs() <= 1e-9 * 150.0 * max);
        }
    }

    #[test]
    fn coherent_train_shows_fine_structure() {
        // Coherent pairs repeated every 3 µs interfere at 1/3 µs = 333 kHz.
        let grid = make_grid(100e6, 1 << 13).unwrap();
        let cfg = BurnConfig { n_pairs: 20, ..BurnConfig::new(158.7e-9, 1.0) };
        let spec = power_spectrum(&afc_burn_sequence(&cfg).unwrap(), &grid).unwrap();
        let spacing = fringe_spacing(&spec, (-1.5e6, 1.5e6)).unwrap();
        assert!((spacing - 1.0 / 3e-6).abs() < 2.0 * grid.df(), "{spacing}");
    }

    #[test]
    fn random_phase_average_converges_to_incoherent() {
        let grid = make_grid(100e6, 512).unwrap();
        let base = BurnConfig { n_pairs: 8, ..BurnConfig::new(130e-9, 1.0) };
        let target = incoherent_power_spectrum(&afc_burn_sequence(&base).unwrap(), &grid, 1e-6).unwrap().power();
        let trials = 400;
        let mut mean = vec![0.0; grid.len()];
        for seed in 0..trials {
            let cfg = BurnConfig { inter_pair_phase: InterPairPhase::Randomized { seed }, ..base };
            let p = power_spectrum(&afc_burn_sequence(&cfg).unwrap(), &grid).unwrap().power();
            for (m, v) in mean.iter_mut().zip(p) {
                *m += v / trials as f64;
            }
        }
        let total: f64 = target.iter().sum();
        let err: f64 = mean.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum();
        assert!(err / total < 0.1, "{}", err / total);
    }

    #[test]
    fn aom_half_power_points() {
        let grid = make_grid(200e6, 2048).unwrap();
        let flat = EnvelopeSpectrum::new(grid, vec![Complex64::new(1.0, 0.0); 2048]).unwrap();
        let out = aom_filter(&flat, 50e6, 0.0).unwrap();
        let p = out.power();
        assert!((p[grid.nearest_index(0.0)] - 1.0).abs() < 1e-15);
        assert!((p[grid.nearest_index(25e6)] - 0.5).abs() < 1e-12);
        assert!((p[grid.nearest_index(-25e6)] - 0.5).abs() < 1e-12);
        // Monotone roll-off away from the center.
        assert!(p[grid.nearest_index(10e6)] > p[grid.nearest_index(20e6)]);
        assert!(aom_filter(&flat, 0.0, 0.0).is_err());
    }

    #[test]
    fn narrow_grid_is_an_error() {
        let grid = make_grid(50e6, 256).unwrap();
        let seq = probe_pulse(10e-9, 0.0, 1.0).unwrap();
        assert!(matches!(power_spectrum(&seq, &grid), Err(Error::GridTooNarrow { .. })));
    }
}
