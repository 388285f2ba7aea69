use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_positive, Result};
use crate::fft;

use super::grid::SpectralGrid;
use super::ions::IonParameters;
use super::profile::InhomogeneousProfile;

/// Complex optical depth `d_abs + i·d_disp` on a spectral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDepthSpectrum {
    grid: SpectralGrid,
    depth: Vec<Complex64>,
}

impl ComplexDepthSpectrum {
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn depth(&self) -> &[Complex64] {
        &self.depth
    }

    /// Absorptive part (Lorentzian-smoothed optical depth).
    pub fn absorption(&self) -> Vec<f64> {
        self.depth.iter().map(|d| d.re).collect()
    }

    /// Dispersive part, the Hilbert partner of the absorption.
    pub fn dispersion(&self) -> Vec<f64> {
        self.depth.iter().map(|d| d.im).collect()
    }

    /// Absorptive optical depth at an arbitrary in-grid detuning, by linear
    /// interpolation.
    pub fn absorption_at(&self, frequency: f64) -> Result<f64> {
        let pos = self.grid.position(frequency)?;
        let i = pos.floor() as usize;
        if i + 1 >= self.depth.len() {
            return Ok(self.depth[self.depth.len() - 1].re);
        }
        let t = pos - i as f64;
        Ok(self.depth[i].re * (1.0 - t) + self.depth[i + 1].re * t)
    }
}

/// Transform of the periodized, sampled complex Lorentzian kernel, scaled to
/// unit discrete area.
///
/// Sampling `ℓ(x)·df` on the grid and wrapping it with the grid period gives a
/// kernel whose discrete transform is the one-sided decay `2·exp(-πγt)`
/// folded into the time window `1/df`, with half weight at `t = 0`. Its sum
/// exceeds one by `2r/(1-r)`, `r = exp(-πγ/df)`; dividing that out keeps
/// flat profiles flat and conserves area exactly.
fn lorentzian_kernel_transform(grid: &SpectralGrid, gamma: f64) -> Vec<Complex64> {
    let n = grid.len();
    let dt = grid.time_step();
    let wrap = (-PI * gamma * grid.time_window()).exp();
    let norm = (1.0 - wrap) / (1.0 + wrap);
    let fold = norm / (1.0 - wrap);
    (0..n)
        .map(|m| {
            let value = if m == 0 {
                1.0
            } else {
                2.0 * (-PI * gamma * m as f64 * dt).exp() * fold
            };
            Complex64::new(value, 0.0)
        })
        .collect()
}

/// Circular convolution of grid-ordered samples with the unit-area complex
/// Lorentzian `ℓ(x) = (1/π)·(γ/2 + i·x)/(x² + (γ/2)²)` of FWHM `gamma`.
pub(crate) fn lorentzian_convolve(grid: &SpectralGrid, values: &[f64], gamma: f64) -> Vec<Complex64> {
    let n = grid.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut buf);
    let kernel = lorentzian_kernel_transform(grid, gamma);
    for (b, k) in buf.iter_mut().zip(&kernel) {
        *b *= k;
    }
    fft::inverse(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|b| b * scale).collect()
}

/// Convolve the profile with the homogeneous complex Lorentzian of the ions.
///
/// The simulation window is treated as one period of a profile that repeats
/// outside it, so a flat profile stays exactly flat and the dispersive part
/// is the exact discrete Hilbert partner of the absorptive part.
pub fn complex_depth(profile: &InhomogeneousProfile, ions: &IonParameters) -> Result<ComplexDepthSpectrum> {
    let grid = *profile.grid();
    let gamma = ions.gamma_h();
    ensure_positive("gamma_h", gamma)?;
    if gamma < 2.0 * grid.df() {
        log::warn!(
            "homogeneous linewidth {gamma:.4e} Hz is under two grid steps ({:.4e} Hz); the Lorentzian is poorly resolved",
            grid.df()
        );
    }
    let mut depth = lorentzian_convolve(&grid, profile.od_density(), gamma);
    for d in &mut depth {
        // Round-off can leave -1e-17 where the absorption vanishes.
        d.re = d.re.max(0.0);
    }
    Ok(ComplexDepthSpectrum { grid, depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{flat_profile, make_grid, CombSpec};

    /// Periodized sampled Lorentzian in closed form:
    /// `Σ_p ℓ((m + pN)·df)·df = (i/N)·cot(π(m + iγ/(2df))/N)`.
    fn periodic_kernel(m: f64, n: usize, gamma_over_df: f64) -> Complex64 {
        let z = Complex64::new(m, gamma_over_df / 2.0) * (PI / n as f64);
        Complex64::i() / n as f64 * (z.cos() / z.sin())
    }

    /// Direct O(N²) summation, no transforms.
    fn direct_depth(grid: &SpectralGrid, od: &[f64], gamma: f64) -> Vec<Complex64> {
        let n = grid.len();
        let g = gamma / grid.df();
        let r = (-PI * g).exp();
        let norm = (1.0 - r) / (1.0 + r);
        (0..n)
            .map(|j| {
                od.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(k, v)| periodic_kernel(j as f64 - k as f64, n, g) * *v * norm)
                    .sum()
            })
            .collect()
    }

    #[test]
    fn closed_form_kernel_matches_image_sum() {
        let (n, df, gamma) = (64usize, 1e5, 4.5e5);
        let ell = |x: f64| Complex64::new(gamma / 2.0, x) / (PI * (x * x + gamma * gamma / 4.0));
        let p_max = 400000i64;
        for m in [0.0f64, 1.0, 5.0, 31.0, -7.0] {
            // Symmetric truncation leaves a tail of about (2|m| + γ/df)/(π·N²·P).
            let tail = (2.0 * m.abs() + gamma / df) / (PI * (n * n) as f64 * p_max as f64);
            let images: Complex64 = (-p_max..=p_max).map(|p| ell((m + (p * n as i64) as f64) * df) * df).sum();
            let closed = periodic_kernel(m, n, gamma / df);
            assert!((images - closed).norm() < 1e-10 + 1.5 * tail, "m={m}: {images} vs {closed}");
        }
    }

    #[test]
    fn spike_matches_direct_summation() {
        let grid = make_grid(40e6, 512).unwrap();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let mut od = vec![0.0; 512];
        od[256] = 0.7;
        let profile = InhomogeneousProfile::new(grid, od.clone(), 1e-3).unwrap();
        let fast = complex_depth(&profile, &ions).unwrap();
        let slow = direct_depth(&grid, &od, ions.gamma_h());
        let peak = slow[256].norm();
        for (a, b) in fast.depth().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-9 * peak);
        }
        // Peak of a Lorentzian holding area 0.7·df.
        let expect = 0.7 * grid.df() * 2.0 / (PI * ions.gamma_h());
        assert!((fast.depth()[256].re - expect).abs() < 2e-3 * expect);
        // Dispersion is odd about the spike and positive above it.
        assert!(fast.depth()[260].im > 0.0);
        assert!((fast.depth()[260].im + fast.depth()[252].im).abs() < 1e-12);
    }

    #[test]
    fn structured_profile_matches_direct_summation() {
        let grid = make_grid(60e6, 256).unwrap();
        let ions = IonParameters::with_t2(200e-9).unwrap();
        let od: Vec<f64> = (0..256).map(|k| ((k as f64) * 0.37).sin().abs() * ((k % 7) as f64)).collect();
        let profile = InhomogeneousProfile::new(grid, od.clone(), 0.0).unwrap();
        let fast = complex_depth(&profile, &ions).unwrap();
        let slow = direct_depth(&grid, &od, ions.gamma_h());
        let scale = slow.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in fast.depth().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn flat_profile_stays_flat() {
        let grid = make_grid(400e6, 1 << 12).unwrap();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let d = complex_depth(&flat_profile(grid, 1.0, 8e-4).unwrap(), &ions).unwrap();
        for c in d.depth() {
            assert!((c.re - 1.0).abs() < 1e-12);
            assert!(c.im.abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_barely_changes_wide_comb_teeth() {
        use crate::analysis::analyze_comb;
        let grid = make_grid(200e6, 1 << 14).unwrap();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let spec = CombSpec::square(6.3e6, 3.7e6, 0.23, 0.77);
        let profile = InhomogeneousProfile::comb(grid, &spec, 8e-4).unwrap();
        let freqs = grid.frequencies();
        let raw = analyze_comb(&freqs, profile.od_density(), (-20e6, 20e6)).unwrap();
        let smooth = complex_depth(&profile, &ions).unwrap();
        let smoothed = analyze_comb(&freqs, &smooth.absorption(), (-20e6, 20e6)).unwrap();
        let change = (smoothed.mean_fwhm() - raw.mean_fwhm()).abs() / raw.mean_fwhm();
        assert!(change < 0.10, "tooth FWHM changed by {:.1}%", 100.0 * change);
    }
}
