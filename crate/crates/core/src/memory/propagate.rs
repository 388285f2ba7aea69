use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::analysis::find_peaks;
use crate::error::{ensure_non_negative, Error, Result};
use crate::fft;
use crate::io::csv_row;
use crate::sequencer::Sequence;
use crate::spectral::{complex_depth, InhomogeneousProfile, IonParameters, SpectralGrid};
use crate::trace::FieldTrace;

/// Input-pulse area above which the linear response is doubtful.
const WEAK_FIELD_AREA: f64 = 0.1;

/// Echo search floor relative to the input peak power.
const NOISE_FLOOR: f64 = 1e-8;

/// Sample a sequence on the time step that matches `grid`, ready for
/// [`transmit`]. Warns when pulses get fewer than ten samples.
pub fn input_trace(seq: &Sequence, grid: &SpectralGrid) -> Result<FieldTrace> {
    let dt = grid.time_step();
    if let Some(min) = seq.min_duration() {
        if dt > min / 10.0 {
            log::warn!("grid time step {dt:e} s resolves the shortest pulse with fewer than ten samples");
        }
    }
    let len = ((seq.t_end() / dt).round() as usize).max(1);
    FieldTrace::new(dt, 0.0, seq.sample(dt, 0.0, len))
}

/// Propagate a weak field through the medium in one pass.
///
/// The trace is zero-padded to the grid's time window, transformed, multiplied
/// by the amplitude transfer function `exp(-conj(d)/2)` of the complex depth
/// `d`, and transformed back. The conjugate makes the response causal for
/// envelopes that rotate as `exp(+2πi·δ·t)` at detuning `δ`. The returned trace
/// covers the whole time window.
pub fn transmit(profile: &InhomogeneousProfile, ions: &IonParameters, input: &FieldTrace) -> Result<FieldTrace> {
    let grid = profile.grid();
    let n = grid.len();
    if ((input.dt() - grid.time_step()) / grid.time_step()).abs() > 1e-9 {
        return Err(Error::SampleRateMismatch { trace_dt: input.dt(), grid_dt: grid.time_step() });
    }
    if input.len() > n {
        return Err(Error::WrapAround { duration: input.duration(), window: grid.time_window() });
    }
    let depth = complex_depth(profile, ions)?;
    let transfer: Vec<Complex64> = fft::grid_to_fft(depth.depth()).iter().map(|d| (-d.conj() / 2.0).exp()).collect();

    let mut buf = input.with_len(n).samples().to_vec();
    fft::forward(&mut buf);
    for (b, h) in buf.iter_mut().zip(&transfer) {
        *b *= h;
    }
    fft::inverse(&mut buf);
    let scale = 1.0 / n as f64;
    for b in &mut buf {
        *b *= scale;
    }
    FieldTrace::new(input.dt(), input.t0(), buf)
}

/// Optical depth seen by a narrowband probe tuned to each of `frequencies`.
///
/// With `probe_fwhm = 0` this is the absorptive part of the complex depth,
/// linearly interpolated. Otherwise the probe has a Gaussian power spectrum
/// of that FWHM and the result is `-ln` of its power transmission.
pub fn probe_scan(
    profile: &InhomogeneousProfile,
    ions: &IonParameters,
    frequencies: &[f64],
    probe_fwhm: f64,
) -> Result<Vec<f64>> {
    ensure_non_negative("probe_fwhm", probe_fwhm)?;
    let depth = complex_depth(profile, ions)?;
    let grid = profile.grid();
    for &f in frequencies {
        grid.position(f)?;
    }
    if probe_fwhm == 0.0 {
        return frequencies.iter().map(|&f| depth.absorption_at(f)).collect();
    }
    let freqs = grid.frequencies();
    let transmission: Vec<f64> = depth.absorption().iter().map(|d| (-d).exp()).collect();
    Ok(frequencies
        .iter()
        .map(|&f| {
            let (mut num, mut den) = (0.0, 0.0);
            for (nu, t) in freqs.iter().zip(&transmission) {
                let x = (nu - f) / probe_fwhm;
                let w = (-4.0 * LN_2 * x * x).exp();
                num += w * t;
                den += w;
            }
            -(num / den).ln()
        })
        .collect())
}

/// Outcome of a storage experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoResult {
    /// Delay of the recalled pulse after the input peak; `None` when no echo
    /// rose above the noise floor.
    pub echo_time: Option<f64>,
    /// Echo energy over input energy.
    pub efficiency: f64,
    /// Energy in the directly transmitted window over input energy.
    pub transmitted_fraction: f64,
    pub output_trace: FieldTrace,
}

impl EchoResult {
    pub fn detected(&self) -> bool {
        self.echo_time.is_some()
    }

    /// `delta_f_hz,echo_time_s,efficiency,transmitted_fraction`; a missing echo
    /// is written as NaN.
    pub fn to_row(&self, delta_f: f64) -> String {
        csv_row(&[delta_f, self.echo_time.unwrap_or(f64::NAN), self.efficiency, self.transmitted_fraction])
    }

    pub const ROW_HEADER: &'static str = "delta_f_hz,echo_time_s,efficiency,transmitted_fraction";
}

/// Send `input` through the comb and measure the recalled pulse.
///
/// The transmitted window spans two input durations (FWHM of the power) on
/// either side of the input peak. Echo candidates are local maxima of the
/// output power after that window and above `1e-8` of the input peak power;
/// among those within a factor two of the strongest, the earliest is taken,
/// or the one nearest `expected_delay_hint` when a hint is given. Efficiency
/// is the energy within two input durations of the echo peak. The reported
/// delay runs between power-weighted centroids, so flat-topped pulses get a
/// well-defined time.
pub fn store_recall(
    profile: &InhomogeneousProfile,
    ions: &IonParameters,
    input: &FieldTrace,
    expected_delay_hint: Option<f64>,
) -> Result<EchoResult> {
    let area: f64 = input.samples().iter().map(|s| s.norm()).sum::<f64>() * input.dt();
    if area > WEAK_FIELD_AREA {
        log::warn!("input pulse area {area:.3} rad exceeds {WEAK_FIELD_AREA} rad; propagation is treated as linear anyway");
    }
    let output = transmit(profile, ions, input)?;
    let input_energy = input.energy();
    let Some(peak) = input.peak_index() else {
        return Err(Error::InvalidParameter { name: "input", reason: "trace is empty".into() });
    };
    if input_energy == 0.0 {
        return Err(Error::InvalidParameter { name: "input", reason: "trace carries no energy".into() });
    }
    let half_window = 2.0 * input.fwhm();
    let t_in = centroid(input, input.time(peak) - half_window, input.time(peak) + half_window);
    let transmitted_fraction = output.energy_between(t_in - half_window, t_in + half_window) / input_energy;

    let powers = output.powers();
    let floor = NOISE_FLOOR * input.peak_power();
    let candidates: Vec<(f64, f64)> = find_peaks(&powers, 0.0)
        .into_iter()
        .map(|p| (output.time(p.index), powers[p.index]))
        .filter(|&(t, p)| t > t_in + half_window && p > floor)
        .collect();
    let strongest = candidates.iter().map(|c| c.1).fold(0.0, f64::max);
    let eligible = candidates.iter().filter(|c| c.1 >= 0.5 * strongest);
    let chosen = match expected_delay_hint {
        Some(hint) => eligible.min_by(|a, b| {
            let da = (a.0 - t_in - hint).abs();
            let db = (b.0 - t_in - hint).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        }),
        None => eligible.min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal)),
    };
    let Some(&(t_echo, _)) = chosen else {
        return Ok(EchoResult { echo_time: None, efficiency: 0.0, transmitted_fraction, output_trace: output });
    };
    let start = (t_echo - half_window).max(t_in + half_window + 0.5 * output.dt());
    let efficiency = output.energy_between(start, t_echo + half_window) / input_energy;
    let t_echo = centroid(&output, start, t_echo + half_window);
    Ok(EchoResult { echo_time: Some(t_echo - t_in), efficiency, transmitted_fraction, output_trace: output })
}

/// Power-weighted mean time of the samples in `[start, end]`.
fn centroid(trace: &FieldTrace, start: f64, end: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, s) in trace.samples().iter().enumerate() {
        let t = trace.time(i);
        if t >= start && t <= end {
            num += t * s.norm_sqr();
            den += s.norm_sqr();
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.5 * (start + end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequencer::probe_pulse;
    use crate::spectral::{flat_profile, make_grid, CombSpec};

    fn grid() -> SpectralGrid {
        make_grid(1e9, 1 << 14).unwrap()
    }

    fn probe(g: &SpectralGrid) -> FieldTrace {
        input_trace(&probe_pulse(10e-9, 0.0, 1e6).unwrap(), g).unwrap()
    }

    #[test]
    fn beer_lambert() {
        let g = grid();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let input = probe(&g);
        let out = transmit(&flat_profile(g, 1.0, 8e-4).unwrap(), &ions, &input).unwrap();
        assert!((out.energy() / input.energy() - (-1f64).exp()).abs() < 1e-12);
        let same = transmit(&flat_profile(g, 0.0, 8e-4).unwrap(), &ions, &input).unwrap();
        let peak = input.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
        for (a, b) in same.samples().iter().zip(input.with_len(g.len()).samples()) {
            assert!((a - b).norm() < 1e-12 * peak);
        }
    }

    /// Direct causal convolution with the impulse response of the medium,
    /// built from the transfer function by an explicit DFT sum.
    #[test]
    fn matches_time_domain_convolution() {
        let g = make_grid(800e6, 256).unwrap();
        let ions = IonParameters::with_t2(100e-9).unwrap();
        let profile = InhomogeneousProfile::comb(g, &CombSpec::square(50e6, 20e6, 1.5, 0.2), 0.0).unwrap();
        let depth = complex_depth(&profile, &ions).unwrap();
        let n = g.len();
        let h: Vec<Complex64> = (0..n)
            .map(|m| {
                (0..n)
                    .map(|j| {
                        let f = g.frequency(j);
                        let t = m as f64 * g.time_step();
                        (-depth.depth()[j].conj() / 2.0).exp() * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * t)
                    })
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect();
        let input = input_trace(&probe_pulse(10e-9, 0.0, 1.0).unwrap(), &g).unwrap();
        let out = transmit(&profile, &ions, &input).unwrap();
        for m in 0..n {
            let direct: Complex64 = (0..input.len()).map(|k| input.samples()[k] * h[(m + n - k) % n]).sum();
            assert!((direct - out.samples()[m]).norm() < 1e-10, "sample {m}");
        }
        // The echo shows up at 1/Δ = 20 ns.
        let e = store_recall(&profile, &ions, &input, None).unwrap();
        assert!((e.echo_time.unwrap() - 20e-9).abs() <= 10e-9);
    }

    #[test]
    fn passive_and_linear() {
        let g = grid();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let profile = InhomogeneousProfile::comb(g, &CombSpec::square(6.3e6, 3.7e6, 0.5, 0.3), 0.0).unwrap();
        let input = probe(&g);
        let out = transmit(&profile, &ions, &input).unwrap();
        assert!(out.energy() <= input.energy());
        let scaled = transmit(&profile, &ions, &input.scaled(Complex64::new(0.0, 3.0))).unwrap();
        let peak = out.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
        for (a, b) in scaled.samples().iter().zip(out.samples()) {
            assert!((a - b * Complex64::new(0.0, 3.0)).norm() < 1e-12 * peak);
        }
    }

    #[test]
    fn errors() {
        let g = grid();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let p = flat_profile(g, 1.0, 0.0).unwrap();
        let coarse = FieldTrace::new(2e-9, 0.0, vec![Complex64::new(1.0, 0.0); 8]).unwrap();
        assert!(matches!(transmit(&p, &ions, &coarse), Err(Error::SampleRateMismatch { .. })));
        let long = FieldTrace::new(g.time_step(), 0.0, vec![Complex64::new(1.0, 0.0); g.len() + 1]).unwrap();
        assert!(matches!(transmit(&p, &ions, &long), Err(Error::WrapAround { .. })));
        assert!(probe_scan(&p, &ions, &[1e9], 0.0).is_err());
    }

    #[test]
    fn flat_profile_has_no_echo() {
        let g = grid();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let r = store_recall(&flat_profile(g, 1.0, 0.0).unwrap(), &ions, &probe(&g), None).unwrap();
        assert!(!r.detected());
        assert_eq!(r.efficiency, 0.0);
        assert!(r.to_row(0.0).contains("NaN"));
    }

    #[test]
    fn probe_scan_of_flat_and_comb() {
        let g = grid();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let flat = probe_scan(&flat_profile(g, 1.0, 0.0).unwrap(), &ions, &[-5e6, 0.0, 7e6], 1e6).unwrap();
        assert!(flat.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let comb = InhomogeneousProfile::comb(g, &CombSpec::square(6.3e6, 3.7e6, 0.23, 0.77), 0.0).unwrap();
        let od = probe_scan(&comb, &ions, &[0.0, 3.15e6], 0.0).unwrap();
        assert!(od[0] > od[1] + 0.15);
    }
}
