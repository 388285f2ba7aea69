use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{ensure_positive, invalid, Result};
use crate::io::csv_row;
use crate::sequencer::echo_sequence;
use crate::spectral::IonParameters;
use crate::trace::FieldTrace;

use super::evolve::{evolve, max_time_step, BlochEnsembleState};

/// Smallest class count accepted by the echo routines.
pub const MIN_CLASSES: usize = 201;

/// Two-pulse echo on a uniform set of detuning classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoExperiment {
    /// Length of the first (π/2) pulse.
    pub t1: f64,
    /// Length of the second (π) pulse.
    pub t2: f64,
    /// Start-to-start delay between the pulses.
    pub tau: f64,
    /// Rabi frequency of both pulses, rad/s.
    pub omega: f64,
    pub ions: IonParameters,
    /// Full width of the class distribution, Hz.
    pub bandwidth: f64,
    pub n_classes: usize,
    /// Integration step; `None` picks the largest step allowed.
    pub dt: Option<f64>,
}

/// Echo found by [`two_pulse_echo`].
#[derive(Debug, Clone, PartialEq)]
pub struct EchoPoint {
    /// Peak `|E|²` inside the echo window.
    pub intensity: f64,
    /// Time of that peak, measured from the start of the first pulse.
    pub echo_time: f64,
    pub trace: FieldTrace,
}

/// Echo intensity against a scanned parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoScanResult {
    pub scan_values: Vec<f64>,
    pub echo_intensity: Vec<f64>,
}

impl EchoScanResult {
    /// `sqrt` of the intensities, the quantity that decays as `exp(-2τ/T₂)`.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.echo_intensity.iter().map(|i| i.sqrt()).collect()
    }

    /// First interior local maximum of the intensity.
    pub fn first_maximum(&self) -> Option<(f64, f64)> {
        let y = &self.echo_intensity;
        (1..y.len().saturating_sub(1))
            .find(|&i| y[i] >= y[i - 1] && y[i] > y[i + 1])
            .map(|i| (self.scan_values[i], y[i]))
    }

    /// `scan_value,echo_intensity` table.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        out.push_str("scan_value,echo_intensity\n");
        for (x, y) in self.scan_values.iter().zip(&self.echo_intensity) {
            let _ = writeln!(out, "{}", csv_row(&[*x, *y]));
        }
        out
    }
}

impl EchoExperiment {
    fn validate(&self) -> Result<()> {
        ensure_positive("bandwidth", self.bandwidth)?;
        ensure_positive("omega", self.omega)?;
        if self.n_classes < MIN_CLASSES {
            return Err(invalid("n_classes", format!("must be >= {MIN_CLASSES}, got {}", self.n_classes)));
        }
        if let Some(dt) = self.dt {
            ensure_positive("dt", dt)?;
        }
        if self.tau + self.t1 + self.t2 > 5.0 * self.ions.t2() {
            log::warn!("echo delay {:e} s exceeds five coherence times; the echo is mostly decayed", self.tau);
        }
        Ok(())
    }
}

/// Simulate the π/2–τ–π sequence and read the echo off the emitted field.
///
/// The echo intensity is the largest `|E|²` within `[1.5τ, 2.5τ]` after the
/// first pulse starts.
pub fn two_pulse_echo(exp: &EchoExperiment) -> Result<EchoPoint> {
    exp.validate()?;
    let seq = echo_sequence(exp.t1, exp.t2, exp.tau, exp.omega)?;
    let state = BlochEnsembleState::uniform(exp.bandwidth, exp.n_classes)?;
    let dt = match exp.dt {
        Some(dt) => dt,
        None => max_time_step(&state, &seq, &exp.ions),
    };
    let t_end = (2.5 * exp.tau).max(seq.t_end());
    let ev = evolve(&state, &seq, &exp.ions, dt, t_end)?;
    let trace = ev.emitted;
    let (lo, hi) = (1.5 * exp.tau, 2.5 * exp.tau);
    let (mut best_t, mut best) = (f64::NAN, 0.0);
    for (i, s) in trace.samples().iter().enumerate() {
        let t = trace.time(i);
        if t >= lo && t <= hi && (best_t.is_nan() || s.norm_sqr() > best) {
            best = s.norm_sqr();
            best_t = t;
        }
    }
    Ok(EchoPoint { intensity: best, echo_time: best_t, trace })
}

/// Echo intensity for each length of the second pulse. A zero length gives
/// no rephasing and zero echo.
pub fn rabi_scan(exp: &EchoExperiment, t2_values: &[f64]) -> Result<EchoScanResult> {
    if t2_values.iter().any(|&t| !(t >= 0.0)) {
        return Err(invalid("t2_values", "must be >= 0"));
    }
    if t2_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("t2_values", "must be sorted"));
    }
    let echo_intensity = t2_values
        .par_iter()
        .map(|&t2| if t2 == 0.0 { Ok(0.0) } else { two_pulse_echo(&EchoExperiment { t2, ..*exp }).map(|p| p.intensity) })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EchoScanResult { scan_values: t2_values.to_vec(), echo_intensity })
}

/// Echo intensity for each pulse delay.
pub fn echo_decay_scan(exp: &EchoExperiment, taus: &[f64]) -> Result<EchoScanResult> {
    let echo_intensity = taus
        .par_iter()
        .map(|&tau| two_pulse_echo(&EchoExperiment { tau, ..*exp }).map(|p| p.intensity))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EchoScanResult { scan_values: taus.to_vec(), echo_intensity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn hard(tau: f64, t2: f64) -> EchoExperiment {
        EchoExperiment {
            t1: 2e-9,
            t2: 4e-9,
            tau,
            omega: PI / 4e-9,
            ions: IonParameters::with_t2(t2).unwrap(),
            bandwidth: 40e6,
            n_classes: 201,
            dt: Some(0.125e-9),
        }
    }

    #[test]
    fn hard_pulse_echo_at_two_tau() {
        let p = two_pulse_echo(&hard(200e-9, f64::INFINITY)).unwrap();
        // Free precession from the end of the first pulse to the start of the
        // second is mirrored after the second ends. Dephasing during a hard
        // π/2 pulse adds an effective 2·t1/π.
        let expect = (200e-9 + 4e-9) + (200e-9 - 2e-9) + 2.0 * 2e-9 / PI;
        assert!((p.echo_time - expect).abs() <= 0.25e-9, "{}", p.echo_time);
        assert!(p.intensity > 0.8);
    }

    #[test]
    fn too_few_classes() {
        let e = EchoExperiment { n_classes: 100, ..hard(200e-9, 700e-9) };
        assert!(two_pulse_echo(&e).is_err());
    }

    #[test]
    fn scan_helpers() {
        let r = EchoScanResult { scan_values: vec![1.0, 2.0, 3.0, 4.0], echo_intensity: vec![0.0, 2.0, 1.0, 3.0] };
        assert_eq!(r.first_maximum(), Some((2.0, 2.0)));
        assert!(r.to_text(&[]).starts_with("scan_value,echo_intensity\n"));
        let z = rabi_scan(&hard(200e-9, 700e-9), &[0.0]).unwrap();
        assert_eq!(z.echo_intensity, vec![0.0]);
    }
}
