use std::f64::consts::PI;

use afc_core::analysis::fit_exponential;
use afc_core::bloch::{echo_decay_scan, evolve, two_pulse_echo, BlochEnsembleState, EchoExperiment};
use afc_core::sequencer::{Pulse, Sequence};
use afc_core::spectral::IonParameters;
use proptest::prelude::*;

fn no_decay() -> IonParameters {
    IonParameters::new(f64::INFINITY, f64::INFINITY).unwrap()
}

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_is_conserved_without_decay(
        pulses in prop::collection::vec((5e-9..30e-9f64, 1e7..2e8f64, -PI..PI), 1..4),
        gaps in prop::collection::vec(0.0..50e-9f64, 3),
    ) {
        let mut t = 0.0;
        let mut seq = Vec::new();
        for (i, (d, rabi, phase)) in pulses.iter().enumerate() {
            seq.push(Pulse { phase: *phase, ..Pulse::square(t, *d, *rabi) });
            t += d + gaps[i];
        }
        let seq = Sequence::from_pulses(seq).unwrap();
        let state = BlochEnsembleState::uniform(20e6, 5).unwrap();
        // RK4 drift per step is about (Ω·dt)⁶/72; this step keeps the total
        // well under the bound.
        let dt = 0.01 / seq.max_rabi().max(2.0 * PI * 10e6);
        let ev = evolve(&state, &seq, &no_decay(), dt, t + 20e-9).unwrap();
        for n in ev.state.norms() {
            prop_assert!((n - 1.0).abs() < 1e-8, "norm {n}");
        }
    }
}

#[test]
fn echo_decay_slope_is_two_over_t2() {
    for t2 in [400e-9, 700e-9] {
        let taus: Vec<f64> = (0..8).map(|i| t2 / 4.0 + i as f64 * (2.0 * t2 - t2 / 4.0) / 7.0).collect();
        let scan = echo_decay_scan(&hard(taus[0], t2), &taus).unwrap();
        let fit = fit_exponential(&taus, &scan.amplitudes()).unwrap();
        let slope = 1.0 / fit.decay_constant;
        assert!((slope / (2.0 / t2) - 1.0).abs() < 0.02, "T2={t2:e}: slope {slope:e}");
    }
}

#[test]
fn symmetric_classes_give_real_field() {
    let ev = two_pulse_echo(&hard(150e-9, 700e-9)).unwrap();
    for e in ev.trace.samples() {
        assert!(e.im.abs() <= 1e-6 * e.re.abs().max(1e-9), "{e}");
    }
}

#[test]
fn halving_the_step_barely_moves_the_echo() {
    let coarse = two_pulse_echo(&hard(200e-9, 700e-9)).unwrap().intensity;
    let fine = two_pulse_echo(&EchoExperiment { dt: Some(0.0625e-9), ..hard(200e-9, 700e-9) }).unwrap().intensity;
    assert!((coarse / fine - 1.0).abs() < 5e-3, "{coarse} vs {fine}");
}
