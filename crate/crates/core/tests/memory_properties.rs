use afc_core::analysis::afc_efficiency_analytic;
use afc_core::memory::{burn, burn_spectrum, input_trace, store_recall, transmit, BurnModel};
use afc_core::sequencer::{afc_burn_sequence, probe_pulse, BurnConfig};
use afc_core::spectral::{make_grid, CombSpec, InhomogeneousProfile, IonParameters, ToothShape};
use num_complex::Complex64;
use proptest::prelude::*;

fn comb_strategy() -> impl Strategy<Value = CombSpec> {
    (3e6..12e6f64, 1.5..6.0f64, 0.0..3.0f64, 0.0..1.0f64, 0..3usize).prop_map(|(spacing, finesse, tooth, bg, shape)| CombSpec {
        shape: [ToothShape::Square, ToothShape::Gaussian, ToothShape::Lorentzian][shape],
        ..CombSpec::square(spacing, spacing / finesse, tooth, bg)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn medium_is_passive(spec in comb_strategy(), t2 in 0.3e-6..3e-6f64, width in 3e-9..30e-9f64) {
        let grid = make_grid(400e6, 1 << 13).unwrap();
        let ions = IonParameters::with_t2(t2).unwrap();
        let profile = InhomogeneousProfile::comb(grid, &spec, 1e-3).unwrap();
        let input = input_trace(&probe_pulse(width, 0.0, 1.0).unwrap(), &grid).unwrap();
        let out = transmit(&profile, &ions, &input).unwrap();
        prop_assert!(out.energy() <= input.energy() * (1.0 + 1e-12));
    }

    #[test]
    fn transmission_is_linear(spec in comb_strategy(), re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let grid = make_grid(400e6, 1 << 12).unwrap();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let profile = InhomogeneousProfile::comb(grid, &spec, 1e-3).unwrap();
        let input = input_trace(&probe_pulse(10e-9, 0.0, 1.0).unwrap(), &grid).unwrap();
        let alpha = Complex64::new(re, im);
        let a = transmit(&profile, &ions, &input.scaled(alpha)).unwrap();
        let b = transmit(&profile, &ions, &input).unwrap();
        let scale = b.samples().iter().map(|s| s.norm()).fold(0.0, f64::max) * (1.0 + alpha.norm());
        for (x, y) in a.samples().iter().zip(b.samples()) {
            prop_assert!((x - y * alpha).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn stronger_burns_remove_more(k1 in 0.0..20.0f64, dk in 0.0..20.0f64, cap in 0.05..1.0f64, t in 60e-9..300e-9f64) {
        let grid = make_grid(200e6, 1 << 12).unwrap();
        let ions = IonParameters::with_t2(700e-9).unwrap();
        let seq = afc_burn_sequence(&BurnConfig { n_pairs: 5, ..BurnConfig::new(t, 1e7) }).unwrap();
        let spec = burn_spectrum(&seq, &grid, &ions, 1.5e-6).unwrap();
        let profile = InhomogeneousProfile::comb(grid, &CombSpec::square(5e6, 2e6, 0.5, 1.0), 0.0).unwrap();
        let weak = burn(&profile, &spec, &BurnModel::new(k1, cap).unwrap()).unwrap();
        let strong = burn(&profile, &spec, &BurnModel::new(k1 + dk, cap).unwrap()).unwrap();
        for (s, w) in strong.od_density().iter().zip(weak.od_density()) {
            prop_assert!(s <= w);
        }
    }
}

#[test]
fn echo_follows_comb_period() {
    let grid = make_grid(400e6, 1 << 14).unwrap();
    let ions = IonParameters::with_t2(700e-9).unwrap();
    let input = input_trace(&probe_pulse(10e-9, 0.0, 1.0).unwrap(), &grid).unwrap();
    for spacing in [4e6, 5e6, 6.3e6, 7.7e6, 11e6] {
        let profile = InhomogeneousProfile::comb(grid, &CombSpec::square(spacing, spacing / 3.0, 1.0, 0.0), 0.0).unwrap();
        let echo = store_recall(&profile, &ions, &input, None).unwrap();
        let delay = echo.echo_time.expect("echo");
        assert!((delay - 1.0 / spacing).abs() <= 10e-9, "{spacing}: {delay:e}");
    }
}

/// Ideal square teeth against the closed form. The only systematic is the
/// dephasing factor `exp(-2πγ/Δ)` that the closed form leaves out.
#[test]
fn efficiency_matches_closed_form() {
    let grid = make_grid(800e6, 1 << 16).unwrap();
    let ions = IonParameters::with_t2(4e-6).unwrap();
    let spacing = 20e6;
    let input = input_trace(&probe_pulse(5e-9, 0.0, 1.0).unwrap(), &grid).unwrap();
    let dephasing = (-2.0 * std::f64::consts::PI * ions.gamma_h() / spacing).exp();
    for finesse in [2.0, 3.0, 5.0] {
        for d in [0.5, 1.0, 2.0] {
            let profile = InhomogeneousProfile::comb(grid, &CombSpec::square(spacing, spacing / finesse, d, 0.0), 0.0).unwrap();
            let numeric = store_recall(&profile, &ions, &input, Some(1.0 / spacing)).unwrap().efficiency;
            let analytic = afc_efficiency_analytic(d, finesse, 0.0).unwrap();
            assert!((numeric / analytic - 1.0).abs() < 0.15, "F={finesse} d={d}");
            assert!((numeric / (analytic * dephasing) - 1.0).abs() < 5e-3, "F={finesse} d={d}: {numeric} vs {analytic}");
        }
    }
}
