use afc_core::analysis::{afc_efficiency_analytic, analyze_comb, fit_exponential};
use afc_core::spectral::{make_grid, CombSpec, InhomogeneousProfile, ToothShape};
use proptest::prelude::*;

fn gaussian_comb(spacing: f64, finesse: f64) -> (Vec<f64>, Vec<f64>) {
    let grid = make_grid(200e6, 1 << 14).unwrap();
    let spec = CombSpec { shape: ToothShape::Gaussian, ..CombSpec::square(spacing, spacing / finesse, 0.4, 0.6) };
    let p = InhomogeneousProfile::comb(grid, &spec, 0.0).unwrap();
    (grid.frequencies(), p.od_density().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn comb_metrics_scale_with_od(spacing in 4e6..12e6f64, finesse in 1.5..4.0f64, c in 0.05..20.0f64) {
        let (f, od) = gaussian_comb(spacing, finesse);
        let scaled: Vec<f64> = od.iter().map(|v| v * c).collect();
        let a = analyze_comb(&f, &od, (-30e6, 30e6)).unwrap();
        let b = analyze_comb(&f, &scaled, (-30e6, 30e6)).unwrap();
        prop_assert!((b.od_contrast - c * a.od_contrast).abs() <= 1e-9 * c * a.od_contrast);
        prop_assert!((b.background_od - c * a.background_od).abs() <= 1e-9 * c);
        prop_assert!((b.spacing - a.spacing).abs() <= 1e-6 * a.spacing);
        prop_assert!((b.finesse - a.finesse).abs() <= 1e-9 * a.finesse);
        prop_assert_eq!(a.teeth.len(), b.teeth.len());
        for (x, y) in a.teeth.iter().zip(&b.teeth) {
            prop_assert!((y.peak_od - c * x.peak_od).abs() <= 1e-9 * c * x.peak_od);
            prop_assert!((y.fwhm - x.fwhm).abs() <= 1e-6 * x.fwhm);
        }
    }

    #[test]
    fn fit_is_shift_equivariant(
        tau in 50e-9..2e-6f64,
        amp in 0.1..10.0f64,
        t0 in -1e-6..1e-6f64,
        noise in prop::collection::vec(-0.05..0.05f64, 12),
    ) {
        let x: Vec<f64> = (0..12).map(|i| 100e-9 + i as f64 * 40e-9).collect();
        let y: Vec<f64> = x.iter().zip(&noise).map(|(v, n)| amp * (-v / tau).exp() * (1.0 + n)).collect();
        let shifted: Vec<f64> = x.iter().map(|v| v + t0).collect();
        let a = fit_exponential(&x, &y).unwrap();
        let b = fit_exponential(&shifted, &y).unwrap();
        prop_assert!((b.decay_constant / a.decay_constant - 1.0).abs() < 1e-9);
        prop_assert!((b.amplitude / (a.amplitude * (t0 / a.decay_constant).exp()) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn background_always_costs_efficiency(d in 0.01..10.0f64, f in 1.01..20.0f64, d0 in 0.0..5.0f64, step in 1e-3..1.0f64) {
        let a = afc_efficiency_analytic(d, f, d0).unwrap();
        let b = afc_efficiency_analytic(d, f, d0 + step).unwrap();
        prop_assert!(b < a);
    }
}

#[test]
fn synthetic_comb_finesse() {
    let grid = make_grid(200e6, 1 << 14).unwrap();
    let p = InhomogeneousProfile::comb(grid, &CombSpec::square(6.3e6, 3.7e6, 0.23, 0.77), 0.0).unwrap();
    let a = analyze_comb(&grid.frequencies(), p.od_density(), (-40e6, 40e6)).unwrap();
    assert!((a.finesse - 1.70).abs() <= 0.03, "{}", a.finesse);
    assert!((a.spacing - 6.3e6).abs() <= 0.02 * 6.3e6);
    assert!((a.od_contrast - 0.23).abs() < 0.01);
}
