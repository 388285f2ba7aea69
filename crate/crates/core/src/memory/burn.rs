use crate::analysis::analyze_comb;
use crate::error::{ensure_non_negative, invalid, Error, Result};
use crate::sequencer::{incoherent_power_spectrum, EnvelopeSpectrum, Sequence};
use crate::spectral::{complex_depth, InhomogeneousProfile, IonParameters, SpectralGrid};

/// Saturable hole-burning response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurnModel {
    /// Burn strength per unit normalized spectral density.
    pub kappa: f64,
    /// Fraction of the optical depth that can be burned away, in `(0, 1]`.
    pub hole_depth_cap: f64,
}

impl BurnModel {
    pub fn new(kappa: f64, hole_depth_cap: f64) -> Result<Self> {
        let m = Self { kappa, hole_depth_cap };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) {
            return Err(invalid("kappa", format!("must be >= 0, got {}", self.kappa)));
        }
        if !(self.hole_depth_cap > 0.0 && self.hole_depth_cap <= 1.0) {
            return Err(invalid("hole_depth_cap", format!("must lie in (0, 1], got {}", self.hole_depth_cap)));
        }
        Ok(())
    }
}

/// Spectral density a burn sequence deposits into ions of the given
/// homogeneous linewidth.
///
/// Pulses closer than `coherence_gap` interfere; separate runs add in power.
/// The result is then convolved with the homogeneous line so that no hole is
/// narrower than the ions themselves.
pub fn burn_spectrum(seq: &Sequence, grid: &SpectralGrid, ions: &IonParameters, coherence_gap: f64) -> Result<EnvelopeSpectrum> {
    incoherent_power_spectrum(seq, grid, coherence_gap)?.homogeneously_broadened(ions.gamma_h())
}

/// Burn holes where the spectrum has power:
/// `d' = d·[(1 - cap) + cap·exp(-kappa·S̄)]` with `S̄` the power normalized to
/// unit peak.
pub fn burn(profile: &InhomogeneousProfile, spec: &EnvelopeSpectrum, model: &BurnModel) -> Result<InhomogeneousProfile> {
    model.validate()?;
    profile.grid().check_same(spec.grid())?;
    let cap = model.hole_depth_cap;
    let od = profile
        .od_density()
        .iter()
        .zip(spec.normalized_power())
        .map(|(&d, s)| {
            let kept = if s > 0.0 { (-model.kappa * s).exp() } else { 1.0 };
            d * ((1.0 - cap) + cap * kept)
        })
        .collect();
    InhomogeneousProfile::new(*profile.grid(), od, profile.length())
}

/// Contrast and background OD after burning with `kappa`; `None` when no
/// comb is visible. With `ions` the metrics are read off the homogeneously
/// smoothed absorption, as a probe would see it.
fn comb_metrics(
    profile: &InhomogeneousProfile,
    spec: &EnvelopeSpectrum,
    kappa: f64,
    cap: f64,
    window: (f64, f64),
    ions: Option<&IonParameters>,
) -> Result<Option<(f64, f64)>> {
    let burned = burn(profile, spec, &BurnModel { kappa, hole_depth_cap: cap })?;
    let od = match ions {
        Some(ions) => complex_depth(&burned, ions)?.absorption(),
        None => burned.od_density().to_vec(),
    };
    match analyze_comb(&profile.grid().frequencies(), &od, window) {
        Ok(a) => Ok(Some((a.od_contrast, a.background_od))),
        Err(Error::NotAComb { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn contrast(
    profile: &InhomogeneousProfile,
    spec: &EnvelopeSpectrum,
    kappa: f64,
    cap: f64,
    window: (f64, f64),
    ions: Option<&IonParameters>,
) -> Result<f64> {
    Ok(comb_metrics(profile, spec, kappa, cap, window, ions)?.map_or(0.0, |m| m.0))
}

/// Solve `eval(kappa) = target` on the rising branch of a curve that grows
/// from zero, peaks and may fall again. Returns `(kappa, value)`.
fn solve_rising(eval: impl Fn(f64) -> Result<f64>, target: f64, what: &str) -> Result<(f64, f64)> {
    let mut scan = Vec::new();
    let mut k = 1e-3;
    while k <= 1e4 {
        scan.push((k, eval(k)?));
        k *= 1.25;
    }
    let (i_max, &(_, v_max)) = scan
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("scan is non-empty");
    if target > v_max {
        return Err(Error::Unreachable { target, max_achievable: v_max });
    }
    let hi_idx = scan[..=i_max].iter().position(|&(_, v)| v >= target).expect("maximum reaches target");
    let (mut lo, mut hi) = if hi_idx == 0 { (0.0, scan[0].0) } else { (scan[hi_idx - 1].0, scan[hi_idx].0) };
    let mut best = (hi, scan[hi_idx].1);
    let tol = 1e-4 * target.max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid)?;
        if (v - target).abs() < (best.1 - target).abs() {
            best = (mid, v);
        }
        if (v - target).abs() < tol {
            break;
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.1 - target).abs() > 10.0 * tol {
        return Err(Error::Invariant(format!("burn calibration stalled at {what} {} for target {target}", best.1)));
    }
    Ok(best)
}

/// Find the burn strength that gives a comb contrast of `target_contrast`
/// inside `window`.
///
/// Contrast first grows with `kappa` and eventually falls again once the
/// teeth are burned too. A geometric scan locates the maximum; bisection on
/// the rising branch then matches the target to within `1e-4`.
pub fn calibrate_burn(
    profile: &InhomogeneousProfile,
    spec: &EnvelopeSpectrum,
    target_contrast: f64,
    hole_depth_cap: f64,
    window: (f64, f64),
    ions: Option<&IonParameters>,
) -> Result<BurnModel> {
    ensure_non_negative("target_contrast", target_contrast)?;
    BurnModel::new(0.0, hole_depth_cap)?;
    if target_contrast == 0.0 {
        return BurnModel::new(0.0, hole_depth_cap);
    }
    let (kappa, _) = solve_rising(
        |k| contrast(profile, spec, k, hole_depth_cap, window, ions),
        target_contrast,
        "contrast",
    )?;
    BurnModel::new(kappa, hole_depth_cap)
}

/// Burn strength and initial optical depth that leave a comb with both the
/// given contrast and the given background (trough) OD.
///
/// Burning is linear in the initial depth, so only the ratio of contrast to
/// background depends on `kappa`. That ratio is solved for on `profile`,
/// which sets the spectral shape; the returned factor rescales `profile` to
/// hit the absolute values.
pub fn calibrate_burn_background(
    profile: &InhomogeneousProfile,
    spec: &EnvelopeSpectrum,
    target_contrast: f64,
    target_background: f64,
    hole_depth_cap: f64,
    window: (f64, f64),
    ions: Option<&IonParameters>,
) -> Result<(BurnModel, f64)> {
    ensure_non_negative("target_contrast", target_contrast)?;
    if !(target_background > 0.0) {
        return Err(invalid("target_background", format!("must be > 0, got {target_background}")));
    }
    BurnModel::new(0.0, hole_depth_cap)?;
    let ratio = |k: f64| -> Result<f64> {
        Ok(match comb_metrics(profile, spec, k, hole_depth_cap, window, ions)? {
            Some((c, b)) if b > 0.0 => c / b,
            Some((_, _)) => f64::INFINITY,
            None => 0.0,
        })
    };
    let (kappa, _) = solve_rising(ratio, target_contrast / target_background, "contrast/background ratio")?;
    let (c, _) = comb_metrics(profile, spec, kappa, hole_depth_cap, window, ions)?
        .ok_or_else(|| Error::Invariant("calibrated burn left no comb".into()))?;
    Ok((BurnModel::new(kappa, hole_depth_cap)?, target_contrast / c))
}
