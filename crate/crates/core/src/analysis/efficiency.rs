use crate::error::{ensure_non_negative, invalid, Result};

/// Forward-recall efficiency of an ideal square-tooth comb:
/// `η = d̃²·exp(-d̃)·sinc²(π/F)·exp(-d₀)` with `d̃ = tooth_od/F`.
///
/// Serves as the reference the propagated store/recall result is checked
/// against.
pub fn afc_efficiency_analytic(tooth_od: f64, finesse: f64, background_od: f64) -> Result<f64> {
    ensure_non_negative("tooth_od", tooth_od)?;
    ensure_non_negative("background_od", background_od)?;
    if !(finesse > 1.0) || !finesse.is_finite() {
        return Err(invalid("finesse", format!("must be finite and > 1, got {finesse}")));
    }
    let d = tooth_od / finesse;
    let x = std::f64::consts::PI / finesse;
    let sinc = x.sin() / x;
    Ok(d * d * (-d).exp() * sinc * sinc * (-background_od).exp())
}
