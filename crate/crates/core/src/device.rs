//! Power and Rabi-frequency calibration of the waveguide device.

use std::f64::consts::PI;

use crate::error::{ensure_non_negative, ensure_positive, invalid, Result};

/// Effective mode area of the thin-film waveguide, m².
pub const DEFAULT_MODE_AREA: f64 = 0.07e-12;
/// Rabi frequency measured at the anchor power, rad/s.
pub const DEFAULT_ANCHOR_RABI: f64 = 4.49e7;
/// In-waveguide power of the anchor measurement, W.
pub const DEFAULT_ANCHOR_POWER: f64 = 1e-6;
/// Mode area of a typical ion-diffused waveguide, m². A placeholder chosen
/// to be a thousand times the thin-film area.
pub const DIFFUSED_MODE_AREA: f64 = 70e-12;

/// Coupling chain and Rabi calibration of a waveguide.
///
/// The calibration is anchored at one measured point: Rabi frequency
/// `anchor_rabi` at in-waveguide power `anchor_power` in a mode of area
/// `anchor_area`. Elsewhere `Ω ∝ √(P/A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceModel {
    pub mode_area: f64,
    pub length: f64,
    pub coupling_in: f64,
    pub coupling_out: f64,
    pub anchor_power: f64,
    pub anchor_rabi: f64,
    pub anchor_area: f64,
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self {
            mode_area: DEFAULT_MODE_AREA,
            length: 0.8e-3,
            coupling_in: 1e-3,
            coupling_out: 1e-3,
            anchor_power: DEFAULT_ANCHOR_POWER,
            anchor_rabi: DEFAULT_ANCHOR_RABI,
            anchor_area: DEFAULT_MODE_AREA,
        }
    }
}

impl DeviceModel {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("mode_area_m2", self.mode_area)?;
        ensure_positive("rabi_anchor_power_w", self.anchor_power)?;
        ensure_positive("rabi_anchor_rad_s", self.anchor_rabi)?;
        ensure_positive("anchor_area", self.anchor_area)?;
        ensure_non_negative("length_m", self.length)?;
        for (name, c) in [("coupling_in", self.coupling_in), ("coupling_out", self.coupling_out)] {
            if !(c > 0.0 && c <= 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1], got {c}")));
            }
        }
        Ok(())
    }

    /// Proportionality constant `c_r` in `Ω = c_r·√(P/A)`, rad/s per √(W/m²).
    pub fn rabi_calibration(&self) -> f64 {
        self.anchor_rabi / (self.anchor_power / self.anchor_area).sqrt()
    }

    pub fn in_waveguide_power(&self, input_power: f64) -> Result<f64> {
        ensure_non_negative("input_power", input_power)?;
        Ok(input_power * self.coupling_in)
    }

    /// Power reaching the detector for a given in-waveguide power.
    pub fn output_power(&self, power_in_waveguide: f64) -> Result<f64> {
        ensure_non_negative("power_in_waveguide", power_in_waveguide)?;
        Ok(power_in_waveguide * self.coupling_out)
    }

    /// Fiber-to-fiber transmission of the coupling chain.
    pub fn end_to_end_transmission(&self) -> f64 {
        self.coupling_in * self.coupling_out
    }

    /// Rabi frequency for an in-waveguide power, written relative to the
    /// anchor so that the anchor reproduces itself exactly.
    pub fn rabi_from_power(&self, power_in_waveguide: f64) -> Result<f64> {
        ensure_non_negative("power_in_waveguide", power_in_waveguide)?;
        Ok(self.anchor_rabi * ((power_in_waveguide / self.anchor_power) * (self.anchor_area / self.mode_area)).sqrt())
    }

    /// In-waveguide power needed for Rabi frequency `rabi`.
    pub fn power_for_rabi(&self, rabi: f64) -> Result<f64> {
        ensure_non_negative("rabi", rabi)?;
        let r = rabi / self.anchor_rabi;
        Ok(self.anchor_power * r * r * (self.mode_area / self.anchor_area))
    }
}

/// Power ratio `P_a/P_b` that gives equal Rabi frequencies in modes of area
/// `area_a` and `area_b`.
pub fn equal_rabi_power_ratio(area_a: f64, area_b: f64) -> Result<f64> {
    ensure_positive("area_a", area_a)?;
    ensure_positive("area_b", area_b)?;
    Ok(area_a / area_b)
}

/// Pulse area `Ω·duration` in radians.
pub fn pulse_area(rabi: f64, duration: f64) -> f64 {
    rabi * duration
}

/// Duration of a pulse of area `area` at Rabi frequency `rabi`.
pub fn duration_for_area(rabi: f64, area: f64) -> Result<f64> {
    ensure_positive("rabi", rabi)?;
    Ok(area / rabi)
}

/// π-pulse duration at Rabi frequency `rabi`.
pub fn pi_pulse_duration(rabi: f64) -> Result<f64> {
    duration_for_area(rabi, PI)
}

/// Cyclic frequency `Ω/2π` in Hz of an angular Rabi frequency.
pub fn rabi_cyclic_hz(rabi: f64) -> f64 {
    rabi / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_and_square_root_law() {
        let d = DeviceModel::default();
        assert_eq!(d.rabi_from_power(1e-6).unwrap(), 4.49e7);
        assert!((d.rabi_from_power(0.25e-6).unwrap() / 2.245e7 - 1.0).abs() < 1e-15);
        assert_eq!(d.rabi_from_power(0.0).unwrap(), 0.0);
        assert_eq!(d.rabi_from_power(4e-6).unwrap(), 2.0 * 4.49e7);
        let back = d.power_for_rabi(4.49e7).unwrap();
        assert!((back - 1e-6).abs() < 1e-21);
    }

    #[test]
    fn coupling_chain() {
        let d = DeviceModel::default();
        assert!((d.in_waveguide_power(1e-3).unwrap() - 1e-6).abs() < 1e-21);
        assert_eq!(d.in_waveguide_power(0.0).unwrap(), 0.0);
        assert!((d.end_to_end_transmission() - 1e-6).abs() < 1e-21);
        assert!(d.in_waveguide_power(-1.0).is_err());
        assert!(DeviceModel { coupling_in: 1.5, ..d }.validate().is_err());
        d.validate().unwrap();
    }

    #[test]
    fn mode_area_scaling() {
        assert_eq!(equal_rabi_power_ratio(1000.0, 1.0).unwrap(), 1000.0);
        assert_eq!(equal_rabi_power_ratio(2.0, 2.0).unwrap(), 1.0);
        assert!((equal_rabi_power_ratio(DEFAULT_MODE_AREA, DIFFUSED_MODE_AREA).unwrap() - 1e-3).abs() < 1e-18);
        let wide = DeviceModel { mode_area: DIFFUSED_MODE_AREA, ..DeviceModel::default() };
        let p = wide.power_for_rabi(4.49e7).unwrap();
        assert!((p / 1e-6 - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn pulse_areas() {
        let t = pi_pulse_duration(4.49e7).unwrap();
        assert!((t - 69.97e-9).abs() < 0.01e-9);
        assert!((pulse_area(4.49e7, t) - PI).abs() < 1e-15);
        assert!((rabi_cyclic_hz(4.49e7) - 7.146e6).abs() < 1e3);
    }
}
