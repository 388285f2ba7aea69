use rayon::prelude::*;

use crate::error::{ensure_positive, Result};
use crate::io::csv_row;
use crate::memory::{burn, calibrate_burn, calibrate_burn_background, input_trace, store_recall, BurnModel};
use crate::sequencer::{afc_burn_sequence, aom_filter, incoherent_power_spectrum, probe_pulse, BurnConfig, EnvelopeSpectrum};
use crate::spectral::{complex_depth, flat_profile, InhomogeneousProfile, IonParameters, SpectralGrid};

use super::comb::{analyze_comb, CombAnalysis};

/// Burn-then-store experiment repeated over storage times. For each storage
/// time `T` the burn train uses pair separation `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageSweep {
    pub grid: SpectralGrid,
    pub ions: IonParameters,
    /// Optical depth of the unburned medium. Ignored when
    /// `target_background_od` is set.
    pub initial_od: f64,
    /// Choose the initial depth so that the calibrated comb has this trough
    /// OD.
    pub target_background_od: Option<f64>,
    /// Calibrate once at this pair separation and burn every point with the
    /// same strength, as a fixed burn power would. `None` recalibrates each
    /// point to the target contrast.
    pub reference_time: Option<f64>,
    pub length: f64,
    /// Burn train template; its pair separation is overridden per point.
    pub burn: BurnConfig,
    /// Pulses further apart than this add incoherently in the burn spectrum.
    pub coherence_gap: f64,
    /// Optional AOM power FWHM applied to the burn spectrum.
    pub aom_bandwidth: Option<f64>,
    pub target_contrast: f64,
    pub hole_depth_cap: f64,
    /// Detuning range used for calibration and comb metrics.
    pub analysis_window: (f64, f64),
    pub probe_duration: f64,
    pub probe_rabi: f64,
}

/// One row of a storage sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StoragePoint {
    pub storage_time: f64,
    pub efficiency: f64,
    pub echo_time: Option<f64>,
    pub transmitted_fraction: f64,
    pub kappa: f64,
    /// Optical depth of the medium before burning.
    pub initial_od: f64,
    /// Metrics of the smoothed absorption the probe sees.
    pub comb: CombAnalysis,
}

impl StorageSweep {
    /// Burn spectrum for pair separation `t`.
    pub fn burn_spectrum(&self, t: f64) -> Result<EnvelopeSpectrum> {
        let cfg = BurnConfig { pair_separation: t, ..self.burn };
        let seq = afc_burn_sequence(&cfg)?;
        let mut spec = incoherent_power_spectrum(&seq, &self.grid, self.coherence_gap)?;
        if let Some(bw) = self.aom_bandwidth {
            spec = aom_filter(&spec, bw, cfg.carrier_offset)?;
        }
        spec.homogeneously_broadened(self.ions.gamma_h())
    }

    /// Burn strength and initial depth calibrated on the comb burned with
    /// pair separation `t`.
    pub fn calibrate(&self, t: f64) -> Result<(BurnModel, f64)> {
        let spec = self.burn_spectrum(t)?;
        let ions = Some(&self.ions);
        let (window, cap) = (self.analysis_window, self.hole_depth_cap);
        match self.target_background_od {
            None => {
                let flat = flat_profile(self.grid, self.initial_od, self.length)?;
                Ok((calibrate_burn(&flat, &spec, self.target_contrast, cap, window, ions)?, self.initial_od))
            }
            Some(bg) => {
                let unit = flat_profile(self.grid, 1.0, self.length)?;
                calibrate_burn_background(&unit, &spec, self.target_contrast, bg, cap, window, ions)
            }
        }
    }

    /// Burn the flat medium with pair separation `t`, calibrated as
    /// configured. Returns the profile, the burn model and the initial depth.
    pub fn burned_profile(&self, t: f64) -> Result<(InhomogeneousProfile, BurnModel, f64)> {
        let (model, od) = self.calibrate(self.reference_time.unwrap_or(t))?;
        Ok((self.burn_with(t, &model, od)?, model, od))
    }

    fn burn_with(&self, t: f64, model: &BurnModel, initial_od: f64) -> Result<InhomogeneousProfile> {
        let flat = flat_profile(self.grid, initial_od, self.length)?;
        burn(&flat, &self.burn_spectrum(t)?, model)
    }

    /// Comb metrics of the smoothed absorption of `profile`.
    pub fn analyze(&self, profile: &InhomogeneousProfile) -> Result<CombAnalysis> {
        let od = complex_depth(profile, &self.ions)?.absorption();
        analyze_comb(&self.grid.frequencies(), &od, self.analysis_window)
    }

    /// Burn, analyze, store and recall at storage time `t`. `calibration`
    /// fixes the burn model and initial depth; `None` calibrates at `t`.
    pub fn point(&self, t: f64, calibration: Option<(BurnModel, f64)>) -> Result<StoragePoint> {
        ensure_positive("storage time", t)?;
        let (model, initial_od) = match calibration {
            Some(c) => c,
            None => self.calibrate(t)?,
        };
        let profile = self.burn_with(t, &model, initial_od)?;
        let comb = self.analyze(&profile)?;
        let input = input_trace(&probe_pulse(self.probe_duration, self.burn.carrier_offset, self.probe_rabi)?, &self.grid)?;
        let echo = store_recall(&profile, &self.ions, &input, Some(t))?;
        Ok(StoragePoint {
            storage_time: t,
            efficiency: echo.efficiency,
            echo_time: echo.echo_time,
            transmitted_fraction: echo.transmitted_fraction,
            kappa: model.kappa,
            initial_od,
            comb,
        })
    }
}

/// Run the full burn, calibrate, store and recall chain for every storage
/// time. Points are independent and evaluated in parallel; rows come back in
/// input order.
pub fn efficiency_vs_storage(sweep: &StorageSweep, storage_times: &[f64]) -> Result<Vec<StoragePoint>> {
    let calibration = match sweep.reference_time {
        Some(t) => Some(sweep.calibrate(t)?),
        None => None,
    };
    storage_times.par_iter().map(|&t| sweep.point(t, calibration)).collect()
}

/// `storage_time_s,efficiency,finesse,od_contrast` table.
pub fn efficiency_table(points: &[StoragePoint]) -> String {
    let mut out = String::from("storage_time_s,efficiency,finesse,od_contrast\n");
    for p in points {
        out.push_str(&csv_row(&[p.storage_time, p.efficiency, p.comb.finesse, p.comb.od_contrast]));
        out.push('\n');
    }
    out
}
