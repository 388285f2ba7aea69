use std::fmt::Write as _;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::io::{csv_row, fmt_f64};

use super::peaks::{find_peaks, median, Peak};

/// One absorption line of a comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tooth {
    pub center: f64,
    /// Width at half prominence, Hz.
    pub fwhm: f64,
    pub peak_od: f64,
}

/// Metrics of a periodic absorption comb.
#[derive(Debug, Clone, PartialEq)]
pub struct CombAnalysis {
    /// Median distance between adjacent teeth, Hz.
    pub spacing: f64,
    pub teeth: Vec<Tooth>,
    /// `spacing / mean tooth FWHM`.
    pub finesse: f64,
    /// Mean peak OD minus mean trough OD.
    pub od_contrast: f64,
    /// Mean trough OD.
    pub background_od: f64,
}

impl CombAnalysis {
    pub fn mean_fwhm(&self) -> f64 {
        self.teeth.iter().map(|t| t.fwhm).sum::<f64>() / self.teeth.len() as f64
    }

    /// Per-tooth finesse, `spacing / fwhm`.
    pub fn tooth_finesse(&self) -> Vec<f64> {
        self.teeth.iter().map(|t| self.spacing / t.fwhm).collect()
    }

    /// Key-value block followed by `center_hz,fwhm_hz,peak_od` rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spacing_hz={}", fmt_f64(self.spacing));
        let _ = writeln!(out, "finesse={}", fmt_f64(self.finesse));
        let _ = writeln!(out, "od_contrast={}", fmt_f64(self.od_contrast));
        let _ = writeln!(out, "background_od={}", fmt_f64(self.background_od));
        let _ = writeln!(out, "mean_fwhm_hz={}", fmt_f64(self.mean_fwhm()));
        let _ = writeln!(out, "n_teeth={}", self.teeth.len());
        out.push_str("center_hz,fwhm_hz,peak_od\n");
        for t in &self.teeth {
            let _ = writeln!(out, "{}", csv_row(&[t.center, t.fwhm, t.peak_od]));
        }
        out
    }
}

/// Sub-sample position of a sharp peak from a parabola through its
/// neighbours; plateau centers are used as they are.
fn refined_center(freqs: &[f64], od: &[f64], peak: &Peak) -> f64 {
    let (s, e) = peak.plateau;
    if s != e {
        return 0.5 * (freqs[s] + freqs[e]);
    }
    let i = peak.index;
    let (a, b, c) = (od[i - 1], od[i], od[i + 1]);
    let curvature = a - 2.0 * b + c;
    let offset = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    freqs[i] + offset * (freqs[i + 1] - freqs[i - 1]) / 2.0
}

/// Linear-interpolated width of a peak at `level`, or `None` when either
/// side never drops below it.
fn width_at(freqs: &[f64], od: &[f64], peak: &Peak, level: f64) -> Option<f64> {
    let (s, e) = peak.plateau;
    let mut l = s;
    while od[l] >= level {
        if l == 0 {
            return None;
        }
        l -= 1;
    }
    let mut r = e;
    while od[r] >= level {
        r += 1;
        if r == od.len() {
            return None;
        }
    }
    let cross = |i: usize, j: usize| freqs[i] + (level - od[i]) / (od[j] - od[i]) * (freqs[j] - freqs[i]);
    Some(cross(r - 1, r) - cross(l, l + 1))
}

/// Measure spacing, tooth widths, finesse and contrast of an absorption comb
/// restricted to the detuning range `window`.
///
/// Teeth are local maxima with prominence of at least 10% of the peak-to-peak
/// variation in the window. Widths are taken at half prominence so a comb on
/// a background is measured from its troughs. Teeth whose half-prominence
/// crossing falls outside the window are dropped.
pub fn analyze_comb(frequencies: &[f64], od: &[f64], window: (f64, f64)) -> Result<CombAnalysis> {
    if frequencies.len() != od.len() {
        return Err(invalid("od", "must have one value per frequency"));
    }
    ensure_positive("window width", window.1 - window.0)?;
    let idx: Vec<usize> = (0..frequencies.len()).filter(|&i| frequencies[i] >= window.0 && frequencies[i] <= window.1).collect();
    if idx.len() < 5 {
        return Err(Error::NotAComb { found: 0 });
    }
    let (lo, hi) = (idx[0], idx[idx.len() - 1]);
    let freqs = &frequencies[lo..=hi];
    let vals = &od[lo..=hi];
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = max - min;
    if !(range > 0.0) {
        return Err(Error::NotAComb { found: 0 });
    }
    let peaks = find_peaks(vals, 0.1 * range);
    if peaks.len() < 3 {
        return Err(Error::NotAComb { found: peaks.len() });
    }
    let centers: Vec<f64> = peaks.iter().map(|p| refined_center(freqs, vals, p)).collect();
    let mut gaps: Vec<f64> = centers.windows(2).map(|w| w[1] - w[0]).collect();
    let spacing = median(&mut gaps);

    let troughs: Vec<f64> = peaks
        .windows(2)
        .map(|w| vals[w[0].index..=w[1].index].iter().cloned().fold(f64::INFINITY, f64::min))
        .collect();
    let background_od = troughs.iter().sum::<f64>() / troughs.len() as f64;

    let teeth: Vec<Tooth> = peaks
        .iter()
        .zip(&centers)
        .filter_map(|(p, &center)| {
            let peak_od = vals[p.index];
            width_at(freqs, vals, p, peak_od - 0.5 * p.prominence).map(|fwhm| Tooth { center, fwhm, peak_od })
        })
        .collect();
    if teeth.len() < 3 {
        return Err(Error::NotAComb { found: teeth.len() });
    }
    let mean_peak = teeth.iter().map(|t| t.peak_od).sum::<f64>() / teeth.len() as f64;
    let mean_fwhm = teeth.iter().map(|t| t.fwhm).sum::<f64>() / teeth.len() as f64;
    Ok(CombAnalysis {
        spacing,
        finesse: spacing / mean_fwhm,
        od_contrast: (mean_peak - background_od).max(0.0),
        background_od,
        teeth,
    })
}
