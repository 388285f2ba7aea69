use std::f64::consts::LN_2;
use std::fmt::Write as _;

use crate::error::{ensure_non_negative, ensure_positive, invalid, Error, Result};
use crate::io::fmt_f64;

use super::grid::SpectralGrid;

/// Optical depth per grid sample. This is the memory state that hole burning
/// sculpts.
#[derive(Debug, Clone, PartialEq)]
pub struct InhomogeneousProfile {
    grid: SpectralGrid,
    od_density: Vec<f64>,
    length: f64,
}

/// Tooth shapes for synthetic combs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToothShape {
    /// Rectangular teeth. Edge samples take the covered fraction of the bin.
    Square,
    Gaussian,
    Lorentzian,
}

/// Parameters of a synthetic periodic comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSpec {
    /// Tooth period in Hz.
    pub spacing: f64,
    /// Tooth full width at half maximum in Hz.
    pub fwhm: f64,
    /// Optical depth of a tooth above the background.
    pub tooth_od: f64,
    /// Optical depth between teeth.
    pub background_od: f64,
    pub shape: ToothShape,
    /// Detuning of the tooth nearest the line center.
    pub offset: f64,
}

impl CombSpec {
    pub fn square(spacing: f64, fwhm: f64, tooth_od: f64, background_od: f64) -> Self {
        Self { spacing, fwhm, tooth_od, background_od, shape: ToothShape::Square, offset: 0.0 }
    }

    pub fn finesse(&self) -> f64 {
        self.spacing / self.fwhm
    }

    fn validate(&self) -> Result<()> {
        ensure_positive("spacing", self.spacing)?;
        ensure_positive("fwhm", self.fwhm)?;
        ensure_non_negative("tooth_od", self.tooth_od)?;
        ensure_non_negative("background_od", self.background_od)?;
        if !self.offset.is_finite() {
            return Err(invalid("offset", "must be finite"));
        }
        if self.shape == ToothShape::Square && self.fwhm >= self.spacing {
            return Err(invalid("fwhm", "square teeth must be narrower than the spacing"));
        }
        Ok(())
    }

    /// Tooth value (above background) for a sample bin centered at `f`.
    fn tooth(&self, f: f64, df: f64) -> f64 {
        let period = self.spacing;
        let x = f - self.offset;
        let dist = x - (x / period).round() * period;
        match self.shape {
            ToothShape::Square => {
                let half = self.fwhm / 2.0;
                let lo = (dist - df / 2.0).max(-half);
                let hi = (dist + df / 2.0).min(half);
                self.tooth_od * ((hi - lo) / df).clamp(0.0, 1.0)
            }
            ToothShape::Gaussian => {
                let sigma = self.fwhm / (2.0 * (2.0 * LN_2).sqrt());
                // Sum the nearest teeth so the profile stays periodic.
                (-3..=3)
                    .map(|m| {
                        let d = dist + m as f64 * period;
                        (-d * d / (2.0 * sigma * sigma)).exp()
                    })
                    .sum::<f64>()
                    * self.tooth_od
            }
            ToothShape::Lorentzian => {
                let hw = self.fwhm / 2.0;
                (-50..=50)
                    .map(|m| {
                        let d = dist + m as f64 * period;
                        hw * hw / (d * d + hw * hw)
                    })
                    .sum::<f64>()
                    * self.tooth_od
            }
        }
    }
}

impl InhomogeneousProfile {
    pub fn new(grid: SpectralGrid, od_density: Vec<f64>, length: f64) -> Result<Self> {
        if od_density.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} optical-depth values for a {}-point grid",
                od_density.len(),
                grid.len()
            )));
        }
        ensure_non_negative("length", length)?;
        if let Some(bad) = od_density.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid("od_density", format!("values must be finite and >= 0, found {bad}")));
        }
        Ok(Self { grid, od_density, length })
    }

    /// Synthetic periodic comb sampled on `grid`.
    pub fn comb(grid: SpectralGrid, spec: &CombSpec, length: f64) -> Result<Self> {
        spec.validate()?;
        let df = grid.df();
        let od = grid
            .frequencies()
            .into_iter()
            .map(|f| spec.background_od + spec.tooth(f, df))
            .collect();
        Self::new(grid, od, length)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn od_density(&self) -> &[f64] {
        &self.od_density
    }

    /// Physical medium length in meters (bookkeeping only).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// `a·self + b·other`; the coefficients must keep every sample non-negative.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let od = self.od_density.iter().zip(&other.od_density).map(|(x, y)| a * x + b * y).collect();
        Self::new(self.grid, od, self.length)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid, self.od_density.iter().map(|v| v * factor).collect(), self.length)
    }

    /// Serialize to the columnar text format: three `#` header lines followed
    /// by one `detuning_hz,od` row per sample, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(48 * self.od_density.len() + 96);
        let _ = writeln!(out, "# span_hz={}", fmt_f64(self.grid.span()));
        let _ = writeln!(out, "# n_points={}", self.grid.len());
        let _ = writeln!(out, "# length_m={}", fmt_f64(self.length));
        out.push_str("detuning_hz,od\n");
        for (k, od) in self.od_density.iter().enumerate() {
            let _ = writeln!(out, "{},{}", fmt_f64(self.grid.frequency(k)), fmt_f64(*od));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut span = None;
        let mut n_points = None;
        let mut length = None;
        let mut od = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if let Some((key, value)) = header.trim().split_once('=') {
                    let value = value.trim();
                    match key.trim() {
                        "span_hz" => span = Some(parse_f64(value, lineno)?),
                        "n_points" => {
                            n_points = Some(value.parse::<usize>().map_err(|e| Error::Parse {
                                line: lineno,
                                reason: format!("n_points: {e}"),
                            })?)
                        }
                        "length_m" => length = Some(parse_f64(value, lineno)?),
                        _ => {}
                    }
                }
                continue;
            }
            if line.starts_with("detuning_hz") {
                continue;
            }
            let (_, value) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: lineno,
                reason: "expected `detuning_hz,od`".into(),
            })?;
            od.push(parse_f64(value.trim(), lineno)?);
        }
        let missing = |what: &str| Error::Parse { line: 0, reason: format!("missing `{what}` header") };
        let grid = SpectralGrid::new(
            span.ok_or_else(|| missing("span_hz"))?,
            n_points.ok_or_else(|| missing("n_points"))?,
        )?;
        Self::new(grid, od, length.ok_or_else(|| missing("length_m"))?)
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value.parse::<f64>().map_err(|e| Error::Parse { line, reason: format!("`{value}`: {e}") })
}

/// Profile with the same optical depth `od` at every sample.
pub fn flat_profile(grid: SpectralGrid, od: f64, length: f64) -> Result<InhomogeneousProfile> {
    ensure_non_negative("od", od)?;
    InhomogeneousProfile::new(grid, vec![od; grid.len()], length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn flat_profiles() {
        let g = make_grid(100e6, 256).unwrap();
        let p = flat_profile(g, 1.0, 0.8e-3).unwrap();
        assert!(p.od_density().iter().all(|&v| v == 1.0));
        assert_eq!(p.length(), 0.8e-3);
        assert!(flat_profile(g, 0.0, 0.8e-3).unwrap().od_density().iter().all(|&v| v == 0.0));
        assert!(flat_profile(g, 2.5, 0.8e-3).unwrap().od_density().iter().all(|&v| v == 2.5));
        assert!(flat_profile(g, -0.1, 0.8e-3).is_err());
    }

    #[test]
    fn rejects_negative_or_nan_samples() {
        let g = make_grid(1e6, 4).unwrap();
        assert!(InhomogeneousProfile::new(g, vec![0.0, -1e-3, 0.0, 0.0], 0.0).is_err());
        assert!(InhomogeneousProfile::new(g, vec![0.0, f64::NAN, 0.0, 0.0], 0.0).is_err());
        assert!(InhomogeneousProfile::new(g, vec![0.0; 3], 0.0).is_err());
    }

    #[test]
    fn square_comb_tooth_area() {
        let g = make_grid(100e6, 1 << 14).unwrap();
        let spec = CombSpec::square(6.3e6, 3.7e6, 0.5, 0.1);
        let p = InhomogeneousProfile::comb(g, &spec, 0.0).unwrap();
        // Mean optical depth of one period: background + tooth·(width/spacing).
        let period_samples = (6.3e6 / g.df()).round() as usize * 5;
        let mean: f64 = p.od_density()[..period_samples].iter().sum::<f64>() / period_samples as f64;
        assert!((mean - (0.1 + 0.5 * 3.7 / 6.3)).abs() < 5e-3, "{mean}");
        assert_eq!(p.od_density()[g.len() / 2], 0.6);
    }

    #[test]
    fn text_format_has_headers() {
        let g = make_grid(200e6, 2).unwrap();
        let text = flat_profile(g, 1.0, 8e-4).unwrap().to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# span_hz=2.0000000000000000e8");
        assert_eq!(lines.next().unwrap(), "# n_points=2");
        assert!(lines.next().unwrap().starts_with("# length_m=8.0000000000000"));
        assert_eq!(lines.next().unwrap(), "detuning_hz,od");
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn text_parse_errors() {
        assert!(InhomogeneousProfile::from_text("# n_points=2\n# length_m=0\n0,1\n1,1\n").is_err());
        assert!(InhomogeneousProfile::from_text("# span_hz=1e6\n# n_points=2\n# length_m=0\n0,x\n1,1\n").is_err());
        assert!(InhomogeneousProfile::from_text("# span_hz=1e6\n# n_points=3\n# length_m=0\n0,1\n1,1\n").is_err());
    }
}
