use crate::error::{ensure_positive, invalid, Error, Result};

/// Uniform detuning axis shared by profiles, spectra and transforms.
///
/// Sample `k` sits at detuning `(k - n/2)·df` relative to the line center, so
/// the grid is half-open: it contains `-span/2` but not `+span/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    span: f64,
    n_points: usize,
}

impl SpectralGrid {
    /// Default simulation window: 400 MHz over 2¹⁴ points (df ≈ 24.4 kHz).
    pub const DEFAULT_SPAN: f64 = 400e6;
    pub const DEFAULT_POINTS: usize = 1 << 14;

    pub fn new(span: f64, n_points: usize) -> Result<Self> {
        ensure_positive("span", span)?;
        if n_points < 2 {
            return Err(invalid("n_points", format!("must be >= 2, got {n_points}")));
        }
        if !n_points.is_power_of_two() {
            log::warn!("grid with {n_points} points is not a power of two; transforms will be slower");
        }
        Ok(Self { span, n_points })
    }

    /// Center frequency of the detuning axis. Always zero: detunings are
    /// measured from the line center.
    pub fn center_frequency(&self) -> f64 {
        0.0
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn df(&self) -> f64 {
        self.span / self.n_points as f64
    }

    /// Detuning of sample `k` in Hz.
    pub fn frequency(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points / 2) as f64) * self.df()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.frequency(k)).collect()
    }

    pub fn min_frequency(&self) -> f64 {
        self.frequency(0)
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequency(self.n_points - 1)
    }

    /// Sample interval of the conjugate time axis, `1 / span`.
    pub fn time_step(&self) -> f64 {
        1.0 / self.span
    }

    /// Length of the conjugate time window, `1 / df`.
    pub fn time_window(&self) -> f64 {
        1.0 / self.df()
    }

    /// Fractional sample position of `frequency`, or an error when it falls
    /// outside the grid.
    pub fn position(&self, frequency: f64) -> Result<f64> {
        let (low, high) = (self.min_frequency(), self.max_frequency());
        if !(frequency >= low && frequency <= high) {
            return Err(Error::OutOfGrid { frequency, low, high });
        }
        Ok(frequency / self.df() + (self.n_points / 2) as f64)
    }

    /// Index of the sample closest to `frequency`, clamped to the grid.
    pub fn nearest_index(&self, frequency: f64) -> usize {
        let pos = (frequency / self.df()).round() + (self.n_points / 2) as f64;
        pos.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub fn same_as(&self, other: &SpectralGrid) -> bool {
        self.n_points == other.n_points && self.span == other.span
    }

    pub(crate) fn check_same(&self, other: &SpectralGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{} points over {:e} Hz vs {} points over {:e} Hz",
                self.n_points, self.span, other.n_points, other.span
            )))
        }
    }
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self { span: Self::DEFAULT_SPAN, n_points: Self::DEFAULT_POINTS }
    }
}

/// Build a uniform grid of `n_points` samples covering `span` Hz.
pub fn make_grid(span: f64, n_points: usize) -> Result<SpectralGrid> {
    SpectralGrid::new(span, n_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_span_over_points() {
        let g = make_grid(400e6, 4096).unwrap();
        assert!((g.df() - 97_656.25).abs() < 1e-9);
    }

    #[test]
    fn two_point_grid_is_half_open() {
        let g = make_grid(200e6, 2).unwrap();
        assert_eq!(g.frequencies(), vec![-100e6, 0.0]);
    }

    #[test]
    fn hundred_megahertz_window() {
        let g = make_grid(100e6, 1024).unwrap();
        assert_eq!(g.min_frequency(), -50e6);
        assert!(g.max_frequency() < 50e6);
        assert!((g.span() - 100e6).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(make_grid(0.0, 16).is_err());
        assert!(make_grid(-1.0, 16).is_err());
        assert!(make_grid(1e6, 1).is_err());
        assert!(make_grid(f64::NAN, 16).is_err());
    }

    #[test]
    fn position_round_trips_frequency() {
        let g = make_grid(400e6, 1024).unwrap();
        for k in [0, 1, 511, 512, 1023] {
            assert!((g.position(g.frequency(k)).unwrap() - k as f64).abs() < 1e-9);
        }
        assert!(g.position(200e6).is_err());
    }
}
