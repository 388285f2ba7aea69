use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Coherence properties of the optical transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonParameters {
    t2: f64,
    t1: f64,
}

impl IonParameters {
    /// `t1` may be `f64::INFINITY` to disable population relaxation, and
    /// `t2` may be `f64::INFINITY` for ions without dephasing. The latter has
    /// zero homogeneous width and is rejected by the spectral routines.
    pub fn new(t2: f64, t1: f64) -> Result<Self> {
        if !(t2 > 0.0) {
            return Err(invalid("t2", format!("must be > 0, got {t2}")));
        }
        if t1.is_nan() || t1 < t2 / 2.0 {
            return Err(invalid("t1", format!("must be >= t2/2 = {:e} s, got {t1:e}", t2 / 2.0)));
        }
        Ok(Self { t2, t1 })
    }

    /// Coherence-limited ions without population decay.
    pub fn with_t2(t2: f64) -> Result<Self> {
        Self::new(t2, f64::INFINITY)
    }

    /// Optical coherence time in seconds.
    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Excited-state lifetime in seconds.
    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Homogeneous FWHM in Hz, `1/(π·T₂)`.
    pub fn gamma_h(&self) -> f64 {
        1.0 / (PI * self.t2)
    }
}
