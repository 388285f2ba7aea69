use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("spectral grids do not match ({0})")]
    GridMismatch(String),

    #[error("pulses overlap: pulse starting at {next_start:e} s begins before the previous one ends at {prev_end:e} s")]
    Overlap { prev_end: f64, next_start: f64 },

    #[error("time step {dt:e} s is too coarse (must be <= {max:e} s)")]
    TimeStepTooCoarse { dt: f64, max: f64 },

    #[error("spectral grid too narrow: span {span:e} Hz must be >= {min:e} Hz")]
    GridTooNarrow { span: f64, min: f64 },

    #[error("trace of {duration:e} s does not fit the grid time window of {window:e} s; use a finer frequency step (more points)")]
    WrapAround { duration: f64, window: f64 },

    #[error("trace sample interval {trace_dt:e} s differs from the grid time step {grid_dt:e} s")]
    SampleRateMismatch { trace_dt: f64, grid_dt: f64 },

    #[error("frequency {frequency:e} Hz lies outside the grid [{low:e}, {high:e}] Hz")]
    OutOfGrid { frequency: f64, low: f64, high: f64 },

    #[error("not a comb: found {found} teeth in the analysis window (need at least 3)")]
    NotAComb { found: usize },

    #[error("target contrast {target} is unreachable; maximum achievable contrast is {max_achievable:.6}")]
    Unreachable { target: f64, max_achievable: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

/// Fails unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

/// Fails unless `value` is finite and non-negative.
pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
