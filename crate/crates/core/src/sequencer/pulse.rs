use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{ensure_non_negative, ensure_positive, invalid, Error, Result};
use crate::io::fmt_f64;

/// Default edge time of [`PulseShape::SquareWithRise`].
pub const DEFAULT_RISE_TIME: f64 = 2e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    Square,
    /// Flat top with raised-cosine edges of the given duration.
    SquareWithRise { rise_time: f64 },
}

impl PulseShape {
    /// Normalized amplitude at time `tau` after the pulse start.
    fn value(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            PulseShape::Square => 1.0,
            PulseShape::SquareWithRise { rise_time } => {
                let edge = tau.min(duration - tau);
                if edge >= rise_time {
                    1.0
                } else {
                    0.5 * (1.0 - (PI * edge.max(0.0) / rise_time).cos())
                }
            }
        }
    }

    /// Fourier transform `∫₀ᴰ s(τ)·exp(-2πiντ) dτ` of the unit-height shape.
    fn transform(&self, nu: f64, duration: f64) -> Complex64 {
        match *self {
            PulseShape::Square => rect_transform(nu, duration),
            PulseShape::SquareWithRise { rise_time } => {
                // A flat top of width D - r convolved with a half-sine bump of
                // width r and unit area reproduces the raised-cosine edges.
                rect_transform(nu, duration - rise_time) * half_sine_transform(nu, rise_time)
            }
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn rect_transform(nu: f64, width: f64) -> Complex64 {
    Complex64::from_polar(width * sinc(PI * nu * width), -PI * nu * width)
}

/// Transform of `(π/2r)·sin(πt/r)` on `[0, r]`.
fn half_sine_transform(nu: f64, r: f64) -> Complex64 {
    let a = PI / r;
    let b = 2.0 * PI * nu;
    let denom = a * a - b * b;
    if denom.abs() < 1e-9 * a * a {
        // Removable singularity at b = ±a.
        return Complex64::new(0.0, -PI / 4.0 * b.signum());
    }
    let phase = Complex64::from_polar(1.0, -b * r);
    (Complex64::new(1.0, 0.0) + phase) * (a * a / 2.0 / denom)
}

/// A single drive pulse of the complex baseband envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub t_start: f64,
    pub duration: f64,
    /// Rabi frequency at the pulse top, rad/s.
    pub peak_rabi: f64,
    /// Frequency offset from line center, Hz.
    pub carrier_offset: f64,
    pub phase: f64,
    pub shape: PulseShape,
}

impl Pulse {
    pub fn square(t_start: f64, duration: f64, peak_rabi: f64) -> Self {
        Self { t_start, duration, peak_rabi, carrier_offset: 0.0, phase: 0.0, shape: PulseShape::Square }
    }

    pub fn end(&self) -> f64 {
        self.t_start + self.duration
    }

    /// Pulse area `Ω·duration` for a square pulse; edges reduce it for
    /// shaped pulses.
    pub fn area(&self) -> f64 {
        match self.shape {
            PulseShape::Square => self.peak_rabi * self.duration,
            PulseShape::SquareWithRise { rise_time } => self.peak_rabi * (self.duration - rise_time),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("duration", self.duration)?;
        ensure_non_negative("peak_rabi", self.peak_rabi)?;
        for (name, v) in [("t_start", self.t_start), ("carrier_offset", self.carrier_offset), ("phase", self.phase)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if let PulseShape::SquareWithRise { rise_time } = self.shape {
            ensure_positive("rise_time", rise_time)?;
            if rise_time >= self.duration / 2.0 {
                return Err(invalid("rise_time", "must be shorter than half the pulse duration"));
            }
        }
        Ok(())
    }

    /// Complex Rabi frequency at absolute time `t`. The carrier rotation
    /// `exp(2πi·f·t)` is referenced to absolute time, so consecutive pulses at
    /// different offsets form one continuous piecewise-rotating envelope.
    pub fn value_at(&self, t: f64) -> Complex64 {
        let tau = t - self.t_start;
        let eps = 1e-9 * self.duration;
        if tau < -eps || tau >= self.duration - eps {
            return Complex64::new(0.0, 0.0);
        }
        let amp = self.peak_rabi * self.shape.value(tau.max(0.0), self.duration);
        Complex64::from_polar(amp, self.phase + 2.0 * PI * self.carrier_offset * t)
    }

    /// Continuous Fourier transform `∫ Ω(t)·exp(-2πift) dt` at frequency `f`.
    pub fn spectrum_at(&self, f: f64) -> Complex64 {
        let nu = f - self.carrier_offset;
        let shift = Complex64::from_polar(self.peak_rabi, self.phase - 2.0 * PI * f * self.t_start)
            * Complex64::from_polar(1.0, 2.0 * PI * self.carrier_offset * self.t_start);
        shift * self.shape.transform(nu, self.duration)
    }

    /// Energy-like integral `∫|Ω(t)|² dt`.
    pub fn energy(&self) -> f64 {
        let flat = match self.shape {
            PulseShape::Square => self.duration,
            // Each raised-cosine edge contributes 3r/8.
            PulseShape::SquareWithRise { rise_time } => self.duration - 2.0 * rise_time + 0.75 * rise_time,
        };
        self.peak_rabi * self.peak_rabi * flat
    }

    fn shape_fields(&self) -> (String, Option<f64>) {
        match self.shape {
            PulseShape::Square => ("square".into(), None),
            PulseShape::SquareWithRise { rise_time } => ("square_with_rise".into(), Some(rise_time)),
        }
    }
}

/// Ordered, non-overlapping list of pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pulses: Vec<Pulse>,
    t_end: f64,
}

impl Sequence {
    pub fn new(pulses: Vec<Pulse>, t_end: f64) -> Result<Self> {
        for p in &pulses {
            p.validate()?;
        }
        for w in pulses.windows(2) {
            let tol = 1e-12 * w[0].duration.max(w[1].duration);
            if w[1].t_start + tol < w[0].end() {
                return Err(Error::Overlap { prev_end: w[0].end(), next_start: w[1].t_start });
            }
        }
        let last_end = pulses.last().map_or(0.0, Pulse::end);
        if !(t_end >= last_end - 1e-15) {
            return Err(invalid("t_end", format!("must be >= last pulse end {last_end:e} s")));
        }
        Ok(Self { pulses, t_end })
    }

    /// Sequence ending with its last pulse.
    pub fn from_pulses(pulses: Vec<Pulse>) -> Result<Self> {
        let t_end = pulses.last().map_or(0.0, Pulse::end);
        Self::new(pulses, t_end)
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn min_duration(&self) -> Option<f64> {
        self.pulses.iter().map(|p| p.duration).reduce(f64::min)
    }

    pub fn max_rabi(&self) -> f64 {
        self.pulses.iter().map(|p| p.peak_rabi).fold(0.0, f64::max)
    }

    /// Complex Rabi frequency at time `t`.
    pub fn rabi_at(&self, t: f64) -> Complex64 {
        // Last pulse starting at or before t (with a little slack for edges).
        let idx = self.pulses.partition_point(|p| p.t_start <= t + 1e-9 * p.duration);
        if idx == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.pulses[idx - 1].value_at(t)
    }

    /// Sample the envelope at `t0 + n·dt` for `n < len`, without any step-size
    /// check.
    pub fn sample(&self, dt: f64, t0: f64, len: usize) -> Vec<Complex64> {
        (0..len).map(|n| self.rabi_at(t0 + n as f64 * dt)).collect()
    }

    /// Every pulse moved by `delay`.
    pub fn shifted(&self, delay: f64) -> Result<Self> {
        let pulses = self.pulses.iter().map(|p| Pulse { t_start: p.t_start + delay, ..*p }).collect();
        Self::new(pulses, self.t_end + delay)
    }

    /// Every pulse amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let pulses = self.pulses.iter().map(|p| Pulse { peak_rabi: p.peak_rabi * factor, ..*p }).collect();
        Self::new(pulses, self.t_end)
    }

    /// `∫|Ω(t)|² dt` over the whole sequence.
    pub fn energy(&self) -> f64 {
        self.pulses.iter().map(Pulse::energy).sum()
    }

    /// Split into runs of pulses whose mutual gaps are shorter than
    /// `coherence_gap`.
    pub fn coherent_segments(&self, coherence_gap: f64) -> Vec<&[Pulse]> {
        let mut segments = Vec::new();
        let mut start = 0;
        for i in 1..self.pulses.len() {
            if self.pulses[i].t_start - self.pulses[i - 1].end() >= coherence_gap {
                segments.push(&self.pulses[start..i]);
                start = i;
            }
        }
        if !self.pulses.is_empty() {
            segments.push(&self.pulses[start..]);
        }
        segments
    }

    /// Pulse-per-line text: `t_start_s,duration_s,peak_rabi_rad_s,carrier_offset_hz,phase_rad,shape[,rise_s]`.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "# t_end_s={}", fmt_f64(self.t_end));
        out.push_str("# t_start_s,duration_s,peak_rabi_rad_s,carrier_offset_hz,phase_rad,shape[,rise_s]\n");
        for p in &self.pulses {
            let (shape, rise) = p.shape_fields();
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(p.t_start),
                fmt_f64(p.duration),
                fmt_f64(p.peak_rabi),
                fmt_f64(p.carrier_offset),
                fmt_f64(p.phase),
                shape
            );
            if let Some(r) = rise {
                let _ = write!(out, ",{}", fmt_f64(r));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut pulses = Vec::new();
        let mut t_end = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            let err = |reason: String| Error::Parse { line: lineno, reason };
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                if let Some(v) = h.trim().strip_prefix("t_end_s=") {
                    t_end = Some(v.trim().parse::<f64>().map_err(|e| err(format!("t_end_s: {e}")))?);
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 6 {
                return Err(err(format!("expected at least 6 fields, got {}", fields.len())));
            }
            let num = |k: usize| fields[k].parse::<f64>().map_err(|e| err(format!("field {}: {e}", k + 1)));
            let shape = match (fields[5], fields.get(6)) {
                ("square", None) => PulseShape::Square,
                ("square_with_rise", Some(r)) => PulseShape::SquareWithRise {
                    rise_time: r.parse::<f64>().map_err(|e| err(format!("rise_s: {e}")))?,
                },
                ("square_with_rise", None) => PulseShape::SquareWithRise { rise_time: DEFAULT_RISE_TIME },
                (other, _) => return Err(err(format!("unknown shape `{other}`"))),
            };
            pulses.push(Pulse {
                t_start: num(0)?,
                duration: num(1)?,
                peak_rabi: num(2)?,
                carrier_offset: num(3)?,
                phase: num(4)?,
                shape,
            });
        }
        match t_end {
            Some(t) => Self::new(pulses, t),
            None => Self::from_pulses(pulses),
        }
    }
}
