use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::sequencer::Sequence;
use crate::spectral::{InhomogeneousProfile, IonParameters};
use crate::trace::FieldTrace;

/// Final states, emitted field and summed inversion of one chunk of classes.
type ChunkResult = (Vec<[f64; 3]>, Vec<Complex64>, Vec<f64>);

/// Classes integrated together by one worker. Fixed so that the reduction
/// order, and hence every bit of the result, is independent of thread count.
const CHUNK: usize = 32;

/// Substeps used to average the drive over one integration step.
const DRIVE_SUBSTEPS: usize = 8;

/// Bloch vectors of a set of detuning classes.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochEnsembleState {
    detunings: Vec<f64>,
    weights: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl BlochEnsembleState {
    /// All classes in the ground state. Weights are normalized to unit sum.
    pub fn ground(detunings: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if detunings.is_empty() {
            return Err(invalid("detunings", "need at least one class"));
        }
        if weights.len() != detunings.len() {
            return Err(invalid("weights", "must have one weight per detuning"));
        }
        if detunings.iter().chain(&weights).any(|v| !v.is_finite()) || weights.iter().any(|&w| w < 0.0) {
            return Err(invalid("weights", "detunings must be finite and weights finite and >= 0"));
        }
        let total: f64 = weights.iter().sum();
        ensure_positive("total weight", total)?;
        let n = detunings.len();
        Ok(Self {
            detunings,
            weights: weights.into_iter().map(|w| w / total).collect(),
            u: vec![0.0; n],
            v: vec![0.0; n],
            w: vec![-1.0; n],
        })
    }

    /// `n` equally weighted classes spread evenly over `±bandwidth/2`.
    pub fn uniform(bandwidth: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n_classes", "must be >= 1"));
        }
        let detunings = if n == 1 {
            vec![0.0]
        } else {
            ensure_positive("bandwidth", bandwidth)?;
            (0..n).map(|k| -bandwidth / 2.0 + bandwidth * k as f64 / (n - 1) as f64).collect()
        };
        Self::ground(detunings, vec![1.0; n])
    }

    /// One class per grid sample inside `±bandwidth/2`, weighted by the
    /// profile's optical depth.
    pub fn from_profile(profile: &InhomogeneousProfile, bandwidth: f64) -> Result<Self> {
        ensure_positive("bandwidth", bandwidth)?;
        let grid = profile.grid();
        let (d, w): (Vec<f64>, Vec<f64>) = (0..grid.len())
            .map(|k| (grid.frequency(k), profile.od_density()[k]))
            .filter(|(f, _)| f.abs() <= bandwidth / 2.0)
            .unzip();
        Self::ground(d, w)
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Bloch-vector length of every class.
    pub fn norms(&self) -> Vec<f64> {
        (0..self.len()).map(|k| (self.u[k].powi(2) + self.v[k].powi(2) + self.w[k].powi(2)).sqrt()).collect()
    }

    /// Weighted coherence, `-i·Σ weight·(u + i·v)`.
    pub fn emitted_field(&self) -> Complex64 {
        (0..self.len()).map(|k| self.weights[k] * Complex64::new(self.v[k], -self.u[k])).sum()
    }
}

/// Output of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub state: BlochEnsembleState,
    /// Emitted field at every step boundary, starting at `t = 0`.
    pub emitted: FieldTrace,
    /// Weighted mean population inversion at the same instants.
    pub mean_w: Vec<f64>,
}

/// Largest step [`evolve`] accepts for this drive and class set.
pub fn max_time_step(state: &BlochEnsembleState, seq: &Sequence, ions: &IonParameters) -> f64 {
    let omega = seq.max_rabi();
    let delta = state.detunings.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let general = (omega * omega + (2.0 * PI * delta).powi(2)).sqrt();
    let rabi_limit = if general > 0.0 { 1.0 / (10.0 * general) } else { f64::INFINITY };
    rabi_limit.min(ions.t2() / 100.0)
}

#[derive(Clone, Copy)]
struct Rates {
    omega_r: f64,
    omega_i: f64,
    delta: f64,
    g2: f64,
    g1: f64,
}

#[inline]
fn derivative(r: &Rates, [u, v, w]: [f64; 3]) -> [f64; 3] {
    [
        -r.delta * v - r.omega_i * w - r.g2 * u,
        r.delta * u + r.omega_r * w - r.g2 * v,
        -r.omega_r * v + r.omega_i * u - r.g1 * (w + 1.0),
    ]
}

#[inline]
fn rk4_step(r: &Rates, x: [f64; 3], dt: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = derivative(r, x);
    let k2 = derivative(r, add(x, k1, dt / 2.0));
    let k3 = derivative(r, add(x, k2, dt / 2.0));
    let k4 = derivative(r, add(x, k3, dt));
    [
        x[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        x[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Integrate the optical Bloch equations of every class from `t = 0` to
/// `t_end` with fixed-step fourth-order Runge-Kutta.
///
/// Per class, with `Ω = Ω_r + i·Ω_i`:
/// `u' = -2πδ·v - Ω_i·w - u/T₂`, `v' = 2πδ·u + Ω_r·w - v/T₂`,
/// `w' = -Ω_r·v + Ω_i·u - (w + 1)/T₁`.
/// The drive is averaged over each step, so square pulses whose edges fall
/// on step boundaries are integrated without edge error.
pub fn evolve(state: &BlochEnsembleState, seq: &Sequence, ions: &IonParameters, dt: f64, t_end: f64) -> Result<Evolution> {
    ensure_positive("dt", dt)?;
    ensure_positive("t_end", t_end)?;
    if state.is_empty() {
        return Err(invalid("state", "empty detuning set"));
    }
    let max = max_time_step(state, seq, ions);
    if dt > max * (1.0 + 1e-9) {
        return Err(Error::TimeStepTooCoarse { dt, max });
    }
    let steps = (t_end / dt - 1e-9).ceil() as usize;
    let drive: Vec<Complex64> = (0..steps)
        .map(|n| {
            let t0 = n as f64 * dt;
            (0..DRIVE_SUBSTEPS)
                .map(|j| seq.rabi_at(t0 + (j as f64 + 0.5) * dt / DRIVE_SUBSTEPS as f64))
                .sum::<Complex64>()
                / DRIVE_SUBSTEPS as f64
        })
        .collect();
    let g2 = 1.0 / ions.t2();
    let g1 = 1.0 / ions.t1();

    let indices: Vec<usize> = (0..state.len()).collect();
    let partials: Vec<ChunkResult> = indices
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut xs: Vec<[f64; 3]> = chunk.iter().map(|&k| [state.u[k], state.v[k], state.w[k]]).collect();
            let mut field = Vec::with_capacity(steps + 1);
            let mut inversion = Vec::with_capacity(steps + 1);
            let record = |xs: &[[f64; 3]], field: &mut Vec<Complex64>, inversion: &mut Vec<f64>| {
                let mut e = Complex64::new(0.0, 0.0);
                let mut w = 0.0;
                for (x, &k) in xs.iter().zip(chunk) {
                    e += state.weights[k] * Complex64::new(x[1], -x[0]);
                    w += state.weights[k] * x[2];
                }
                field.push(e);
                inversion.push(w);
            };
            record(&xs, &mut field, &mut inversion);
            for om in &drive {
                for (x, &k) in xs.iter_mut().zip(chunk) {
                    let rates = Rates { omega_r: om.re, omega_i: om.im, delta: 2.0 * PI * state.detunings[k], g2, g1 };
                    *x = rk4_step(&rates, *x, dt);
                }
                record(&xs, &mut field, &mut inversion);
            }
            (xs, field, inversion)
        })
        .collect();

    let mut out = state.clone();
    let mut field = vec![Complex64::new(0.0, 0.0); steps + 1];
    let mut mean_w = vec![0.0; steps + 1];
    for (chunk, (xs, f, w)) in indices.chunks(CHUNK).zip(&partials) {
        for (&k, x) in chunk.iter().zip(xs) {
            out.u[k] = x[0];
            out.v[k] = x[1];
            out.w[k] = x[2];
        }
        for (acc, v) in field.iter_mut().zip(f) {
            *acc += v;
        }
        for (acc, v) in mean_w.iter_mut().zip(w) {
            *acc += v;
        }
    }
    Ok(Evolution { state: out, emitted: FieldTrace::new(dt, 0.0, field)?, mean_w })
}
