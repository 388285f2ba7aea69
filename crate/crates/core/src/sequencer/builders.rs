use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_positive, invalid, Error, Result};
use crate::trace::FieldTrace;

use super::pulse::{Pulse, PulseShape, Sequence};

/// Phase relation between successive pulse pairs of a burn train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterPairPhase {
    #[default]
    Coherent,
    /// Each pair gets an independent uniform phase drawn from a seeded RNG.
    Randomized { seed: u64 },
}

/// Pulse-pair train that burns a comb with tooth spacing `1/pair_separation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurnConfig {
    /// Start-to-start delay `T` within a pair; sets the storage time.
    pub pair_separation: f64,
    pub pulse_duration: f64,
    pub n_pairs: usize,
    /// Start-to-start delay between successive pairs.
    pub pair_wait: f64,
    /// Rabi frequency at the pulse top, rad/s.
    pub peak_rabi: f64,
    pub carrier_offset: f64,
    pub shape: PulseShape,
    pub inter_pair_phase: InterPairPhase,
}

impl BurnConfig {
    /// 150 pairs of 10 ns pulses repeated every 3 µs.
    pub fn new(pair_separation: f64, peak_rabi: f64) -> Self {
        Self {
            pair_separation,
            pulse_duration: 10e-9,
            n_pairs: 150,
            pair_wait: 3e-6,
            peak_rabi,
            carrier_offset: 0.0,
            shape: PulseShape::Square,
            inter_pair_phase: InterPairPhase::Coherent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("pair_separation", self.pair_separation)?;
        ensure_positive("pulse_duration", self.pulse_duration)?;
        ensure_positive("pair_wait", self.pair_wait)?;
        if self.n_pairs == 0 {
            return Err(invalid("n_pairs", "must be >= 1"));
        }
        if self.pair_separation < self.pulse_duration {
            return Err(Error::Overlap { prev_end: self.pulse_duration, next_start: self.pair_separation });
        }
        if self.n_pairs > 1 && self.pair_wait < self.pair_separation + self.pulse_duration {
            return Err(Error::Overlap {
                prev_end: self.pair_separation + self.pulse_duration,
                next_start: self.pair_wait,
            });
        }
        if self.pair_wait < 10.0 * self.pair_separation {
            log::warn!(
                "pair wait {:e} s is under ten pair separations; successive pairs may interfere in the medium",
                self.pair_wait
            );
        }
        Ok(())
    }
}

/// Build the burn train: pair `k` has pulses at `k·pair_wait` and
/// `k·pair_wait + T`.
pub fn afc_burn_sequence(cfg: &BurnConfig) -> Result<Sequence> {
    cfg.validate()?;
    let mut rng = match cfg.inter_pair_phase {
        InterPairPhase::Randomized { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        InterPairPhase::Coherent => None,
    };
    let mut pulses = Vec::with_capacity(2 * cfg.n_pairs);
    for k in 0..cfg.n_pairs {
        let phase = rng.as_mut().map_or(0.0, |r| r.random_range(0.0..2.0 * PI));
        let start = k as f64 * cfg.pair_wait;
        for t in [start, start + cfg.pair_separation] {
            pulses.push(Pulse {
                t_start: t,
                duration: cfg.pulse_duration,
                peak_rabi: cfg.peak_rabi,
                carrier_offset: cfg.carrier_offset,
                phase,
                shape: cfg.shape,
            });
        }
    }
    let t_end = (cfg.n_pairs - 1) as f64 * cfg.pair_wait + cfg.pair_separation + cfg.pulse_duration;
    Sequence::new(pulses, t_end.max(cfg.n_pairs as f64 * cfg.pair_wait))
}

/// Two-pulse photon-echo sequence: a pulse of length `t1` at zero and one of
/// length `t2` starting at `tau`.
pub fn echo_sequence(t1: f64, t2: f64, tau: f64, omega: f64) -> Result<Sequence> {
    ensure_positive("t1", t1)?;
    ensure_positive("t2", t2)?;
    ensure_positive("tau", tau)?;
    if tau <= t1 + t2 {
        return Err(Error::Overlap { prev_end: t1, next_start: tau });
    }
    Sequence::from_pulses(vec![Pulse::square(0.0, t1, omega), Pulse::square(tau, t2, omega)])
}

/// Single weak probe pulse at zero.
pub fn probe_pulse(duration: f64, carrier_offset: f64, rabi: f64) -> Result<Sequence> {
    let p = Pulse { carrier_offset, ..Pulse::square(0.0, duration, rabi) };
    Sequence::from_pulses(vec![p])
}

/// Rabi frequency of a pulse whose power is attenuated by `power_ratio`
/// (Ω scales with the square root of power).
pub fn attenuated_rabi(rabi: f64, power_ratio: f64) -> f64 {
    rabi * power_ratio.sqrt()
}

/// Sample the complex envelope from zero to the sequence end. The step must
/// resolve every pulse with at least ten samples.
pub fn envelope(seq: &Sequence, dt: f64) -> Result<FieldTrace> {
    ensure_positive("dt", dt)?;
    if let Some(min) = seq.min_duration() {
        let max = min / 10.0;
        if dt > max * (1.0 + 1e-9) {
            return Err(Error::TimeStepTooCoarse { dt, max });
        }
    }
    let len = (seq.t_end() / dt).round() as usize;
    FieldTrace::new(dt, 0.0, seq.sample(dt, 0.0, len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_burn_train() {
        let cfg = BurnConfig::new(130e-9, 1.0);
        let seq = afc_burn_sequence(&cfg).unwrap();
        assert_eq!(seq.pulses().len(), 300);
        assert!((seq.t_end() - 450e-6).abs() < 1e-12);
        assert!((seq.pulses()[3].t_start - (3e-6 + 130e-9)).abs() < 1e-18);
    }

    #[test]
    fn single_pair() {
        let cfg = BurnConfig { n_pairs: 1, ..BurnConfig::new(158.7e-9, 1.0) };
        let seq = afc_burn_sequence(&cfg).unwrap();
        let starts: Vec<f64> = seq.pulses().iter().map(|p| p.t_start).collect();
        assert_eq!(starts, vec![0.0, 158.7e-9]);
    }

    #[test]
    fn overlapping_pair_rejected() {
        let cfg = BurnConfig { pulse_duration: 20e-9, ..BurnConfig::new(15e-9, 1.0) };
        assert!(matches!(afc_burn_sequence(&cfg), Err(Error::Overlap { .. })));
    }

    #[test]
    fn randomized_phases_are_seeded() {
        let cfg = BurnConfig { inter_pair_phase: InterPairPhase::Randomized { seed: 7 }, ..BurnConfig::new(130e-9, 1.0) };
        let a = afc_burn_sequence(&cfg).unwrap();
        let b = afc_burn_sequence(&cfg).unwrap();
        assert_eq!(a, b);
        let p = a.pulses();
        assert_eq!(p[0].phase, p[1].phase);
        assert_ne!(p[0].phase, p[2].phase);
    }

    #[test]
    fn echo_pulses() {
        let seq = echo_sequence(35e-9, 70e-9, 300e-9, 44.9e6).unwrap();
        let p = seq.pulses();
        assert!((p[0].area() - PI / 2.0).abs() < 2e-3);
        assert!((p[1].area() - PI).abs() < 4e-3);
        assert!(echo_sequence(35e-9, 70e-9, 50e-9, 44.9e6).is_err());
        let seq = echo_sequence(35e-9, 140e-9, 300e-9, 44.9e6).unwrap();
        assert!((seq.pulses()[1].area() - 2.0 * PI).abs() < 1e-2);
    }

    #[test]
    fn probe_attenuation() {
        let probe = probe_pulse(10e-9, 6.3e6, attenuated_rabi(4.49e7, 1e-3)).unwrap();
        assert_eq!(probe.pulses().len(), 1);
        assert_eq!(probe.pulses()[0].carrier_offset, 6.3e6);
        assert!((4.49e7 / probe.pulses()[0].peak_rabi - 1000f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn square_envelope_samples() {
        let seq = probe_pulse(10e-9, 0.0, 1.0).unwrap();
        let tr = envelope(&seq, 1e-9).unwrap();
        assert_eq!(tr.len(), 10);
        assert!(tr.samples().iter().all(|s| (s.re - 1.0).abs() < 1e-15 && s.im == 0.0));
        assert!(matches!(envelope(&seq, 2e-9), Err(Error::TimeStepTooCoarse { .. })));
    }

    #[test]
    fn two_tone_envelope_rotates() {
        let a = Pulse { carrier_offset: 10e6, ..Pulse::square(0.0, 50e-9, 1.0) };
        let b = Pulse { carrier_offset: -20e6, ..Pulse::square(50e-9, 50e-9, 1.0) };
        let seq = Sequence::from_pulses(vec![a, b]).unwrap();
        let tr = envelope(&seq, 1e-9).unwrap();
        assert_eq!(tr.len(), 100);
        for (i, s) in tr.samples().iter().enumerate() {
            let t = i as f64 * 1e-9;
            let f = if i < 50 { 10e6 } else { -20e6 };
            let expect = num_complex::Complex64::from_polar(1.0, 2.0 * PI * f * t);
            assert!((s - expect).norm() < 1e-9);
        }
    }
}
