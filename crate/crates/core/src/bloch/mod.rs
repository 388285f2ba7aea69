//! Optical Bloch dynamics of detuning classes: photon echoes and Rabi scans.

mod echo;
mod evolve;

pub use echo::{echo_decay_scan, rabi_scan, two_pulse_echo, EchoExperiment, EchoPoint, EchoScanResult, MIN_CLASSES};
pub use evolve::{evolve, max_time_step, BlochEnsembleState, Evolution};
