//! Hole burning, single-pass propagation and storage/recall.

mod burn;
mod propagate;

pub use burn::{burn, burn_spectrum, calibrate_burn, calibrate_burn_background, BurnModel};
pub use propagate::{input_trace, probe_scan, store_recall, transmit, EchoResult};
