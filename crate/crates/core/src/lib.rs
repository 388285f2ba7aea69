//! Simulation and analysis of atomic-frequency-comb optical memories in
//! inhomogeneously broadened ion ensembles.
//!
//! The crate is organized bottom-up:
//!
//! - [`spectral`]: frequency grids, optical-depth profiles and the complex
//!   depth seen by a propagating field.
//! - [`sequencer`]: pulse sequences, their envelopes and spectra.
//! - [`memory`]: hole burning, propagation and storage/recall.
//! - [`bloch`]: optical Bloch dynamics for photon echoes.
//! - [`analysis`]: comb metrics, exponential fits, efficiency references.
//! - [`device`]: coupling losses and the power to Rabi-frequency calibration.
//!
//! ```
//! use afc_core::spectral::{flat_profile, make_grid, IonParameters};
//! use afc_core::memory::{input_trace, transmit};
//! use afc_core::sequencer::probe_pulse;
//!
//! let grid = make_grid(1e9, 1 << 14)?;
//! let ions = IonParameters::with_t2(700e-9)?;
//! let input = input_trace(&probe_pulse(10e-9, 0.0, 1e6)?, &grid)?;
//! let out = transmit(&flat_profile(grid, 1.0, 0.8e-3)?, &ions, &input)?;
//! assert!((out.energy() / input.energy() - (-1f64).exp()).abs() < 1e-9);
//! # Ok::<(), afc_core::Error>(())
//! ```

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bloch;
pub mod device;
mod error;
mod fft;
pub mod io;
pub mod memory;
pub mod sequencer;
pub mod spectral;
mod trace;

pub use error::{Error, Result};
pub use trace::FieldTrace;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/burning.md")]
    mod burning {}
    #[doc = include_str!("../../../book/src/recall.md")]
    mod recall {}
    #[doc = include_str!("../../../book/src/echoes.md")]
    mod echoes {}
    #[doc = include_str!("../../../book/src/device.md")]
    mod device {}
}
