//! Timed pulse sequences (burn trains, echo pairs, probes), their spectra
//! and the acousto-optic modulator passband.

mod builders;
mod pulse;
mod spectrum;

pub use builders::{
    afc_burn_sequence, attenuated_rabi, echo_sequence, envelope, probe_pulse, BurnConfig, InterPairPhase,
};
pub use pulse::{Pulse, PulseShape, Sequence, DEFAULT_RISE_TIME};
pub use spectrum::{aom_filter, fringe_spacing, incoherent_power_spectrum, power_spectrum, EnvelopeSpectrum};
