//! Spectral grids, inhomogeneous optical-depth profiles and their complex
//! (absorptive plus dispersive) response.

mod depth;
mod grid;
mod hilbert;
mod ions;
mod profile;

pub use depth::{complex_depth, ComplexDepthSpectrum};
pub(crate) use depth::lorentzian_convolve;
pub use grid::{make_grid, SpectralGrid};
pub use hilbert::{hilbert_transform, relative_l2_error};
pub use ions::IonParameters;
pub use profile::{flat_profile, CombSpec, InhomogeneousProfile, ToothShape};
