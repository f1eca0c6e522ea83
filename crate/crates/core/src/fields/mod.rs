//! Grids, sampled complex fields, Fourier machinery and special functions.
//!
//! The Fourier convention throughout the crate is
//!
//! ```text
//! v_hat(p) = (2*pi)^{-d} * integral exp(i p.x) v(x) dx,
//! v(x)     = integral exp(-i p.x) v_hat(p) dp,
//! ```
//!
//! discretized by the plain Riemann sum on the sampling grid. Spectral values
//! are computed at arbitrary targets `p` (reconstruction needs energy-dependent
//! balls and slab boundaries that never align with an FFT lattice), so the
//! transform is a direct nonuniform sum with compensated accumulation.

mod fourier;
mod grid;
mod io;
mod sobolev;
pub mod special;

pub use fourier::{fourier_transform, norm_factor, SpectralSamples};
pub use grid::{GridSpec, SampledField};
pub use io::{field_sha256, load_field, save_field, sha256_hex, FieldSidecar};
pub use sobolev::{sobolev_norm, SobolevBudget};
