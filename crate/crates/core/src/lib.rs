//! Numerical laboratory for phaseless inverse scattering at high energies.
//!
//! The crate builds compactly supported potentials together with admissible
//! reference ("background") scatterers, simulates far-field intensity data
//! `|f|^2` for the Schrödinger/Helmholtz equation, and recovers the potential
//! in configuration space from that phaseless data alone. Measuring the
//! scattered intensity once for the unknown potential `v` and once for each
//! `v + w_j` with known disjoint backgrounds `w_j` turns phase retrieval into
//! a 2x2 linear system per frequency point; the backgrounds are built from a
//! modified Bessel kernel so the system's determinant is controlled
//! everywhere, and the frequency regions where it still degenerates are
//! handled by slab-boundary or sphere averaging before Fourier inversion.
//!
//! Module map:
//!
//! * [`fields`] — grids, sampled complex fields, the nonuniform Fourier
//!   transform, Sobolev-type norms and special functions.
//! * [`scatterers`] — bump profiles, Bessel-kernel backgrounds and the
//!   background families (reference pair, translate pair, lattice).
//! * [`forward`] — Lippmann-Schwinger solver, scattering amplitudes and
//!   phaseless dataset generation.
//! * [`recon`] — spectral estimates from intensity data, zero-set
//!   regularization, configuration-space reconstruction and error budgets.
//!
//! All computational types are generic over the scalar via [`Real`];
//! the `*64` aliases below fix `f64` for ordinary use.

// `!(x > 0)` guards reject NaN parameters; `x <= 0` would let them through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod forward;
pub mod recon;
pub mod scalar;
pub mod scatterers;
pub(crate) mod vecn;

pub use error::{CoreError, Result};
pub use scalar::Real;

/// Complex scalar over `f64`.
pub type Complex64 = num_complex::Complex<f64>;

/// `f64` grid specification.
pub type GridSpec64 = fields::GridSpec<f64>;
/// `f64` sampled field.
pub type Field64 = fields::SampledField<f64>;
/// `f64` spectral samples.
pub type Spectral64 = fields::SpectralSamples<f64>;
/// `f64` Sobolev budget.
pub type SobolevBudget64 = fields::SobolevBudget<f64>;
/// `f64` potential.
pub type Potential64 = scatterers::Potential<f64>;
/// `f64` background family.
pub type Family64 = scatterers::BackgroundFamily<f64>;
/// `f64` phaseless dataset.
pub type Dataset64 = forward::PhaselessDataset<f64>;
/// `f64` reconstruction configuration.
pub type ReconConfig64 = recon::ReconConfig<f64>;
