//! Forward problem: scattering solutions, far-field amplitudes and phaseless
//! data generation.
//!
//! Amplitudes are always extracted through the volume integral
//! `f(k, l) = (2 pi)^{-d} integral exp(-i l.x) v(x) psi^+(x, k) dx`
//! rather than by sampling the far-field asymptotics; the asymptotic
//! constant `c(d, |k|)` is stored for provenance only.

mod amplitude;
mod dataset;
mod greens;
mod probe;
mod solver;

pub use amplitude::{born_amplitude, scattering_amplitude};
pub use dataset::{
    generate_dataset, solver_grid_for, DatasetManifest, DatasetMode, DatasetRecord, EnergyBlock,
    GenerateOptions, PhaselessDataset, SolverPolicy,
};
pub use greens::{greens_cell_weight, greens_value};
pub use probe::{probe_vectors, ProbeGeometry};
pub use solver::{
    asymptotic_constant, solve_lippmann_schwinger, ForwardSolution, LsSolver, SolverOptions,
};
