//! Experiment orchestration for the phaseless inverse-scattering laboratory:
//! config ingestion, energy sweeps, decay-rate fitting, and artifact emission
//! (CSV, JSON manifests, SVG plots). The `phaseless` binary is a thin CLI
//! over this library.

pub mod config;
pub mod emit;
pub mod error;
pub mod fit;
pub mod sweep;

pub use config::{BuiltExperiment, ExperimentConfig};
pub use emit::{emit_outputs, parse_csv, render_csv, render_svg, ArtifactSet, SweepManifest};
pub use error::{HarnessError, Result};
pub use fit::{fit_rate, RateFit};
pub use sweep::{empirical_born_gap, run_sweep, SweepResult, SweepRow};
