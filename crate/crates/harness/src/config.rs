use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use phaseless_core::fields::GridSpec;
use phaseless_core::forward::{DatasetMode, GenerateOptions, SolverPolicy};
use phaseless_core::recon::{BallQuadSpec, ReconConfig, Theorem};
use phaseless_core::scatterers::{
    build_background, make_family, BackgroundFamily, BumpSpec, FamilyKind, FamilySpec, Potential,
    ProfileKind,
};

use crate::error::{HarnessError, Result};

/// Potential section of the experiment config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub profile: ProfileKind,
    pub amplitude: f64,
    pub radius: f64,
    pub domain_radius: f64,
    pub grid_extent: f64,
    pub grid_points: usize,
}

/// Background family section.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    /// `iw-pair`, `translate-pair` or `lattice`.
    pub mode: String,
    pub nu: f64,
    pub q_profile: ProfileKind,
    pub q_amplitude: f64,
    pub q_radius: f64,
    pub t1: Vec<f64>,
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    #[serde(default)]
    pub s: Option<f64>,
    pub grid_extent: f64,
    pub grid_points: usize,
}

/// Dataset section.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// `solver` or `born-synthetic`.
    pub mode: String,
    /// Synthetic Born-gap scale `C` (born-synthetic only).
    #[serde(default)]
    pub born_scale: f64,
    #[serde(default)]
    pub noise: Option<f64>,
    #[serde(default = "default_ppw")]
    pub points_per_wavelength: f64,
    /// Spacing cap so scatterer features stay resolved at low energies.
    #[serde(default)]
    pub max_spacing: Option<f64>,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
}

fn default_ppw() -> f64 {
    4.0
}

fn default_residual_tol() -> f64 {
    1e-8
}

/// Quadrature section (optional; defaults scale with the cutoff radius).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_radial: usize,
    pub n_angular: usize,
    #[serde(default = "default_polar")]
    pub n_polar: usize,
    #[serde(default = "default_sphere")]
    pub sphere_points: usize,
}

fn default_polar() -> usize {
    10
}

fn default_sphere() -> usize {
    32
}

/// Full experiment configuration (JSON interface of the CLI).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub potential: PotentialConfig,
    pub family: FamilyConfig,
    pub theorem: Theorem,
    /// Sobolev smoothness order (`n > dim`).
    pub n: usize,
    pub tau: f64,
    pub energies: Vec<f64>,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default)]
    pub seed: u64,
    /// Rows excluded from the front of the rate-fit window.
    #[serde(default = "default_skip")]
    pub fit_skip_first: usize,
}

fn default_skip() -> usize {
    1
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn family_kind(&self) -> Result<FamilyKind<f64>> {
        match self.family.mode.as_str() {
            "iw-pair" => Ok(FamilyKind::IwPair),
            "translate-pair" => {
                let y = self.family.y.clone().ok_or_else(|| {
                    HarnessError::Config("translate-pair mode requires family.y".into())
                })?;
                Ok(FamilyKind::TranslatePair { y })
            }
            "lattice" => {
                let s = self.family.s.ok_or_else(|| {
                    HarnessError::Config("lattice mode requires family.s".into())
                })?;
                Ok(FamilyKind::Lattice { s })
            }
            other => Err(HarnessError::Config(format!(
                "unknown family mode '{other}' (expected iw-pair | translate-pair | lattice)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 || self.dim > 3 {
            return Err(HarnessError::Config(format!(
                "dim = {} outside the supported range 2..=3",
                self.dim
            )));
        }
        if self.n <= self.dim {
            return Err(HarnessError::Config(format!(
                "n = {} must exceed dim = {}",
                self.n, self.dim
            )));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(HarnessError::Config("tau must lie in (0, 1]".into()));
        }
        if self.energies.is_empty() {
            return Err(HarnessError::Config("energy list is empty".into()));
        }
        if self.energies.iter().any(|&e| e < 1.0) {
            return Err(HarnessError::Config("energies must be >= 1".into()));
        }
        if self.energies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::Config(
                "energy list must be strictly increasing".into(),
            ));
        }
        match self.dataset.mode.as_str() {
            "solver" | "born-synthetic" => {}
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown dataset mode '{other}' (expected solver | born-synthetic)"
                )))
            }
        }
        if self.family.t1.len() != self.dim {
            return Err(HarnessError::Config(
                "family.t1 dimension mismatch".into(),
            ));
        }
        let kind = self.family_kind()?;
        if !self.theorem.compatible_with(&kind) {
            return Err(HarnessError::Config(format!(
                "theorem {} incompatible with family mode {}",
                self.theorem.label(),
                self.family.mode
            )));
        }
        Ok(())
    }

    /// Canonical hash of the configuration (identifies sweeps for resume).
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn build(&self) -> Result<BuiltExperiment> {
        self.validate()?;
        let vgrid = GridSpec::new(self.dim, self.potential.grid_extent, self.potential.grid_points)?;
        let potential = Potential::build(
            BumpSpec::new(
                self.potential.radius,
                self.potential.profile,
                self.potential.amplitude,
            ),
            &vgrid,
            self.potential.domain_radius,
            self.n,
        )?;
        let fgrid = GridSpec::new(self.dim, self.family.grid_extent, self.family.grid_points)?;
        let base = build_background(
            &BumpSpec::new(self.family.q_radius, self.family.q_profile, self.family.q_amplitude),
            self.family.nu,
            &fgrid,
        )?;
        let family = make_family(
            base,
            FamilySpec {
                t1: self.family.t1.clone(),
                kind: self.family_kind()?,
            },
            self.potential.domain_radius,
        )?;
        let recon = ReconConfig::new(
            self.theorem,
            self.n,
            self.tau,
            family.base().beta,
            self.dim,
        )?;
        Ok(BuiltExperiment {
            potential,
            family,
            recon,
        })
    }

    /// Quadrature spec: explicit when configured, else scaled to the largest
    /// cutoff radius.
    pub fn quad_spec(&self, recon: &ReconConfig<f64>) -> BallQuadSpec {
        match self.quadrature {
            Some(q) => BallQuadSpec {
                n_radial: q.n_radial,
                n_angular: q.n_angular,
                n_polar: q.n_polar,
                sphere_points: q.sphere_points,
            },
            None => {
                let e_max = *self.energies.last().expect("validated nonempty");
                BallQuadSpec::default_for(recon.radius(e_max), self.potential.domain_radius)
            }
        }
    }

    pub fn generate_options(&self, seed_override: Option<u64>) -> GenerateOptions<f64> {
        let max_spacing = self.dataset.max_spacing.or(Some(
            self.family.q_radius.min(self.potential.radius) / 8.0,
        ));
        GenerateOptions {
            mode: match self.dataset.mode.as_str() {
                "solver" => DatasetMode::Solver,
                _ => DatasetMode::BornSynthetic {
                    born_scale: self.dataset.born_scale,
                },
            },
            noise: self.dataset.noise,
            seed: seed_override.unwrap_or(self.seed),
            solver: SolverPolicy {
                points_per_wavelength: self.dataset.points_per_wavelength,
                max_spacing,
                margin: 0.5,
                residual_tol: self.dataset.residual_tol,
            },
        }
    }
}

/// The assembled experiment objects.
pub struct BuiltExperiment {
    pub potential: Potential<f64>,
    pub family: BackgroundFamily<f64>,
    pub recon: ReconConfig<f64>,
}
