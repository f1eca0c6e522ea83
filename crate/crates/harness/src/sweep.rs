use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use phaseless_core::fields::fourier_transform;
use phaseless_core::forward::{generate_dataset, PhaselessDataset};
use phaseless_core::recon::{plan_reconstruction, reconstruct, x_grid_over_ball};

use crate::config::{BuiltExperiment, ExperimentConfig};
use crate::error::Result;

/// One energy's outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub energy: f64,
    pub sup_error: f64,
    pub r_e: f64,
    /// Zero-set half-width; 0 for theorems without a zero set.
    pub eps_e: f64,
    pub nodes_outside: usize,
    pub nodes_inside: usize,
    /// Empirical Born-gap constant: `max_{j,p} | |v_hat_j|^2 - |f_j|^2 | sqrt(E)`.
    pub born_gap_const: f64,
    pub min_zeta_ratio: f64,
    pub clamped_targets: usize,
    pub dataset_sha256: String,
}

/// Persisted row file: the row plus the config identity that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RowFile {
    config_sha256: String,
    row: SweepRow,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_sha256: String,
    pub rows: Vec<SweepRow>,
    pub partial: bool,
    pub failures: Vec<String>,
}

impl SweepResult {
    pub fn fit_rows(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.energy, r.sup_error)).collect()
    }
}

fn row_path(out_dir: &Path, e_idx: usize) -> PathBuf {
    out_dir.join("rows").join(format!("row_{e_idx}.json"))
}

/// Run (or resume) the full pipeline over the configured energy list.
///
/// Energies execute sequentially (the heavy inner work is already parallel);
/// each finished row is persisted atomically, so a killed sweep re-run
/// produces the same final table without recomputing finished rows. A stage
/// failure is recorded per energy and the sweep continues.
pub fn run_sweep(
    config: &ExperimentConfig,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<SweepResult> {
    let config_sha = {
        let mut hashed = config.clone();
        if let Some(seed) = seed_override {
            hashed.seed = seed;
        }
        hashed.sha256()
    };
    fs::create_dir_all(out_dir.join("rows"))?;
    fs::create_dir_all(out_dir.join("datasets"))?;

    let built = config.build()?;
    let quad = config.quad_spec(&built.recon);
    let x_points = x_grid_over_ball(
        config.dim,
        config.potential.domain_radius,
        built.potential.field().grid().spacing(),
    );

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (e_idx, &energy) in config.energies.iter().enumerate() {
        // resume: accept a persisted row only if it matches this config
        let path = row_path(out_dir, e_idx);
        if let Ok(text) = fs::read_to_string(&path) {
            match serde_json::from_str::<RowFile>(&text) {
                Ok(row_file) if row_file.config_sha256 == config_sha => {
                    log::info!("row {e_idx} (E = {energy}) restored from {}", path.display());
                    rows.push(row_file.row);
                    continue;
                }
                _ => log::warn!("discarding stale row file {}", path.display()),
            }
        }
        match run_row(config, &built, &quad, &x_points, e_idx, energy, out_dir, seed_override) {
            Ok(row) => {
                let row_file = RowFile {
                    config_sha256: config_sha.clone(),
                    row: row.clone(),
                };
                let tmp = path.with_extension("json.tmp");
                fs::write(&tmp, serde_json::to_string_pretty(&row_file)? + "\n")?;
                fs::rename(&tmp, &path)?;
                rows.push(row);
            }
            Err(err) => {
                log::error!("row {e_idx} (E = {energy}) failed: {err}");
                failures.push(format!("E = {energy}: {err}"));
            }
        }
    }

    Ok(SweepResult {
        config_sha256: config_sha,
        partial: !failures.is_empty(),
        rows,
        failures,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_row(
    config: &ExperimentConfig,
    built: &BuiltExperiment,
    quad: &phaseless_core::recon::BallQuadSpec,
    x_points: &[Vec<f64>],
    e_idx: usize,
    energy: f64,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<SweepRow> {
    // plan first: the dataset must sample every reconstruction target
    let plan = plan_reconstruction(&built.recon, built.family.kind(), energy, quad)?;
    let opts = config.generate_options(seed_override);
    let dataset = generate_dataset(
        &built.potential,
        &built.family,
        &[energy],
        std::slice::from_ref(&plan.targets),
        &opts,
    )?;
    let dataset_sha = dataset.checksum();
    dataset.save(&out_dir.join("datasets"), &format!("e{e_idx}"))?;

    let born_gap = empirical_born_gap(&built.potential, &built.family, &dataset, energy)?;

    let potential = &built.potential;
    let result = reconstruct(
        &dataset,
        &built.family,
        &built.recon,
        energy,
        quad,
        x_points,
        Some(&|x: &[f64]| potential.evaluate(x)),
    )?;

    Ok(SweepRow {
        energy,
        sup_error: result.sup_error.expect("truth supplied"),
        r_e: result.radius,
        eps_e: result.epsilon.unwrap_or(0.0),
        nodes_outside: result.diagnostics.nodes_outside,
        nodes_inside: result.diagnostics.nodes_inside,
        born_gap_const: born_gap,
        min_zeta_ratio: if result.diagnostics.min_zeta_ratio.is_finite() {
            result.diagnostics.min_zeta_ratio
        } else {
            0.0
        },
        clamped_targets: result.diagnostics.clamped_targets,
        dataset_sha256: dataset_sha,
    })
}

/// `max_{j, p} | |v_hat_j(p)|^2 - |f_j(p, E)|^2 | * sqrt(E)`: the measured
/// stand-in for the data-error constant of the high-energy estimate.
pub fn empirical_born_gap(
    potential: &phaseless_core::scatterers::Potential<f64>,
    family: &phaseless_core::scatterers::BackgroundFamily<f64>,
    dataset: &PhaselessDataset<f64>,
    energy: f64,
) -> Result<f64> {
    let block = dataset.block_for_energy(energy)?;
    let v_hat = fourier_transform(potential.field(), &block.p_points)?.values;
    let base_hat = family.base_hat(&block.p_points)?;
    let mut worst: f64 = 0.0;
    for (i, p) in block.p_points.iter().enumerate() {
        for j in 0..=family.member_count() {
            let mut expect: Complex<f64> = v_hat[i];
            if j > 0 {
                expect += family.member_hat(j - 1, p, base_hat[i]);
            }
            let gap = (expect.norm_sqr() - block.record(j, i).f_abs2).abs();
            worst = worst.max(gap);
        }
    }
    Ok(worst * energy.sqrt())
}
