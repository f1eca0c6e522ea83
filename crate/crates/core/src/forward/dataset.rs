use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fields::{field_sha256, fourier_transform, sha256_hex, GridSpec};
use crate::forward::{LsSolver, ProbeGeometry, SolverOptions};
use crate::scalar::Real;
use crate::scatterers::{BackgroundFamily, FamilyManifest, Potential};
use crate::vecn;

/// How the intensity table is produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DatasetMode<T> {
    /// Full Lippmann-Schwinger solves for `v + w_j` at every probe.
    Solver,
    /// `|f_j|^2 = |v_hat_j(p) + delta|^2` with a deterministic perturbation
    /// `|delta| = C E^{-1/2} (1 + |p|)^{-1}`; `C = 0` gives exact Born data.
    BornSynthetic { born_scale: T },
}

/// One intensity record: the complex amplitude (kept for the phased baseline
/// and diagnostics) and the phaseless payload `|f|^2`. Optional multiplicative
/// noise applies to `f_abs2` only.
#[derive(Clone, Copy, Debug)]
pub struct DatasetRecord<T> {
    pub f: Complex<T>,
    pub f_abs2: T,
}

/// Records of every scatterer `j = 0..=m` on one energy's probe grid.
#[derive(Clone, Debug)]
pub struct EnergyBlock<T> {
    pub energy: T,
    pub p_points: Vec<Vec<T>>,
    records: Vec<Vec<DatasetRecord<T>>>,
    index: HashMap<Vec<u64>, usize>,
}

impl<T: Real> EnergyBlock<T> {
    fn new(energy: T, p_points: Vec<Vec<T>>, records: Vec<Vec<DatasetRecord<T>>>) -> Self {
        let mut index = HashMap::with_capacity(p_points.len());
        for (i, p) in p_points.iter().enumerate() {
            index.insert(vecn::bit_key(p), i);
        }
        Self {
            energy,
            p_points,
            records,
            index,
        }
    }

    /// Exact (bitwise) lookup of a probe point.
    pub fn p_index(&self, p: &[T]) -> Option<usize> {
        self.index.get(&vecn::bit_key(p)).copied()
    }

    pub fn record(&self, j: usize, p_idx: usize) -> &DatasetRecord<T> {
        &self.records[j][p_idx]
    }

    pub fn scatterer_count(&self) -> usize {
        self.records.len()
    }

    pub fn len(&self) -> usize {
        self.p_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_points.is_empty()
    }
}

/// Solver grid policy for dataset generation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolverPolicy {
    /// Samples per wavelength; 4 reproduces the `h <= pi/(2 sqrt(E))` rule.
    pub points_per_wavelength: f64,
    /// Cap on the spacing so scatterer features stay resolved.
    pub max_spacing: Option<f64>,
    /// Extra box margin beyond the supports.
    pub margin: f64,
    /// Relative residual tolerance of the linear solves.
    pub residual_tol: f64,
}

impl Default for SolverPolicy {
    fn default() -> Self {
        Self {
            points_per_wavelength: 4.0,
            max_spacing: None,
            margin: 0.5,
            residual_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenerateOptions<T> {
    pub mode: DatasetMode<T>,
    pub noise: Option<T>,
    pub seed: u64,
    pub solver: SolverPolicy,
}

impl<T: Real> GenerateOptions<T> {
    pub fn born_exact(seed: u64) -> Self {
        Self {
            mode: DatasetMode::BornSynthetic {
                born_scale: T::zero(),
            },
            noise: None,
            seed,
            solver: SolverPolicy::default(),
        }
    }
}

/// The phaseless data table `S = { |f|^2, |f_1|^2, ..., |f_m|^2 }` sampled on
/// per-energy probe grids.
#[derive(Clone, Debug)]
pub struct PhaselessDataset<T> {
    pub dim: usize,
    pub family_manifest: FamilyManifest,
    pub mode_label: String,
    pub noise: Option<T>,
    pub seed: u64,
    /// Number of background members `m`.
    pub member_count: usize,
    pub solver_policy: Option<SolverPolicy>,
    blocks: Vec<EnergyBlock<T>>,
}

impl<T: Real> PhaselessDataset<T> {
    pub fn blocks(&self) -> &[EnergyBlock<T>] {
        &self.blocks
    }

    pub fn energies(&self) -> Vec<T> {
        self.blocks.iter().map(|b| b.energy).collect()
    }

    pub fn block(&self, e_idx: usize) -> Result<&EnergyBlock<T>> {
        self.blocks.get(e_idx).ok_or_else(|| {
            CoreError::MissingRecord(format!("energy block {e_idx} out of range"))
        })
    }

    pub fn block_for_energy(&self, energy: T) -> Result<&EnergyBlock<T>> {
        self.blocks
            .iter()
            .find(|b| b.energy == energy)
            .ok_or_else(|| {
                CoreError::MissingRecord(format!("no block at energy {}", energy.as_f64()))
            })
    }

    /// Deterministic traversal of the full index set, `j` outermost.
    pub fn iter_records(&self) -> impl Iterator<Item = (usize, usize, usize, &DatasetRecord<T>)> {
        self.blocks.iter().enumerate().flat_map(|(e_idx, block)| {
            (0..block.scatterer_count()).flat_map(move |j| {
                (0..block.len()).map(move |p_idx| (j, e_idx, p_idx, block.record(j, p_idx)))
            })
        })
    }

    /// Binary serialization (shared by [`Self::save`] and the checksum).
    fn payload(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(b"PHDATA\0\0");
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&(self.dim as u32).to_le_bytes());
        buf.extend_from_slice(&(self.member_count as u32).to_le_bytes());
        buf.extend_from_slice(&(self.blocks.len() as u32).to_le_bytes());
        for block in &self.blocks {
            buf.extend_from_slice(&block.energy.as_f64().to_le_bytes());
            buf.extend_from_slice(&(block.len() as u64).to_le_bytes());
            for p in &block.p_points {
                for c in p {
                    buf.extend_from_slice(&c.as_f64().to_le_bytes());
                }
            }
            for j in 0..block.scatterer_count() {
                for p_idx in 0..block.len() {
                    let r = block.record(j, p_idx);
                    buf.extend_from_slice(&r.f.re.as_f64().to_le_bytes());
                    buf.extend_from_slice(&r.f.im.as_f64().to_le_bytes());
                    buf.extend_from_slice(&r.f_abs2.as_f64().to_le_bytes());
                }
            }
        }
        buf
    }

    /// Checksum of the binary payload, referenced by downstream manifests.
    pub fn checksum(&self) -> String {
        sha256_hex(&self.payload())
    }

    /// Write `<stem>.bin` and `<stem>.json` under `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let bin_path = dir.join(format!("{stem}.bin"));
        let payload = self.payload();
        let manifest = DatasetManifest {
            format: "phdata-v1".into(),
            dim: self.dim,
            member_count: self.member_count,
            mode: self.mode_label.clone(),
            seed: self.seed,
            noise: self.noise.map(|n| n.as_f64()),
            energies: self.blocks.iter().map(|b| b.energy.as_f64()).collect(),
            p_counts: self.blocks.iter().map(|b| b.len()).collect(),
            family: self.family_manifest.clone(),
            solver: self.solver_policy,
            payload_sha256: sha256_hex(&payload),
        };
        fs::File::create(&bin_path)?.write_all(&payload)?;
        fs::write(
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        Ok(bin_path)
    }
}

impl PhaselessDataset<f64> {
    /// Load a dataset written by [`PhaselessDataset::save`].
    pub fn load(dir: &Path, stem: &str) -> Result<Self> {
        let manifest: DatasetManifest =
            serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
        let mut bytes = Vec::new();
        fs::File::open(dir.join(format!("{stem}.bin")))?.read_to_end(&mut bytes)?;
        if sha256_hex(&bytes) != manifest.payload_sha256 {
            return Err(CoreError::Format("dataset checksum mismatch".into()));
        }
        if bytes.len() < 24 || &bytes[0..8] != b"PHDATA\0\0" {
            return Err(CoreError::Format("not a dataset container".into()));
        }
        let mut off = 8usize;
        let mut read_u32 = |bytes: &[u8]| {
            let v = u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
            off += 4;
            v
        };
        let version = read_u32(&bytes);
        if version != 1 {
            return Err(CoreError::Format(format!("dataset version {version}")));
        }
        let dim = read_u32(&bytes) as usize;
        let member_count = read_u32(&bytes) as usize;
        let n_blocks = read_u32(&bytes) as usize;
        let mut cursor = off;
        let take_f64 = |bytes: &[u8], cursor: &mut usize| -> Result<f64> {
            if *cursor + 8 > bytes.len() {
                return Err(CoreError::Format("dataset payload truncated".into()));
            }
            let v = f64::from_le_bytes(bytes[*cursor..*cursor + 8].try_into().unwrap());
            *cursor += 8;
            Ok(v)
        };
        let mut blocks = Vec::with_capacity(n_blocks);
        for _ in 0..n_blocks {
            let energy = take_f64(&bytes, &mut cursor)?;
            let n_p = {
                if cursor + 8 > bytes.len() {
                    return Err(CoreError::Format("dataset payload truncated".into()));
                }
                let v = u64::from_le_bytes(bytes[cursor..cursor + 8].try_into().unwrap()) as usize;
                cursor += 8;
                v
            };
            let mut p_points = Vec::with_capacity(n_p);
            for _ in 0..n_p {
                let mut p = Vec::with_capacity(dim);
                for _ in 0..dim {
                    p.push(take_f64(&bytes, &mut cursor)?);
                }
                p_points.push(p);
            }
            let mut records = Vec::with_capacity(member_count + 1);
            for _ in 0..=member_count {
                let mut row = Vec::with_capacity(n_p);
                for _ in 0..n_p {
                    let re = take_f64(&bytes, &mut cursor)?;
                    let im = take_f64(&bytes, &mut cursor)?;
                    let abs2 = take_f64(&bytes, &mut cursor)?;
                    row.push(DatasetRecord {
                        f: Complex::new(re, im),
                        f_abs2: abs2,
                    });
                }
                records.push(row);
            }
            blocks.push(EnergyBlock::new(energy, p_points, records));
        }
        Ok(Self {
            dim,
            family_manifest: manifest.family,
            mode_label: manifest.mode,
            noise: manifest.noise,
            seed: manifest.seed,
            member_count,
            solver_policy: manifest.solver,
            blocks,
        })
    }
}

/// JSON manifest of a dataset file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub dim: usize,
    pub member_count: usize,
    pub mode: String,
    pub seed: u64,
    pub noise: Option<f64>,
    pub energies: Vec<f64>,
    pub p_counts: Vec<usize>,
    pub family: FamilyManifest,
    pub solver: Option<SolverPolicy>,
    pub payload_sha256: String,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_from(seed: u64, j: usize, e_idx: usize, p_idx: usize, salt: u64) -> f64 {
    let mut h = splitmix64(seed ^ salt);
    h = splitmix64(h ^ (j as u64).wrapping_mul(0x0100_0000_01B3));
    h = splitmix64(h ^ (e_idx as u64).wrapping_mul(0x9E37_79B9));
    h = splitmix64(h ^ (p_idx as u64).wrapping_mul(0x85EB_CA6B));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Generate the phaseless dataset for `v` and `v + w_j` on per-energy probe
/// grids.
///
/// Probes are validated against `|p| <= 2 sqrt(E)` before any computation.
/// Record order is `(j, E, p)` with `p` in grid order; generation is
/// deterministic for a fixed seed regardless of thread count.
pub fn generate_dataset<T: Real + RealField>(
    potential: &Potential<T>,
    family: &BackgroundFamily<T>,
    energies: &[T],
    p_grids: &[Vec<Vec<T>>],
    opts: &GenerateOptions<T>,
) -> Result<PhaselessDataset<T>> {
    let dim = family.dim();
    if energies.len() != p_grids.len() {
        return Err(CoreError::DimensionMismatch(
            "one probe grid per energy required".into(),
        ));
    }
    if potential.field().grid().dim != dim {
        return Err(CoreError::DimensionMismatch(
            "potential and family dimension mismatch".into(),
        ));
    }
    if let Some(noise) = opts.noise {
        if !(noise >= T::zero() && noise < T::one()) {
            return Err(CoreError::InvalidParameter(
                "multiplicative noise must lie in [0, 1) to keep intensities nonnegative".into(),
            ));
        }
    }
    for (&energy, grid) in energies.iter().zip(p_grids.iter()) {
        let limit = T::of(2.0) * Float::sqrt(energy);
        for p in grid {
            if p.len() != dim {
                return Err(CoreError::DimensionMismatch(
                    "probe point dimension mismatch".into(),
                ));
            }
            if vecn::norm(p) > limit {
                return Err(CoreError::OutOfBall {
                    p_norm: vecn::norm(p).as_f64(),
                    limit: limit.as_f64(),
                });
            }
        }
    }

    let base_checksum = field_sha256(&family.base().field);
    let family_manifest = family.manifest(&base_checksum);
    let m = family.member_count();

    let mut blocks = Vec::with_capacity(energies.len());
    let mut failures: Vec<(usize, usize, usize)> = Vec::new();
    let mut total_records = 0usize;

    for (e_idx, (&energy, targets)) in energies.iter().zip(p_grids.iter()).enumerate() {
        let records = match opts.mode {
            DatasetMode::BornSynthetic { born_scale } => synthetic_block(
                potential,
                family,
                energy,
                e_idx,
                targets,
                born_scale,
                opts,
                m,
            )?,
            DatasetMode::Solver => solver_block(
                potential,
                family,
                energy,
                e_idx,
                targets,
                opts,
                m,
                &mut failures,
            )?,
        };
        total_records += (m + 1) * targets.len();
        blocks.push(EnergyBlock::new(energy, targets.clone(), records));
    }

    if !failures.is_empty() {
        for (j, e_idx, p_idx) in &failures {
            log::error!("record failed: j = {j}, energy index {e_idx}, probe index {p_idx}");
        }
        return Err(CoreError::Partial {
            failed: failures.len(),
            total: total_records,
        });
    }

    Ok(PhaselessDataset {
        dim,
        family_manifest,
        mode_label: match opts.mode {
            DatasetMode::Solver => "solver".into(),
            DatasetMode::BornSynthetic { .. } => "born-synthetic".into(),
        },
        noise: opts.noise,
        seed: opts.seed,
        member_count: m,
        solver_policy: matches!(opts.mode, DatasetMode::Solver).then_some(opts.solver),
        blocks,
    })
}

#[allow(clippy::too_many_arguments)]
fn synthetic_block<T: Real>(
    potential: &Potential<T>,
    family: &BackgroundFamily<T>,
    energy: T,
    e_idx: usize,
    targets: &[Vec<T>],
    born_scale: T,
    opts: &GenerateOptions<T>,
    m: usize,
) -> Result<Vec<Vec<DatasetRecord<T>>>> {
    let v_hat = fourier_transform(potential.field(), targets)?.values;
    let base_hat = family.base_hat(targets)?;
    let inv_sqrt_e = T::one() / Float::sqrt(energy);

    let mut records = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut row = Vec::with_capacity(targets.len());
        for (p_idx, p) in targets.iter().enumerate() {
            let mut f = v_hat[p_idx];
            if j > 0 {
                f += family.member_hat(j - 1, p, base_hat[p_idx]);
            }
            if born_scale > T::zero() {
                let mag = born_scale * inv_sqrt_e / (T::one() + vecn::norm(p));
                let phase = T::of(2.0) * T::PI()
                    * T::of(unit_from(opts.seed, j, e_idx, p_idx, 0x5eed_0001));
                f += Complex::from_polar(mag, phase);
            }
            let mut f_abs2 = f.norm_sqr();
            if let Some(noise) = opts.noise {
                let xi = T::of(2.0) * T::of(unit_from(opts.seed, j, e_idx, p_idx, 0x5eed_0002))
                    - T::one();
                f_abs2 *= T::one() + noise * xi ;
            }
            row.push(DatasetRecord { f, f_abs2 });
        }
        records.push(row);
    }
    Ok(records)
}

/// Choose the solver grid for one energy: a box covering the potential ball
/// and every member support, with spacing that resolves both the wavelength
/// and the scatterer features.
pub fn solver_grid_for<T: Real>(
    potential: &Potential<T>,
    family: &BackgroundFamily<T>,
    energy: T,
    policy: &SolverPolicy,
) -> Result<GridSpec<T>> {
    let dim = family.dim();
    let mut extent = potential.domain_radius();
    for member in family.members() {
        let reach = member
            .translate
            .iter()
            .map(|c| Float::abs(*c))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
            + member.omega_radius;
        if reach > extent {
            extent = reach;
        }
    }
    extent += T::of(policy.margin);
    let kappa = Float::sqrt(energy);
    let mut h = T::of(2.0) * T::PI() / (T::of(policy.points_per_wavelength) * kappa);
    if let Some(cap) = policy.max_spacing {
        let cap = T::of(cap);
        if h > cap {
            h = cap;
        }
    }
    let mut points = Float::ceil((extent + extent) / h).to_usize().unwrap_or(0);
    if points % 2 == 1 {
        points += 1;
    }
    GridSpec::new(dim, extent, points.max(8))
}

#[allow(clippy::too_many_arguments)]
fn solver_block<T: Real + RealField>(
    potential: &Potential<T>,
    family: &BackgroundFamily<T>,
    energy: T,
    e_idx: usize,
    targets: &[Vec<T>],
    opts: &GenerateOptions<T>,
    m: usize,
    failures: &mut Vec<(usize, usize, usize)>,
) -> Result<Vec<Vec<DatasetRecord<T>>>> {
    let dim = family.dim();
    let grid = solver_grid_for(potential, family, energy, &opts.solver)?;
    log::info!(
        "solver block E = {}: grid {}^{} (h = {:.4})",
        energy.as_f64(),
        grid.points,
        dim,
        grid.spacing().as_f64()
    );
    let geom = ProbeGeometry::new(dim, energy)?;
    let mut ks = Vec::with_capacity(targets.len());
    let mut ls = Vec::with_capacity(targets.len());
    for p in targets {
        let (k, l) = geom.vectors(p)?;
        ks.push(k);
        ls.push(l);
    }
    let solver_opts = SolverOptions {
        residual_tol: T::of(opts.solver.residual_tol),
    };

    let mut records = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let member = (j > 0).then(|| &family.members()[j - 1]);
        let solver = LsSolver::assemble(
            &grid,
            energy,
            |x: &[T]| {
                let mut v = potential.evaluate(x);
                if let Some(w) = member {
                    v += w.evaluate(x);
                }
                v
            },
            solver_opts,
        )?;
        let solutions = solver.solve_support_many(&ks)?;
        let mut row = Vec::with_capacity(targets.len());
        for (p_idx, (psi, residual)) in solutions.iter().enumerate() {
            if *residual > solver_opts.residual_tol {
                failures.push((j, e_idx, p_idx));
            }
            let f = solver.amplitude(psi, &ls[p_idx]);
            let mut f_abs2 = f.norm_sqr();
            if let Some(noise) = opts.noise {
                let xi = T::of(2.0) * T::of(unit_from(opts.seed, j, e_idx, p_idx, 0x5eed_0002))
                    - T::one();
                f_abs2 *= T::one() + noise * xi ;
            }
            row.push(DatasetRecord { f, f_abs2 });
        }
        records.push(row);
    }
    Ok(records)
}
