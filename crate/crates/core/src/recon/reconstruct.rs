use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::forward::PhaselessDataset;
use crate::recon::estimate::{analytic_floor, invert_at};
use crate::recon::quadrature::{plan_reconstruction, BallQuadSpec, NodeKind, ReconPlan};
use crate::recon::zeroset::lattice_pair_selector;
use crate::recon::{ReconConfig, Theorem};
use crate::scalar::{Kahan, Real};
use crate::scatterers::{BackgroundFamily, FamilyKind};
use crate::vecn;

/// Node bookkeeping of one reconstruction.
#[derive(Clone, Copy, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct QuadDiagnostics {
    pub nodes_outside: usize,
    pub nodes_inside: usize,
    pub clamped_targets: usize,
    /// Targets whose numeric determinant fell below the analytic floor
    /// (anomalies; computed with the true determinant, never clamped).
    pub below_floor: usize,
    /// Smallest observed `|zeta| / floor` over all evaluated targets.
    pub min_zeta_ratio: f64,
}

/// Configuration-space reconstruction at one energy.
#[derive(Clone, Debug)]
pub struct ReconResult<T> {
    pub theorem: Theorem,
    pub energy: T,
    pub radius: T,
    pub epsilon: Option<T>,
    pub x_points: Vec<Vec<T>>,
    pub u_values: Vec<Complex<T>>,
    /// `max_x |u(x) - v(x)|` when the ground truth was supplied.
    pub sup_error: Option<T>,
    pub diagnostics: QuadDiagnostics,
}

/// Ground-truth evaluator for sup-norm errors.
pub type TruthFn<'a, T> = &'a (dyn Fn(&[T]) -> Complex<T> + Sync);

/// Uniform grid over the ball `|x| <= radius` at the given spacing; the
/// evaluation set for sup-norm errors.
pub fn x_grid_over_ball<T: Real>(dim: usize, radius: T, spacing: T) -> Vec<Vec<T>> {
    let half = Float::ceil(radius / spacing).to_isize().unwrap();
    let mut points = Vec::new();
    let mut idx = vec![-half; dim];
    loop {
        let x: Vec<T> = idx
            .iter()
            .map(|&i| T::from_isize(i).unwrap() * spacing)
            .collect();
        if vecn::norm(&x) <= radius {
            points.push(x);
        }
        // odometer increment
        let mut axis = dim;
        loop {
            if axis == 0 {
                return points;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] <= half {
                break;
            }
            idx[axis] = -half;
        }
    }
}

/// Reconstruct `u(x, E)` from a phaseless dataset by quadrature of
/// `exp(-i p.x)` times the spectral estimate over the cutoff ball, with the
/// zero-set region handled by the configured regularization.
///
/// The dataset must cover every planned probe target; the reconstruction
/// never interpolates in `p`.
pub fn reconstruct<T: Real>(
    dataset: &PhaselessDataset<T>,
    family: &BackgroundFamily<T>,
    config: &ReconConfig<T>,
    energy: T,
    quad: &BallQuadSpec,
    x_points: &[Vec<T>],
    truth: Option<TruthFn<'_, T>>,
) -> Result<ReconResult<T>> {
    let plan = plan_reconstruction(config, family.kind(), energy, quad)?;
    let values = spectral_table(dataset, family, config, &plan)?;
    let mut diagnostics = values.diagnostics;
    diagnostics.nodes_outside = plan.nodes_outside;
    diagnostics.nodes_inside = plan.nodes_inside;
    diagnostics.clamped_targets = plan.clamped_targets;

    // collapse node values once, then quadrature over x
    let node_terms: Vec<(Vec<T>, T, Complex<T>)> = plan
        .nodes
        .iter()
        .map(|node| {
            let value = match &node.kind {
                NodeKind::Outside { target } => values.u[*target],
                NodeKind::InsidePair { minus, plus } => {
                    (values.u[*minus] + values.u[*plus]) * T::of(0.5)
                }
                NodeKind::InsideLattice { sphere } => {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (t, w) in sphere {
                        acc += values.u[*t] * *w;
                    }
                    acc
                }
            };
            (node.p.clone(), node.weight, value)
        })
        .collect();

    let u_values: Vec<Complex<T>> = x_points
        .par_iter()
        .map(|x| {
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for (p, w, val) in &node_terms {
                let (s, c) = (-vecn::dot(p, x)).sin_cos();
                let term = Complex::new(c * *w, s * *w) * *val;
                re.add(term.re);
                im.add(term.im);
            }
            Complex::new(re.value(), im.value())
        })
        .collect();

    if u_values
        .iter()
        .any(|u| !Float::is_finite(u.re) || !Float::is_finite(u.im))
    {
        return Err(CoreError::NonFinite("reconstructed values".into()));
    }

    let sup_error = truth.map(|v| {
        u_values
            .iter()
            .zip(x_points.iter())
            .map(|(u, x)| (*u - v(x)).norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    });

    Ok(ReconResult {
        theorem: config.theorem,
        energy,
        radius: plan.radius,
        epsilon: plan.epsilon,
        x_points: x_points.to_vec(),
        u_values,
        sup_error,
        diagnostics,
    })
}

struct SpectralTable<T> {
    u: Vec<Complex<T>>,
    diagnostics: QuadDiagnostics,
}

/// Evaluate the spectral value at every planned target: the complex record
/// itself for the phased baseline, the 2x2 inversion otherwise.
fn spectral_table<T: Real>(
    dataset: &PhaselessDataset<T>,
    family: &BackgroundFamily<T>,
    config: &ReconConfig<T>,
    plan: &ReconPlan<T>,
) -> Result<SpectralTable<T>> {
    let block = dataset.block_for_energy(plan.energy)?;
    let mut indices = Vec::with_capacity(plan.targets.len());
    let mut missing = 0usize;
    for target in &plan.targets {
        match block.p_index(target) {
            Some(i) => indices.push(i),
            None => {
                missing += 1;
                log::error!(
                    "dataset lacks probe target {:?} at E = {}",
                    target.iter().map(|c| c.as_f64()).collect::<Vec<_>>(),
                    plan.energy.as_f64()
                );
            }
        }
    }
    if missing > 0 {
        return Err(CoreError::Coverage {
            missing,
            total: plan.targets.len(),
        });
    }

    let mut diagnostics = QuadDiagnostics {
        min_zeta_ratio: f64::INFINITY,
        ..Default::default()
    };

    if config.theorem == Theorem::PhasedBaseline {
        let u = indices
            .iter()
            .map(|&p_idx| block.record(0, p_idx).f)
            .collect();
        return Ok(SpectralTable { u, diagnostics });
    }

    let base_hat = family.base_hat(&plan.targets)?;
    let s_lattice = match family.kind() {
        FamilyKind::Lattice { s } => Some(*s),
        _ => None,
    };

    let mut u = Vec::with_capacity(plan.targets.len());
    for (t, target) in plan.targets.iter().enumerate() {
        let pair = match s_lattice {
            Some(s) => lattice_pair_selector(target, s),
            None => 2,
        };
        let p_idx = indices[t];
        let (value, zeta) = invert_at(
            family,
            pair,
            target,
            base_hat[t],
            block.record(0, p_idx).f_abs2,
            block.record(1, p_idx).f_abs2,
            block.record(pair, p_idx).f_abs2,
        )?;
        let floor = analytic_floor(family, target, plan.epsilon, base_hat[t])?;
        if floor > T::zero() {
            let ratio = (Float::abs(zeta) / floor).as_f64();
            if ratio < diagnostics.min_zeta_ratio {
                diagnostics.min_zeta_ratio = ratio;
            }
            if Float::abs(zeta) < floor {
                diagnostics.below_floor += 1;
                log::warn!(
                    "determinant {:.3e} below analytic floor {:.3e} at an outside target",
                    zeta.as_f64(),
                    floor.as_f64()
                );
            }
        }
        u.push(value);
    }
    Ok(SpectralTable { u, diagnostics })
}
