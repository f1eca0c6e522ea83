use num_complex::Complex;
use num_traits::Float;

use crate::error::{CoreError, Result};
use crate::forward::PhaselessDataset;
use crate::recon::quadrature::{sphere_average_nodes, BallQuadSpec};
use crate::recon::zeroset::{lattice_pair_selector, Location, ZeroSetModel};
use crate::scalar::Real;
use crate::scatterers::{BackgroundFamily, FamilyKind};
use crate::vecn;

/// A spectral value recovered from phaseless data at one probe point.
#[derive(Clone, Debug)]
pub struct SpectralEstimate<T> {
    pub p: Vec<T>,
    pub energy: T,
    pub value: Complex<T>,
    /// Whether the zero-set branch produced this value.
    pub regularized: bool,
    /// 1-based index of the second member of the pair used (0 for averaged
    /// estimates that mix several pairs).
    pub pair_used: usize,
    /// Numeric determinant at `p` for the pair used (0 for averages).
    pub zeta_at_p: T,
}

/// Denominator floor policy for the direct inversion.
#[derive(Clone, Copy, Debug)]
pub enum ZetaFloor<T> {
    /// No floor; only an exactly vanishing determinant is rejected.
    Off,
    /// Explicit absolute floor.
    Absolute(T),
    /// The analytic bound: `c1^2 (1+|p|)^{-2 beta}` for the reference pair,
    /// `(2 eps / pi) |w_hat(p)|^2` for the translate pair and
    /// `(2 eps / (pi sqrt(d))) |w_hat(p)|^2` for the lattice.
    Analytic { epsilon: Option<T> },
}

pub(crate) fn analytic_floor<T: Real>(
    family: &BackgroundFamily<T>,
    p: &[T],
    epsilon: Option<T>,
    base_hat: Complex<T>,
) -> Result<T> {
    let base = family.base();
    match family.kind() {
        FamilyKind::IwPair => {
            let bound = base.c1 * (T::one() + vecn::norm(p)).powf(-base.beta);
            Ok(bound * bound)
        }
        FamilyKind::TranslatePair { .. } => {
            let eps = epsilon.ok_or_else(|| {
                CoreError::InvalidParameter(
                    "analytic zeta floor for a translate pair needs epsilon".into(),
                )
            })?;
            Ok((eps + eps) / T::PI() * base_hat.norm_sqr())
        }
        FamilyKind::Lattice { .. } => {
            let eps = epsilon.ok_or_else(|| {
                CoreError::InvalidParameter(
                    "analytic zeta floor for a lattice family needs epsilon".into(),
                )
            })?;
            let d = T::from_usize(family.dim()).unwrap();
            Ok((eps + eps) / (T::PI() * d.sqrt()) * base_hat.norm_sqr())
        }
    }
}

/// The raw 2x2 inversion at one point: given data `|f_0|^2`, `|f_1|^2`,
/// `|f_j|^2` and the member transforms, return `(U, zeta)` where
///
/// ```text
/// (Re U, Im U)^T = (1/2) M^{-1} b,
/// M^{-1} = (1/zeta) [  Im w_j  -Im w_1 ]      b = [ |f_1|^2 - |f_0|^2 - |w_1|^2 ]
///                   [ -Re w_j   Re w_1 ],         [ |f_j|^2 - |f_0|^2 - |w_j|^2 ]
/// ```
pub(crate) fn invert_at<T: Real>(
    family: &BackgroundFamily<T>,
    pair: usize,
    p: &[T],
    base_hat: Complex<T>,
    f0_abs2: T,
    f1_abs2: T,
    fj_abs2: T,
) -> Result<(Complex<T>, T)> {
    let w1 = family.member_hat(0, p, base_hat);
    let wj = family.member_hat(pair - 1, p, base_hat);
    let zeta = w1.re * wj.im - w1.im * wj.re;
    if zeta == T::zero() {
        return Err(CoreError::NearSingular {
            zeta: 0.0,
            floor: 0.0,
        });
    }
    let b1 = f1_abs2 - f0_abs2 - w1.norm_sqr();
    let b2 = fj_abs2 - f0_abs2 - wj.norm_sqr();
    let half = T::of(0.5);
    let re = half * (wj.im * b1 - w1.im * b2) / zeta;
    let im = half * (-wj.re * b1 + w1.re * b2) / zeta;
    Ok((Complex::new(re, im), zeta))
}

fn lookup<'a, T: Real>(
    dataset: &'a PhaselessDataset<T>,
    energy: T,
    p: &[T],
) -> Result<(usize, &'a crate::forward::EnergyBlock<T>)> {
    let block = dataset.block_for_energy(energy)?;
    let p_idx = block.p_index(p).ok_or_else(|| {
        CoreError::MissingRecord(format!(
            "no record at p = {:?}, E = {}",
            p.iter().map(|c| c.as_f64()).collect::<Vec<_>>(),
            energy.as_f64()
        ))
    })?;
    Ok((p_idx, block))
}

/// Direct spectral estimate `U(p, E)` from the phaseless records of the pair
/// `(w_1, w_pair)`, with a determinant floor check.
///
/// Fails with [`CoreError::NearSingular`] when `|zeta|` sits below the floor:
/// the caller must route such points through the regularized branch.
pub fn spectral_estimate<T: Real>(
    dataset: &PhaselessDataset<T>,
    family: &BackgroundFamily<T>,
    pair: usize,
    p: &[T],
    energy: T,
    floor: ZetaFloor<T>,
) -> Result<SpectralEstimate<T>> {
    let (p_idx, block) = lookup(dataset, energy, p)?;
    let base_hat = family.base_hat(std::slice::from_ref(&p.to_vec()))?[0];
    let floor_value = match floor {
        ZetaFloor::Off => T::zero(),
        ZetaFloor::Absolute(v) => v,
        ZetaFloor::Analytic { epsilon } => analytic_floor(family, p, epsilon, base_hat)?,
    };
    let (value, zeta) = invert_at(
        family,
        pair,
        p,
        base_hat,
        block.record(0, p_idx).f_abs2,
        block.record(1, p_idx).f_abs2,
        block.record(pair, p_idx).f_abs2,
    )?;
    if Float::abs(zeta) < floor_value {
        return Err(CoreError::NearSingular {
            zeta: zeta.as_f64(),
            floor: floor_value.as_f64(),
        });
    }
    Ok(SpectralEstimate {
        p: p.to_vec(),
        energy,
        value,
        regularized: false,
        pair_used: pair,
        zeta_at_p: zeta,
    })
}

/// Slab regularization for the translate pair:
/// `U^eps(p, E) = (U(p_-, E) + U(p_+, E)) / 2` at the slab-boundary points.
///
/// Requires `p` inside the zero-set neighborhood and both boundary points to
/// be first-class dataset records.
pub fn regularized_estimate_pair<T: Real>(
    dataset: &PhaselessDataset<T>,
    family: &BackgroundFamily<T>,
    p: &[T],
    energy: T,
    epsilon: T,
) -> Result<SpectralEstimate<T>> {
    let model = ZeroSetModel::for_family(family.kind(), Some(epsilon))?;
    let (z, p_perp) = match model.classify(p) {
        Location::InsidePair { z, p_perp } => (z, p_perp),
        Location::Outside => {
            return Err(CoreError::Domain(
                "regularized_estimate_pair: p lies outside the zero-set neighborhood".into(),
            ))
        }
        Location::InsideLattice { .. } => unreachable!("pair model cannot yield lattice location"),
    };
    let (minus, plus) = model.pair_targets(z, &p_perp)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for q in [&minus, &plus] {
        let est = spectral_estimate(
            dataset,
            family,
            2,
            q,
            energy,
            ZetaFloor::Analytic {
                epsilon: Some(epsilon),
            },
        )?;
        acc += est.value;
    }
    let base_hat = family.base_hat(std::slice::from_ref(&p.to_vec()))?[0];
    let zeta_at_p = family.zeta_from_base(2, p, base_hat)?;
    Ok(SpectralEstimate {
        p: p.to_vec(),
        energy,
        value: acc * T::of(0.5),
        regularized: true,
        pair_used: 2,
        zeta_at_p,
    })
}

/// Sphere regularization for the lattice family: the normalized average of
/// `U` over the sphere of radius `eps/s` around the nearest lattice point,
/// each node inverted with its own best pair `i'(node)`.
pub fn regularized_estimate_lattice<T: Real>(
    dataset: &PhaselessDataset<T>,
    family: &BackgroundFamily<T>,
    p: &[T],
    energy: T,
    epsilon: T,
    quad_points: usize,
) -> Result<SpectralEstimate<T>> {
    let s = match family.kind() {
        FamilyKind::Lattice { s } => *s,
        _ => {
            return Err(CoreError::InvalidParameter(
                "regularized_estimate_lattice requires a lattice family".into(),
            ))
        }
    };
    let model = ZeroSetModel::for_family(family.kind(), Some(epsilon))?;
    let z = match model.classify(p) {
        Location::InsideLattice { z } => z,
        _ => {
            return Err(CoreError::Domain(
                "regularized_estimate_lattice: p lies outside the zero-set neighborhood".into(),
            ))
        }
    };
    let center = model.lattice_center(&z)?;
    let spec = BallQuadSpec {
        n_radial: 1,
        n_angular: 1,
        n_polar: 8,
        sphere_points: quad_points,
    };
    let nodes = sphere_average_nodes(&center, epsilon / s, &spec)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (node, w) in &nodes {
        if node.iter().all(|&c| (s * c).sin() == T::zero()) {
            return Err(CoreError::Domain(
                "degenerate sphere node: every pair determinant vanishes".into(),
            ));
        }
        let pair = lattice_pair_selector(node, s);
        let est = spectral_estimate(
            dataset,
            family,
            pair,
            node,
            energy,
            ZetaFloor::Analytic {
                epsilon: Some(epsilon),
            },
        )?;
        acc += est.value * *w;
    }
    Ok(SpectralEstimate {
        p: p.to_vec(),
        energy,
        value: acc,
        regularized: true,
        pair_used: 0,
        zeta_at_p: T::zero(),
    })
}
