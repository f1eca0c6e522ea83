use std::collections::HashMap;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fields::special::gauss_legendre;
use crate::recon::zeroset::{Location, ZeroSetModel};
use crate::recon::{ReconConfig, Theorem};
use crate::scalar::Real;
use crate::scatterers::FamilyKind;
use crate::vecn;

/// Quadrature resolution over the spectral ball: radial Gauss-Legendre times
/// uniform angles (d = 2) or times a product sphere rule (d = 3).
/// `sphere_points` controls the angular rule of the lattice regularization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BallQuadSpec {
    pub n_radial: usize,
    pub n_angular: usize,
    /// Polar (cos-theta) nodes, d = 3 only.
    pub n_polar: usize,
    /// Nodes of the sphere average in the lattice regularization.
    pub sphere_points: usize,
}

impl BallQuadSpec {
    /// Resolution scaled to keep `exp(-i p.x)` resolved over `|x| <= x_radius`
    /// when `|p| <= r`.
    pub fn default_for(r: f64, x_radius: f64) -> Self {
        let scale = (r * x_radius).max(1.0);
        let n_radial = (16 + (3.0 * scale).ceil() as usize).max(16);
        Self {
            n_radial,
            n_angular: (2 * n_radial).max(32),
            n_polar: (n_radial / 2).max(8),
            sphere_points: 32,
        }
    }
}

/// Quadrature nodes `(p, weight)` over the ball `|p| <= r`.
pub fn ball_nodes<T: Real>(dim: usize, r: T, spec: &BallQuadSpec) -> Result<Vec<(Vec<T>, T)>> {
    if !(r > T::zero()) {
        return Err(CoreError::InvalidParameter(
            "ball radius must be positive".into(),
        ));
    }
    let (rho, w_rho) = gauss_legendre(spec.n_radial, T::zero(), r);
    let two_pi = T::PI() + T::PI();
    match dim {
        2 => {
            let m = spec.n_angular;
            let dtheta = two_pi / T::from_usize(m).unwrap();
            let mut nodes = Vec::with_capacity(spec.n_radial * m);
            for (i, &ri) in rho.iter().enumerate() {
                for j in 0..m {
                    let theta = dtheta * T::from_usize(j).unwrap();
                    let (s, c) = theta.sin_cos();
                    nodes.push((vec![ri * c, ri * s], w_rho[i] * ri * dtheta));
                }
            }
            Ok(nodes)
        }
        3 => {
            let (u, w_u) = gauss_legendre(spec.n_polar, -T::one(), T::one());
            let m = spec.n_angular;
            let dphi = two_pi / T::from_usize(m).unwrap();
            let mut nodes = Vec::with_capacity(spec.n_radial * spec.n_polar * m);
            for (i, &ri) in rho.iter().enumerate() {
                for (k, &uk) in u.iter().enumerate() {
                    let sin_theta = (T::one() - uk * uk).max(T::zero()).sqrt();
                    for j in 0..m {
                        let phi = dphi * T::from_usize(j).unwrap();
                        let (sp, cp) = phi.sin_cos();
                        nodes.push((
                            vec![ri * sin_theta * cp, ri * sin_theta * sp, ri * uk],
                            w_rho[i] * ri * ri * w_u[k] * dphi,
                        ));
                    }
                }
            }
            Ok(nodes)
        }
        d => Err(CoreError::InvalidParameter(format!(
            "ball quadrature supports d = 2, 3 (got {d})"
        ))),
    }
}

/// Nodes `(point, weight)` of the normalized average over the sphere of
/// radius `radius` around `center`; weights sum to one.
pub fn sphere_average_nodes<T: Real>(
    center: &[T],
    radius: T,
    spec: &BallQuadSpec,
) -> Result<Vec<(Vec<T>, T)>> {
    let dim = center.len();
    let two_pi = T::PI() + T::PI();
    match dim {
        2 => {
            let m = spec.sphere_points.max(4);
            let w = T::one() / T::from_usize(m).unwrap();
            let dtheta = two_pi / T::from_usize(m).unwrap();
            Ok((0..m)
                .map(|j| {
                    let theta = dtheta * T::from_usize(j).unwrap();
                    let (s, c) = theta.sin_cos();
                    (vec![center[0] + radius * c, center[1] + radius * s], w)
                })
                .collect())
        }
        3 => {
            let n_u = ((spec.sphere_points as f64 / 2.0).sqrt().ceil() as usize).max(4);
            let m = 2 * n_u;
            let (u, w_u) = gauss_legendre(n_u, -T::one(), T::one());
            let w_phi = T::one() / T::from_usize(m).unwrap();
            let dphi = two_pi / T::from_usize(m).unwrap();
            let mut nodes = Vec::with_capacity(n_u * m);
            for (k, &uk) in u.iter().enumerate() {
                let sin_theta = (T::one() - uk * uk).max(T::zero()).sqrt();
                // int_{-1}^{1} du = 2, so the normalized weight is w_u / 2
                let w = w_u[k] * T::of(0.5) * w_phi;
                for j in 0..m {
                    let phi = dphi * T::from_usize(j).unwrap();
                    let (sp, cp) = phi.sin_cos();
                    nodes.push((
                        vec![
                            center[0] + radius * sin_theta * cp,
                            center[1] + radius * sin_theta * sp,
                            center[2] + radius * uk,
                        ],
                        w,
                    ));
                }
            }
            Ok(nodes)
        }
        d => Err(CoreError::InvalidParameter(format!(
            "sphere average supports d = 2, 3 (got {d})"
        ))),
    }
}

/// How a quadrature node obtains its spectral value.
#[derive(Clone, Debug)]
pub enum NodeKind<T> {
    /// Direct inversion at the node's own probe point.
    Outside { target: usize },
    /// Average of the two slab-boundary targets.
    InsidePair { minus: usize, plus: usize },
    /// Weighted sphere average; weights sum to one.
    InsideLattice { sphere: Vec<(usize, T)> },
}

/// One quadrature node of the reconstruction integral.
#[derive(Clone, Debug)]
pub struct PlanNode<T> {
    pub p: Vec<T>,
    pub weight: T,
    pub kind: NodeKind<T>,
}

/// Quadrature plan for one energy: the node set with region classification
/// and the deduplicated list of probe targets the dataset must cover.
#[derive(Clone, Debug)]
pub struct ReconPlan<T> {
    pub energy: T,
    pub radius: T,
    pub epsilon: Option<T>,
    pub nodes: Vec<PlanNode<T>>,
    pub targets: Vec<Vec<T>>,
    pub nodes_outside: usize,
    pub nodes_inside: usize,
    /// Regularization targets that left the probe ball and were clamped.
    pub clamped_targets: usize,
}

struct TargetSet<T> {
    targets: Vec<Vec<T>>,
    index: HashMap<Vec<u64>, usize>,
    probe_limit: T,
    clamped: usize,
}

impl<T: Real> TargetSet<T> {
    fn new(probe_limit: T) -> Self {
        Self {
            targets: Vec::new(),
            index: HashMap::new(),
            probe_limit,
            clamped: 0,
        }
    }

    /// Intern a probe point, clamping it radially into the probe ball if a
    /// regularization offset pushed it out.
    fn intern(&mut self, p: Vec<T>) -> usize {
        let norm = vecn::norm(&p);
        let p = if norm > self.probe_limit {
            self.clamped += 1;
            log::warn!(
                "regularization target |p| = {} clamped to probe ball {}",
                norm.as_f64(),
                self.probe_limit.as_f64()
            );
            vecn::scale(&p, self.probe_limit / norm)
        } else {
            p
        };
        let key = vecn::bit_key(&p);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.targets.len();
        self.index.insert(key, i);
        self.targets.push(p);
        i
    }
}

/// Build the quadrature plan for a reconstruction at one energy.
///
/// Every spectral value the reconstruction needs — node points, slab-boundary
/// points, sphere nodes — appears in `targets`, so the dataset generator can
/// sample them as first-class probe points and no interpolation ever happens.
pub fn plan_reconstruction<T: Real>(
    config: &ReconConfig<T>,
    kind: &FamilyKind<T>,
    energy: T,
    quad: &BallQuadSpec,
) -> Result<ReconPlan<T>> {
    config.validate()?;
    if !config.theorem.compatible_with(kind) {
        return Err(CoreError::Config(format!(
            "theorem {} incompatible with family mode",
            config.theorem.label()
        )));
    }
    let radius = config.radius(energy);
    let probe_limit = T::of(2.0) * Float::sqrt(energy);
    if radius > probe_limit {
        return Err(CoreError::Config(format!(
            "cutoff radius {} exceeds probe ball {} at E = {}",
            radius.as_f64(),
            probe_limit.as_f64(),
            energy.as_f64()
        )));
    }
    let epsilon = config.epsilon(energy);
    let zero_set = match config.theorem {
        Theorem::T2 | Theorem::T3 => ZeroSetModel::for_family(kind, epsilon)?,
        _ => ZeroSetModel::None,
    };

    let raw_nodes = ball_nodes(config.dim, radius, quad)?;
    let mut set = TargetSet::new(probe_limit);
    let mut nodes = Vec::with_capacity(raw_nodes.len());
    let mut n_outside = 0usize;
    let mut n_inside = 0usize;

    for (p, weight) in raw_nodes {
        let node_kind = match zero_set.classify(&p) {
            Location::Outside => {
                n_outside += 1;
                NodeKind::Outside {
                    target: set.intern(p.clone()),
                }
            }
            Location::InsidePair { z, p_perp } => {
                n_inside += 1;
                let (minus, plus) = zero_set.pair_targets(z, &p_perp)?;
                NodeKind::InsidePair {
                    minus: set.intern(minus),
                    plus: set.intern(plus),
                }
            }
            Location::InsideLattice { z } => {
                n_inside += 1;
                let center = zero_set.lattice_center(&z)?;
                let eps = epsilon.expect("lattice classification implies epsilon");
                let s = match kind {
                    FamilyKind::Lattice { s } => *s,
                    _ => unreachable!("lattice location implies lattice family"),
                };
                let sphere = sphere_average_nodes(&center, eps / s, quad)?
                    .into_iter()
                    .map(|(node, w)| (set.intern(node), w))
                    .collect();
                NodeKind::InsideLattice { sphere }
            }
        };
        nodes.push(PlanNode {
            p,
            weight,
            kind: node_kind,
        });
    }

    Ok(ReconPlan {
        energy,
        radius,
        epsilon,
        nodes,
        targets: set.targets,
        nodes_outside: n_outside,
        nodes_inside: n_inside,
        clamped_targets: set.clamped,
    })
}
