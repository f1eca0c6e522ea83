use crate::error::{CoreError, Result};
use crate::scalar::Real;
use crate::scatterers::FamilyKind;
use crate::vecn;

/// Zero set of the family determinant with its open `epsilon`-neighborhood.
///
/// * translate pair: `Z = { p : p.y in pi Z }`, inside iff `|p.y - pi z| < eps`
///   for the unique integer `z`;
/// * lattice: `Z = (pi/s) Z^d`, inside iff `|s p - pi z|_2 < eps` for the
///   unique tuple `z`;
/// * reference pair: empty.
///
/// Membership is strict, so points exactly on the boundary classify as
/// outside, matching the open neighborhood.
#[derive(Clone, Debug)]
pub enum ZeroSetModel<T> {
    None,
    Pair { y: Vec<T>, epsilon: T },
    Lattice { s: T, epsilon: T },
}

/// Classification of a frequency point against the zero set.
#[derive(Clone, Debug, PartialEq)]
pub enum Location<T> {
    Outside,
    /// Inside the slab around `p.y = pi z`; carries the slab index and the
    /// component of `p` orthogonal to `y`.
    InsidePair { z: i64, p_perp: Vec<T> },
    /// Inside the ball of radius `eps/s` around the lattice point `(pi/s) z`.
    InsideLattice { z: Vec<i64> },
}

impl<T: Real> ZeroSetModel<T> {
    /// Model for a family. `epsilon` is required (and must be in `(0, 1)`)
    /// for the translate pair and lattice modes.
    pub fn for_family(kind: &FamilyKind<T>, epsilon: Option<T>) -> Result<Self> {
        match kind {
            FamilyKind::IwPair => Ok(ZeroSetModel::None),
            FamilyKind::TranslatePair { y } => {
                let epsilon = require_eps(epsilon)?;
                Ok(ZeroSetModel::Pair {
                    y: y.clone(),
                    epsilon,
                })
            }
            FamilyKind::Lattice { s } => {
                let epsilon = require_eps(epsilon)?;
                Ok(ZeroSetModel::Lattice { s: *s, epsilon })
            }
        }
    }

    pub fn epsilon(&self) -> Option<T> {
        match self {
            ZeroSetModel::None => None,
            ZeroSetModel::Pair { epsilon, .. } | ZeroSetModel::Lattice { epsilon, .. } => {
                Some(*epsilon)
            }
        }
    }

    pub fn classify(&self, p: &[T]) -> Location<T> {
        match self {
            ZeroSetModel::None => Location::Outside,
            ZeroSetModel::Pair { y, epsilon } => {
                let t = vecn::dot(p, y);
                let z = (t / T::PI()).round();
                if (t - T::PI() * z).abs() < *epsilon {
                    let y_norm_sq = vecn::norm_sq(y);
                    let p_perp = vecn::axpy(p, -(t / y_norm_sq), y);
                    Location::InsidePair {
                        z: z.to_i64().expect("slab index fits i64"),
                        p_perp,
                    }
                } else {
                    Location::Outside
                }
            }
            ZeroSetModel::Lattice { s, epsilon } => {
                let mut z = Vec::with_capacity(p.len());
                let mut dist_sq = T::zero();
                for &c in p {
                    let sc = *s * c;
                    let zi = (sc / T::PI()).round();
                    let d = sc - T::PI() * zi;
                    dist_sq += d * d;
                    z.push(zi.to_i64().expect("lattice index fits i64"));
                }
                if dist_sq.sqrt() < *epsilon {
                    Location::InsideLattice { z }
                } else {
                    Location::Outside
                }
            }
        }
    }

    /// The two slab-boundary evaluation points
    /// `p_pm = p_perp + (pi z +- eps) y / |y|^2` for an inside point.
    pub fn pair_targets(&self, z: i64, p_perp: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        match self {
            ZeroSetModel::Pair { y, epsilon } => {
                let y_norm_sq = vecn::norm_sq(y);
                let zt = T::from_i64(z).unwrap() * T::PI();
                let minus = vecn::axpy(p_perp, (zt - *epsilon) / y_norm_sq, y);
                let plus = vecn::axpy(p_perp, (zt + *epsilon) / y_norm_sq, y);
                Ok((minus, plus))
            }
            _ => Err(CoreError::InvalidParameter(
                "pair_targets requires a translate-pair zero set".into(),
            )),
        }
    }

    /// Center `(pi/s) z` of a lattice cell.
    pub fn lattice_center(&self, z: &[i64]) -> Result<Vec<T>> {
        match self {
            ZeroSetModel::Lattice { s, .. } => Ok(z
                .iter()
                .map(|&zi| T::PI() * T::from_i64(zi).unwrap() / *s)
                .collect()),
            _ => Err(CoreError::InvalidParameter(
                "lattice_center requires a lattice zero set".into(),
            )),
        }
    }
}

fn require_eps<T: Real>(epsilon: Option<T>) -> Result<T> {
    let eps = epsilon.ok_or_else(|| {
        CoreError::InvalidParameter("this zero-set model requires epsilon".into())
    })?;
    if !(eps > T::zero() && eps < T::one()) {
        return Err(CoreError::InvalidParameter(format!(
            "epsilon = {} must lie in (0, 1)",
            eps.as_f64()
        )));
    }
    Ok(eps)
}

/// The pair selector for the lattice family: the 1-based member index
/// `i'` in `{2, ..., d+1}` maximizing `|sin(s p_{i'-1})|` (smallest index on
/// ties). Defined away from `(pi/s) Z^d`.
pub fn lattice_pair_selector<T: Real>(p: &[T], s: T) -> usize {
    let mut best = 2usize;
    let mut best_val = (s * p[0]).sin().abs();
    for (i, &c) in p.iter().enumerate().skip(1) {
        let v = (s * c).sin().abs();
        if v > best_val {
            best_val = v;
            best = i + 2;
        }
    }
    best
}
