use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Real;
use crate::vecn;

/// Probe geometry: the pair of wave vectors on the energy sphere with a
/// prescribed difference,
///
/// ```text
/// k_E(p) =  p/2 + (E - p^2/4)^{1/2} gamma(p),
/// l_E(p) = -p/2 + (E - p^2/4)^{1/2} gamma(p),
/// ```
///
/// where `gamma(p)` is a fixed piecewise-continuous unit field orthogonal to
/// `p`. Valid for `|p| <= 2 sqrt(E)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeGeometry<T> {
    pub dim: usize,
    pub energy: T,
}

impl<T: Real> ProbeGeometry<T> {
    pub fn new(dim: usize, energy: T) -> Result<Self> {
        if dim < 2 {
            return Err(CoreError::InvalidParameter(
                "probe geometry needs dim >= 2".into(),
            ));
        }
        if !(energy > T::zero()) {
            return Err(CoreError::InvalidParameter(
                "probe energy must be positive".into(),
            ));
        }
        Ok(Self { dim, energy })
    }

    /// The unit field `gamma(p)` with `gamma(p).p = 0`.
    ///
    /// In d = 2: `gamma(p) = (-p_2, p_1)/|p|`, `gamma(0) = (0, 1)`. In higher
    /// dimensions, Gram-Schmidt of the axis with the smallest `|p_j|` against
    /// `p`; the discontinuity set (argmin switches) has measure zero.
    pub fn gamma(&self, p: &[T]) -> Vec<T> {
        let d = self.dim;
        let norm_sq = vecn::norm_sq(p);
        if d == 2 {
            if norm_sq == T::zero() {
                return vec![T::zero(), T::one()];
            }
            let n = norm_sq.sqrt();
            return vec![-p[1] / n, p[0] / n];
        }
        if norm_sq == T::zero() {
            let mut g = vec![T::zero(); d];
            g[d - 1] = T::one();
            return g;
        }
        let mut j = 0;
        for i in 1..d {
            if p[i].abs() < p[j].abs() {
                j = i;
            }
        }
        let mut u: Vec<T> = p.iter().map(|&c| -c * p[j] / norm_sq).collect();
        u[j] += T::one();
        let n = vecn::norm(&u);
        u.iter().map(|&c| c / n).collect()
    }

    /// The probe pair `(k, l)` at `p`, with `k - l = p` exactly and
    /// `|k|^2 = |l|^2 = E` up to rounding.
    pub fn vectors(&self, p: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        if p.len() != self.dim {
            return Err(CoreError::DimensionMismatch(
                "probe point dimension mismatch".into(),
            ));
        }
        let p_sq = vecn::norm_sq(p);
        let four = T::of(4.0);
        let radicand = self.energy - p_sq / four;
        if radicand < T::zero() {
            return Err(CoreError::OutOfBall {
                p_norm: p_sq.sqrt().as_f64(),
                limit: 2.0 * self.energy.as_f64().sqrt(),
            });
        }
        let c = radicand.sqrt();
        let gamma = self.gamma(p);
        let half = T::of(0.5);
        let k: Vec<T> = p
            .iter()
            .zip(gamma.iter())
            .map(|(&pi, &gi)| pi * half + c * gi)
            .collect();
        let l: Vec<T> = p
            .iter()
            .zip(gamma.iter())
            .map(|(&pi, &gi)| -(pi * half) + c * gi)
            .collect();
        Ok((k, l))
    }
}

/// Free-function form of [`ProbeGeometry::vectors`].
pub fn probe_vectors<T: Real>(geom: &ProbeGeometry<T>, p: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    geom.vectors(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_p_collapses_to_gamma_direction() {
        let geom = ProbeGeometry::new(2, 100.0).unwrap();
        let (k, l) = geom.vectors(&[0.0, 0.0]).unwrap();
        assert_eq!(k, l);
        assert_relative_eq!(k[0], 0.0);
        assert_relative_eq!(k[1], 10.0);
    }

    #[test]
    fn boundary_p_gives_back_to_back_pair() {
        let geom = ProbeGeometry::new(2, 25.0).unwrap();
        let (k, l): (Vec<f64>, Vec<f64>) = geom.vectors(&[10.0, 0.0]).unwrap();
        assert_relative_eq!(k[0], 5.0, max_relative = 1e-14);
        assert!(k[1].abs() < 1e-7);
        assert_relative_eq!(l[0], -5.0, max_relative = 1e-14);
    }

    #[test]
    fn worked_example_d2() {
        // E = 100, p = (6, 0), gamma = (0, 1): k = (3, sqrt(91)), l = (-3, sqrt(91))
        let geom = ProbeGeometry::new(2, 100.0).unwrap();
        let (k, l) = geom.vectors(&[6.0, 0.0]).unwrap();
        assert_relative_eq!(k[0], 3.0, max_relative = 1e-15);
        assert_relative_eq!(k[1], 91.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(l[0], -3.0, max_relative = 1e-15);
        assert_relative_eq!(l[1], 91.0f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn energy_shell_and_difference_identities() {
        for dim in [2usize, 3] {
            let e = 64.0;
            let geom = ProbeGeometry::new(dim, e).unwrap();
            let ps: Vec<Vec<f64>> = match dim {
                2 => vec![vec![1.0, 2.0], vec![-3.0, 0.2], vec![0.0, 0.0]],
                _ => vec![vec![1.0, 2.0, -1.0], vec![0.0, 0.0, 3.0], vec![5.0, 0.0, 0.0]],
            };
            for p in ps {
                let g = geom.gamma(&p);
                assert_relative_eq!(crate::vecn::norm(&g), 1.0, max_relative = 1e-14);
                assert!(crate::vecn::dot(&g, &p).abs() <= 1e-14 * (1.0 + crate::vecn::norm(&p)));
                let (k, l) = geom.vectors(&p).unwrap();
                for i in 0..dim {
                    // exact up to one rounding of each component sum
                    assert_relative_eq!(k[i] - l[i], p[i], max_relative = 1e-13, epsilon = 1e-13);
                }
                assert_relative_eq!(crate::vecn::norm_sq(&k), e, max_relative = 1e-12);
                assert_relative_eq!(crate::vecn::norm_sq(&l), e, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn out_of_ball_rejected() {
        let geom = ProbeGeometry::new(2, 4.0).unwrap();
        assert!(matches!(
            geom.vectors(&[4.1, 0.0]),
            Err(CoreError::OutOfBall { .. })
        ));
    }
}
