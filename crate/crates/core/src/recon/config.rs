use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Real;
use crate::scatterers::FamilyKind;

/// Which reconstruction formula to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// Phased data: truncated Fourier inversion of the complex amplitude.
    PhasedBaseline,
    /// Reference pair `w_2 = i w_1`: no zero set, single-region inversion.
    T1,
    /// Translate pair: slab zero set, boundary-midpoint regularization.
    T2,
    /// Lattice family: point zero set, sphere-average regularization.
    T3,
}

impl Theorem {
    pub fn label(self) -> &'static str {
        match self {
            Theorem::PhasedBaseline => "phased-baseline",
            Theorem::T1 => "t1",
            Theorem::T2 => "t2",
            Theorem::T3 => "t3",
        }
    }

    pub fn compatible_with<T>(self, kind: &FamilyKind<T>) -> bool {
        matches!(
            (self, kind),
            (Theorem::PhasedBaseline, _)
                | (Theorem::T1, FamilyKind::IwPair)
                | (Theorem::T2, FamilyKind::TranslatePair { .. })
                | (Theorem::T3, FamilyKind::Lattice { .. })
        )
    }
}

/// Reconstruction parameters. The decay exponent, cutoff radius and
/// zero-set width all follow from `(theorem, n, tau, beta, dim)`:
///
/// ```text
/// alpha_0 = (n-d) / (2 n)                      r(E)   = 2 tau E^{alpha/(n-d)}
/// alpha_1 = (n-d) / (2 (n + beta))             eps_2(E) = E^{-alpha_2 / 2}
/// alpha_2 = (n-d) / (2 (n + beta + (n-d)/2))   eps_3(E) = E^{-alpha_3 / (d+1)}
/// alpha_3 = (n-d) / (2 (n + beta + (n-d)/(d+1)))
/// ```
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReconConfig<T> {
    pub theorem: Theorem,
    /// Sobolev smoothness order, must exceed the dimension.
    pub n: usize,
    /// Cutoff scale, in `(0, 1]`.
    pub tau: T,
    /// Background decay exponent `beta = d + 2 nu`.
    pub beta: T,
    pub dim: usize,
}

impl<T: Real> ReconConfig<T> {
    pub fn new(theorem: Theorem, n: usize, tau: T, beta: T, dim: usize) -> Result<Self> {
        let config = Self {
            theorem,
            n,
            tau,
            beta,
            dim,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n <= self.dim {
            return Err(CoreError::Config(format!(
                "smoothness order n = {} must exceed dim = {}",
                self.n, self.dim
            )));
        }
        if !(self.tau > T::zero() && self.tau <= T::one()) {
            return Err(CoreError::Config("tau must lie in (0, 1]".into()));
        }
        if !(self.beta > T::zero()) {
            return Err(CoreError::Config("beta must be positive".into()));
        }
        if self.dim < 1 {
            return Err(CoreError::Config("dim must be >= 1".into()));
        }
        Ok(())
    }

    fn n_minus_d(&self) -> T {
        T::from_usize(self.n - self.dim).unwrap()
    }

    /// Decay exponent `alpha` of the configured theorem.
    pub fn alpha(&self) -> T {
        let nd = self.n_minus_d();
        let n = T::from_usize(self.n).unwrap();
        let two = T::of(2.0);
        match self.theorem {
            Theorem::PhasedBaseline => nd / (two * n),
            Theorem::T1 => nd / (two * (n + self.beta)),
            Theorem::T2 => nd / (two * (n + self.beta + nd / two)),
            Theorem::T3 => {
                let d1 = T::from_usize(self.dim + 1).unwrap();
                nd / (two * (n + self.beta + nd / d1))
            }
        }
    }

    /// Spectral cutoff radius `r(E) = 2 tau E^{alpha/(n-d)}`.
    pub fn radius(&self, energy: T) -> T {
        T::of(2.0) * self.tau * energy.powf(self.alpha() / self.n_minus_d())
    }

    /// Zero-set half-width: `eps_2(E) = E^{-alpha_2/2}` for the translate
    /// pair, `eps_3(E) = E^{-alpha_3/(d+1)}` for the lattice, none otherwise.
    pub fn epsilon(&self, energy: T) -> Option<T> {
        match self.theorem {
            Theorem::T2 => Some(energy.powf(-self.alpha() * T::of(0.5))),
            Theorem::T3 => {
                let d1 = T::from_usize(self.dim + 1).unwrap();
                Some(energy.powf(-self.alpha() / d1))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponents_at_reference_point() {
        // (d, n, beta) = (2, 3, 4): alpha_1 = 1/14, alpha_2 = 1/15, alpha_3 = 3/44
        let t1 = ReconConfig::new(Theorem::T1, 3, 1.0, 4.0, 2).unwrap();
        let t2 = ReconConfig::new(Theorem::T2, 3, 1.0, 4.0, 2).unwrap();
        let t3 = ReconConfig::new(Theorem::T3, 3, 1.0, 4.0, 2).unwrap();
        let base = ReconConfig::new(Theorem::PhasedBaseline, 3, 1.0, 4.0, 2).unwrap();
        assert_relative_eq!(t1.alpha(), 1.0 / 14.0, max_relative = 1e-15);
        assert_relative_eq!(t2.alpha(), 1.0 / 15.0, max_relative = 1e-15);
        assert_relative_eq!(t3.alpha(), 3.0 / 44.0, max_relative = 1e-15);
        assert_relative_eq!(base.alpha(), 1.0 / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn scaling_laws_are_exact() {
        let cfg = ReconConfig::new(Theorem::T2, 3, 0.7, 4.0, 2).unwrap();
        let alpha = cfg.alpha();
        let nd = 1.0;
        for &e in &[16.0, 64.0, 256.0] {
            let ratio = cfg.radius(4.0 * e) / cfg.radius(e);
            assert_relative_eq!(ratio, 4.0f64.powf(alpha / nd), max_relative = 1e-13);
            let eps_ratio = cfg.epsilon(4.0 * e).unwrap() / cfg.epsilon(e).unwrap();
            assert_relative_eq!(eps_ratio, 4.0f64.powf(-alpha / 2.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn exponent_ordering_over_parameter_grid() {
        // alpha_1 > alpha_2 and alpha_3 > alpha_2 for all n > d, beta > 0
        for dim in [2usize, 3] {
            for n in (dim + 1)..(dim + 6) {
                for beta_i in 1..=8 {
                    let beta = beta_i as f64 * 0.75;
                    let a1 = ReconConfig::new(Theorem::T1, n, 1.0, beta, dim)
                        .unwrap()
                        .alpha();
                    let a2 = ReconConfig::new(Theorem::T2, n, 1.0, beta, dim)
                        .unwrap()
                        .alpha();
                    let a3 = ReconConfig::new(Theorem::T3, n, 1.0, beta, dim)
                        .unwrap()
                        .alpha();
                    assert!(a1 > a2, "alpha_1 <= alpha_2 at n={n} beta={beta} d={dim}");
                    assert!(a3 > a2, "alpha_3 <= alpha_2 at n={n} beta={beta} d={dim}");
                }
            }
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ReconConfig::new(Theorem::T1, 2, 1.0, 4.0, 2).is_err());
        assert!(ReconConfig::new(Theorem::T1, 3, 0.0, 4.0, 2).is_err());
        assert!(ReconConfig::new(Theorem::T1, 3, 1.5, 4.0, 2).is_err());
        assert!(ReconConfig::new(Theorem::T1, 3, 1.0, -1.0, 2).is_err());
    }

    #[test]
    fn theorem_family_compatibility() {
        use crate::scatterers::FamilyKind;
        let iw: FamilyKind<f64> = FamilyKind::IwPair;
        let tp = FamilyKind::TranslatePair { y: vec![2.0, 0.0] };
        let lat = FamilyKind::Lattice { s: 2.0 };
        assert!(Theorem::T1.compatible_with(&iw));
        assert!(!Theorem::T1.compatible_with(&tp));
        assert!(Theorem::T2.compatible_with(&tp));
        assert!(!Theorem::T2.compatible_with(&lat));
        assert!(Theorem::T3.compatible_with(&lat));
        assert!(Theorem::PhasedBaseline.compatible_with(&iw));
        assert!(Theorem::PhasedBaseline.compatible_with(&lat));
    }
}
