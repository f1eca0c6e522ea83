use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fields::{GridSpec, SampledField, SobolevBudget};
use crate::scalar::Real;
use crate::vecn;

/// Radial bump profiles on `[0, 1]`. Radial implies even, which is what the
/// background construction requires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// `exp(1 - 1/(1 - t^2))`: infinitely differentiable cutoff, value 1 at 0.
    Smooth,
    /// `cos^2(pi t / 2)`: cheaper, finitely smooth.
    Cosine2,
}

impl ProfileKind {
    /// Profile value at normalized radius `t >= 0` (zero for `t >= 1`).
    #[inline]
    pub fn eval<T: Real>(self, t: T) -> T {
        if t >= T::one() {
            return T::zero();
        }
        match self {
            ProfileKind::Smooth => {
                let t2 = t * t;
                (T::one() - T::one() / (T::one() - t2)).exp()
            }
            ProfileKind::Cosine2 => {
                let c = (T::PI() * t * T::of(0.5)).cos();
                c * c
            }
        }
    }
}

/// A scaled radial bump: `amplitude * profile(|x| / radius)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpSpec<T> {
    pub radius: T,
    pub profile: ProfileKind,
    pub amplitude: T,
}

impl<T: Real> BumpSpec<T> {
    pub fn new(radius: T, profile: ProfileKind, amplitude: T) -> Self {
        Self {
            radius,
            profile,
            amplitude,
        }
    }

    /// Continuum value at radius `t` (not normalized).
    #[inline]
    pub fn eval_radial(&self, t: T) -> T {
        if t > self.radius {
            T::zero()
        } else {
            self.amplitude * self.profile.eval(t / self.radius)
        }
    }

    /// Continuum value at a point.
    #[inline]
    pub fn eval(&self, x: &[T]) -> T {
        self.eval_radial(vecn::norm(x))
    }
}

/// Sample an even, real, compactly supported bump on a grid.
///
/// Rejects a vanishing amplitude: the background lemma requires `q != 0`.
pub fn build_bump<T: Real>(spec: &BumpSpec<T>, grid: &GridSpec<T>) -> Result<SampledField<T>> {
    if !(spec.radius > T::zero()) {
        return Err(CoreError::InvalidParameter(
            "bump radius must be positive".into(),
        ));
    }
    if spec.amplitude == T::zero() {
        return Err(CoreError::InvalidParameter(
            "bump amplitude must be nonzero (q != 0 required)".into(),
        ));
    }
    if spec.radius > grid.extent {
        return Err(CoreError::Geometry(
            "bump support exceeds the grid box".into(),
        ));
    }
    Ok(SampledField::from_fn(
        grid.clone(),
        Some(spec.radius),
        |x| Complex::new(spec.eval(x), T::zero()),
    ))
}

/// The unknown potential: a sampled field plus its domain ball and Sobolev
/// budget. Keeps the generating bump so forward solvers can sample the
/// continuum function on their own grids.
#[derive(Clone, Debug)]
pub struct Potential<T> {
    field: SampledField<T>,
    spec: BumpSpec<T>,
    domain_radius: T,
    budget: SobolevBudget<T>,
}

impl<T: Real> Potential<T> {
    /// Build a radial-bump potential. Amplitude zero is allowed (the zero
    /// potential is a legitimate experiment input).
    pub fn build(
        spec: BumpSpec<T>,
        grid: &GridSpec<T>,
        domain_radius: T,
        smoothness_n: usize,
    ) -> Result<Self> {
        if !(spec.radius > T::zero()) {
            return Err(CoreError::InvalidParameter(
                "potential radius must be positive".into(),
            ));
        }
        if spec.radius > domain_radius {
            return Err(CoreError::Geometry(
                "potential support exceeds its domain ball".into(),
            ));
        }
        if domain_radius > grid.extent {
            return Err(CoreError::Geometry(
                "potential domain exceeds the grid box".into(),
            ));
        }
        let field = SampledField::from_fn(grid.clone(), Some(spec.radius), |x| {
            Complex::new(spec.eval(x), T::zero())
        });
        let budget = SobolevBudget::measure(&field, smoothness_n)?;
        Ok(Self {
            field,
            spec,
            domain_radius,
            budget,
        })
    }

    #[inline]
    pub fn field(&self) -> &SampledField<T> {
        &self.field
    }

    #[inline]
    pub fn spec(&self) -> &BumpSpec<T> {
        &self.spec
    }

    #[inline]
    pub fn domain_radius(&self) -> T {
        self.domain_radius
    }

    #[inline]
    pub fn budget(&self) -> &SobolevBudget<T> {
        &self.budget
    }

    pub fn is_zero(&self) -> bool {
        self.spec.amplitude == T::zero()
    }

    /// Continuum value at a point (complex for interface uniformity).
    #[inline]
    pub fn evaluate(&self, x: &[T]) -> Complex<T> {
        Complex::new(self.spec.eval(x), T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_is_even_on_grid() {
        let grid = GridSpec::new(2, 1.5, 48).unwrap();
        let spec = BumpSpec::new(1.0, ProfileKind::Smooth, 1.0);
        let q = build_bump(&spec, &grid).unwrap();
        let n = grid.points;
        // mirror index of i is n - i for i >= 1 on an origin-centered grid
        for i0 in 1..n {
            for i1 in 1..n {
                let a = q.values()[i0 * n + i1];
                let b = q.values()[(n - i0) * n + (n - i1)];
                assert_eq!(a, b, "q(x) != q(-x) at index ({i0},{i1})");
            }
        }
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let grid = GridSpec::new(2, 2.0, 32).unwrap();
        let spec = BumpSpec::new(1.0, ProfileKind::Smooth, 2.5);
        let q = build_bump(&spec, &grid).unwrap();
        let mut x = vec![0.0f64; 2];
        for (flat, v) in q.values().iter().enumerate() {
            grid.coord(flat, &mut x);
            if (x[0] * x[0] + x[1] * x[1]).sqrt() > 1.0 {
                assert_eq!(v.re, 0.0);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn zero_amplitude_rejected_for_q() {
        let grid = GridSpec::new(2, 1.5, 16).unwrap();
        let spec = BumpSpec::new(1.0, ProfileKind::Smooth, 0.0);
        assert!(build_bump(&spec, &grid).is_err());
    }

    #[test]
    fn potential_allows_zero_amplitude() {
        let grid = GridSpec::new(2, 1.2, 32).unwrap();
        let spec = BumpSpec::new(1.0, ProfileKind::Smooth, 0.0);
        let v = Potential::build(spec, &grid, 1.0, 3).unwrap();
        assert!(v.is_zero());
        assert_eq!(v.budget().sup_bound, 0.0);
    }

    #[test]
    fn smooth_profile_normalization() {
        assert_relative_eq!(ProfileKind::Smooth.eval(0.0f64), 1.0, max_relative = 1e-15);
        assert_eq!(ProfileKind::Smooth.eval(1.0f64), 0.0);
        assert_eq!(ProfileKind::Cosine2.eval(1.0f64), 0.0);
    }
}
