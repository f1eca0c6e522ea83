//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over [`Real`], which extends
//! [`num_traits::Float`] with the handful of special functions the scattering
//! kernels need (cylinder Bessel functions and the gamma function). Concrete
//! work happens in `f64`; `f32` is supported for cheap smoke checks.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar with the special functions used by the scattering kernels.
pub trait Real:
    Float
    + FloatConst
    + NumAssignOps
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Bessel function of the first kind, order 0.
    fn bessel_j0(self) -> Self;
    /// Bessel function of the first kind, order 1.
    fn bessel_j1(self) -> Self;
    /// Bessel function of the second kind, order 0.
    fn bessel_y0(self) -> Self;
    /// Bessel function of the second kind, order 1.
    fn bessel_y1(self) -> Self;
    /// Gamma function.
    fn gamma(self) -> Self;

    /// Shorthand for converting an `f64` literal into `Self`.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Lossless-enough view as `f64` (exact for `f32` and `f64`).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f64 {
    #[inline]
    fn bessel_j0(self) -> Self {
        libm::j0(self)
    }
    #[inline]
    fn bessel_j1(self) -> Self {
        libm::j1(self)
    }
    #[inline]
    fn bessel_y0(self) -> Self {
        libm::y0(self)
    }
    #[inline]
    fn bessel_y1(self) -> Self {
        libm::y1(self)
    }
    #[inline]
    fn gamma(self) -> Self {
        libm::tgamma(self)
    }
}

impl Real for f32 {
    #[inline]
    fn bessel_j0(self) -> Self {
        libm::j0f(self)
    }
    #[inline]
    fn bessel_j1(self) -> Self {
        libm::j1f(self)
    }
    #[inline]
    fn bessel_y0(self) -> Self {
        libm::y0f(self)
    }
    #[inline]
    fn bessel_y1(self) -> Self {
        libm::y1f(self)
    }
    #[inline]
    fn gamma(self) -> Self {
        libm::tgammaf(self)
    }
}

/// Compensated (Kahan) accumulator.
///
/// The nonuniform Fourier sums cancel almost exactly for symmetric inputs;
/// plain summation leaves an O(eps * n) residue that violates the reality
/// and translation identities at the tolerances this crate promises.
#[derive(Clone, Copy, Debug)]
pub struct Kahan<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for Kahan<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> Kahan<T> {
    #[inline]
    pub fn add(&mut self, value: T) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(self) -> T {
        self.sum
    }
}
