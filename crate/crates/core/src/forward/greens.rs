//! Outgoing Green's function of `-Delta - E` and its quadrature weights.
//!
//! The kernel has an integrable singularity on the diagonal; plain midpoint
//! weights there lose an order of accuracy, so the diagonal weight is the
//! exact integral of the kernel over a disc (d = 2) or ball (d = 3) of the
//! same volume as a grid cell.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::fields::special::{hankel0_out, hankel1_out};
use crate::scalar::Real;

/// Kernel value `G_E(x)` at distance `t > 0` for wavenumber `kappa = sqrt(E)`.
///
/// d = 2: `(i/4) H0^(1)(kappa t)`; d = 3: `exp(i kappa t) / (4 pi t)`.
#[inline]
pub fn greens_value<T: Real>(dim: usize, kappa: T, t: T) -> Complex<T> {
    match dim {
        2 => {
            let h = hankel0_out(kappa * t);
            Complex::new(-h.im, h.re) * T::of(0.25)
        }
        3 => {
            let (s, c) = (kappa * t).sin_cos();
            let scale = T::one() / (T::of(4.0) * T::PI() * t);
            Complex::new(c * scale, s * scale)
        }
        _ => unreachable!("greens_value supports d = 2, 3"),
    }
}

/// Integral of `G_E` over the disc/ball of the same volume as a grid cell,
/// used as the singularity-subtracted diagonal weight.
pub fn greens_cell_weight<T: Real>(dim: usize, kappa: T, h: T) -> Result<Complex<T>> {
    match dim {
        2 => {
            // equivalent disc radius: pi a^2 = h^2
            let a = h / T::PI().sqrt();
            let h1 = hankel1_out(kappa * a);
            let factor = T::PI() * a / (kappa + kappa);
            // (i pi a / (2 kappa)) H1(kappa a) - 1/kappa^2
            Ok(Complex::new(
                -factor * h1.im - T::one() / (kappa * kappa),
                factor * h1.re,
            ))
        }
        3 => {
            // equivalent ball radius: (4 pi / 3) a^3 = h^3
            let a = (T::of(3.0) * h * h * h / (T::of(4.0) * T::PI())).powf(T::of(1.0 / 3.0));
            let ka = kappa * a;
            let (s, c) = ka.sin_cos();
            let e = Complex::new(c, s);
            let one = Complex::new(T::one(), T::zero());
            // (exp(i kappa a)(1 - i kappa a) - 1) / kappa^2
            let val = (e * Complex::new(T::one(), -ka) - one) / (kappa * kappa);
            Ok(val)
        }
        d => Err(CoreError::InvalidParameter(format!(
            "forward solver supports d = 2, 3 (got {d})"
        ))),
    }
}
