use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::fields::{fourier_transform, norm_factor, SampledField};
use crate::forward::ForwardSolution;
use crate::scalar::{Kahan, Real};
use crate::vecn;

/// Far-field amplitude extracted by the volume integral
/// `f(k, l) = (2 pi)^{-d} integral exp(-i l.x) v(x) psi^+(x, k) dx`.
///
/// The normalization is fixed so that the weak-scatterer limit reproduces
/// `v_hat(k - l)`.
pub fn scattering_amplitude<T: Real>(
    solution: &ForwardSolution<T>,
    scatterer: &SampledField<T>,
    l: &[T],
) -> Result<Complex<T>> {
    if scatterer.grid() != solution.psi_plus.grid() {
        return Err(CoreError::DimensionMismatch(
            "scatterer and solution live on different grids".into(),
        ));
    }
    let grid = scatterer.grid();
    let d = grid.dim;
    if l.len() != d {
        return Err(CoreError::DimensionMismatch(
            "outgoing vector dimension mismatch".into(),
        ));
    }
    let psi = solution.psi_plus.values();
    let norm = norm_factor::<T>(d) * grid.cell_volume();
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    let mut x = vec![T::zero(); d];
    for (flat, v) in scatterer.values().iter().enumerate() {
        if v.re == T::zero() && v.im == T::zero() {
            continue;
        }
        grid.coord(flat, &mut x);
        let (s, c) = (-vecn::dot(l, &x)).sin_cos();
        let term = Complex::new(c, s) * *v * psi[flat];
        re.add(term.re);
        im.add(term.im);
    }
    Ok(Complex::new(re.value(), im.value()) * norm)
}

/// Born amplitude: `f_born(k, l) = v_hat(k - l)`, a definitional alias for
/// the Fourier transform at `p = k - l`.
pub fn born_amplitude<T: Real>(
    potential: &SampledField<T>,
    k: &[T],
    l: &[T],
) -> Result<Complex<T>> {
    if k.len() != l.len() || k.len() != potential.grid().dim {
        return Err(CoreError::DimensionMismatch(
            "born_amplitude vector dimension mismatch".into(),
        ));
    }
    let p = vecn::sub(k, l);
    Ok(fourier_transform(potential, &[p])?.values[0])
}
