use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::fields::SampledField;
use crate::scalar::{Kahan, Real};

/// Spectral values at an arbitrary list of frequency points.
#[derive(Clone, Debug)]
pub struct SpectralSamples<T> {
    pub points: Vec<Vec<T>>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> SpectralSamples<T> {
    pub fn new(points: Vec<Vec<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(CoreError::DimensionMismatch(
                "spectral points and values differ in length".into(),
            ));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CoreError::NonFinite("spectral values".into()));
        }
        Ok(Self { points, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Forward transform `(2*pi)^{-d} * h^d * sum_x exp(i p.x) f(x)` evaluated at
/// each target `p` by direct summation over the nonzero samples.
///
/// Deterministic regardless of thread count: the sum over samples runs in a
/// fixed order per target with compensated accumulation, and only the targets
/// are parallelized.
pub fn fourier_transform<T: Real>(
    field: &SampledField<T>,
    targets: &[Vec<T>],
) -> Result<SpectralSamples<T>> {
    if targets.is_empty() {
        return Ok(SpectralSamples {
            points: Vec::new(),
            values: Vec::new(),
        });
    }
    let d = field.grid().dim;
    for p in targets {
        if p.len() != d {
            return Err(CoreError::DimensionMismatch(format!(
                "target has {} coordinates, field dim is {}",
                p.len(),
                d
            )));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(CoreError::NonFinite("fourier target".into()));
        }
    }
    if field
        .values()
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(CoreError::NonFinite("field samples".into()));
    }

    let (xs, vals) = field.support_samples();
    let norm = norm_factor::<T>(d) * field.grid().cell_volume();

    let values: Vec<Complex<T>> = targets
        .par_iter()
        .map(|p| nudft_at(&xs, &vals, p, d) * norm)
        .collect();

    Ok(SpectralSamples {
        points: targets.to_vec(),
        values,
    })
}

/// `(2*pi)^{-d}` as a scalar.
pub fn norm_factor<T: Real>(d: usize) -> T {
    let two_pi = T::PI() + T::PI();
    let mut f = T::one();
    for _ in 0..d {
        f /= two_pi;
    }
    f
}

#[inline]
fn nudft_at<T: Real>(xs: &[T], vals: &[Complex<T>], p: &[T], d: usize) -> Complex<T> {
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    match d {
        1 => {
            let p0 = p[0];
            for (i, v) in vals.iter().enumerate() {
                let (s, c) = (p0 * xs[i]).sin_cos();
                re.add(c * v.re - s * v.im);
                im.add(c * v.im + s * v.re);
            }
        }
        2 => {
            let (p0, p1) = (p[0], p[1]);
            for (i, v) in vals.iter().enumerate() {
                let phase = p0 * xs[2 * i] + p1 * xs[2 * i + 1];
                let (s, c) = phase.sin_cos();
                re.add(c * v.re - s * v.im);
                im.add(c * v.im + s * v.re);
            }
        }
        3 => {
            let (p0, p1, p2) = (p[0], p[1], p[2]);
            for (i, v) in vals.iter().enumerate() {
                let phase = p0 * xs[3 * i] + p1 * xs[3 * i + 1] + p2 * xs[3 * i + 2];
                let (s, c) = phase.sin_cos();
                re.add(c * v.re - s * v.im);
                im.add(c * v.im + s * v.re);
            }
        }
        _ => {
            for (i, v) in vals.iter().enumerate() {
                let phase = crate::vecn::dot(p, &xs[d * i..d * (i + 1)]);
                let (s, c) = phase.sin_cos();
                re.add(c * v.re - s * v.im);
                im.add(c * v.im + s * v.re);
            }
        }
    }
    Complex::new(re.value(), im.value())
}
