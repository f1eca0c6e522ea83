use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Real;

/// Uniform origin-symmetric grid on the closed box `[-L, L]^d`.
///
/// The spacing `h = 2L / points` is identical across axes. With
/// `origin_centered = true` a sample sits exactly at the origin
/// (`x_i = (i - points/2) h`); otherwise samples sit at cell centers
/// (`x_i = -L + (i + 1/2) h`), which keeps the sample set symmetric under
/// `x -> -x` without an unpaired edge point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub dim: usize,
    pub extent: T,
    pub points: usize,
    pub origin_centered: bool,
}

impl<T: Real> GridSpec<T> {
    pub fn new(dim: usize, extent: T, points: usize) -> Result<Self> {
        Self::with_centering(dim, extent, points, true)
    }

    pub fn with_centering(
        dim: usize,
        extent: T,
        points: usize,
        origin_centered: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(CoreError::InvalidParameter("grid dim must be >= 1".into()));
        }
        if points < 2 {
            return Err(CoreError::InvalidParameter(
                "grid needs at least 2 points per axis".into(),
            ));
        }
        if !(extent > T::zero()) {
            return Err(CoreError::InvalidParameter(
                "grid extent must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            extent,
            points,
            origin_centered,
        })
    }

    /// Grid spacing, identical across axes.
    #[inline]
    pub fn spacing(&self) -> T {
        (self.extent + self.extent) / T::from_usize(self.points).unwrap()
    }

    /// Volume element `h^d`.
    #[inline]
    pub fn cell_volume(&self) -> T {
        let h = self.spacing();
        let mut v = T::one();
        for _ in 0..self.dim {
            v *= h;
        }
        v
    }

    /// Total number of samples `points^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `i` along one axis. Both variants are computed
    /// from integer numerators so that the sample set is exactly symmetric
    /// under negation in floating point.
    #[inline]
    pub fn axis_coord(&self, i: usize) -> T {
        let h = self.spacing();
        if self.origin_centered {
            (T::from_usize(i).unwrap() - T::from_usize(self.points / 2).unwrap()) * h
        } else {
            // -L + (i + 1/2) h == (2i + 1 - points) * h / 2
            T::from_isize(2 * i as isize + 1 - self.points as isize).unwrap() * h * T::of(0.5)
        }
    }

    /// Decompose a flat index (C order, axis 0 slowest) into per-axis indices.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for k in (0..self.dim).rev() {
            out[k] = flat % self.points;
            flat /= self.points;
        }
    }

    /// Coordinates of a flat index.
    pub fn coord(&self, flat: usize, out: &mut [T]) {
        let mut rest = flat;
        for k in (0..self.dim).rev() {
            let i = rest % self.points;
            rest /= self.points;
            out[k] = self.axis_coord(i);
        }
    }

    /// Emit a resolution warning when the spacing cannot resolve plane waves
    /// of energy `E` (rule of thumb: `h <= pi / (2 sqrt(E))`).
    pub fn check_wavelength(&self, energy: T) {
        let h = self.spacing().as_f64();
        let limit = std::f64::consts::PI / (2.0 * energy.as_f64().sqrt());
        if h > limit {
            log::warn!(
                "grid spacing {h:.4} exceeds the oscillation limit {limit:.4} at E = {}",
                energy.as_f64()
            );
        }
    }
}

/// Complex-valued function sampled on a [`GridSpec`].
///
/// When `support_radius` is set, every sample outside the ball of that radius
/// is exactly zero; the constructor enforces this.
#[derive(Clone, Debug)]
pub struct SampledField<T> {
    grid: GridSpec<T>,
    values: Vec<Complex<T>>,
    support_radius: Option<T>,
}

impl<T: Real> SampledField<T> {
    pub fn new(
        grid: GridSpec<T>,
        values: Vec<Complex<T>>,
        support_radius: Option<T>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::DimensionMismatch(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        let field = Self {
            grid,
            values,
            support_radius,
        };
        if let Some(radius) = support_radius {
            let mut x = vec![T::zero(); field.grid.dim];
            for (flat, v) in field.values.iter().enumerate() {
                if v.re != T::zero() || v.im != T::zero() {
                    field.grid.coord(flat, &mut x);
                    if crate::vecn::norm(&x) > radius {
                        return Err(CoreError::InvalidParameter(format!(
                            "sample at |x| = {} nonzero outside declared support radius {}",
                            crate::vecn::norm(&x).as_f64(),
                            radius.as_f64()
                        )));
                    }
                }
            }
        }
        Ok(field)
    }

    /// Sample a function on the grid. `support_radius`, when given, clamps
    /// samples outside the ball to exactly zero.
    pub fn from_fn(
        grid: GridSpec<T>,
        support_radius: Option<T>,
        f: impl Fn(&[T]) -> Complex<T>,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut x = vec![T::zero(); grid.dim];
        for flat in 0..grid.len() {
            grid.coord(flat, &mut x);
            let v = match support_radius {
                Some(r) if crate::vecn::norm(&x) > r => Complex::new(T::zero(), T::zero()),
                _ => f(&x),
            };
            values.push(v);
        }
        Self {
            grid,
            values,
            support_radius,
        }
    }

    pub fn zeros(grid: GridSpec<T>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex::new(T::zero(), T::zero()); n],
            support_radius: Some(T::zero()),
        }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn support_radius(&self) -> Option<T> {
        self.support_radius
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// `h^d * sum |v|` — the discrete L1 norm.
    pub fn l1(&self) -> T {
        let mut acc = crate::scalar::Kahan::default();
        for v in &self.values {
            acc.add(v.norm());
        }
        acc.value() * self.grid.cell_volume()
    }

    /// Collect the nonzero samples as flat coordinates plus values.
    ///
    /// Coordinates are interleaved (`d` entries per sample) to keep the
    /// Fourier inner loop cache-friendly.
    pub fn support_samples(&self) -> (Vec<T>, Vec<Complex<T>>) {
        let d = self.grid.dim;
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        let mut x = vec![T::zero(); d];
        for (flat, v) in self.values.iter().enumerate() {
            if v.re != T::zero() || v.im != T::zero() {
                self.grid.coord(flat, &mut x);
                xs.extend_from_slice(&x);
                vals.push(*v);
            }
        }
        (xs, vals)
    }

    /// Pointwise linear combination `a * self + b * other` on a shared grid.
    pub fn lin_comb(&self, a: Complex<T>, other: &Self, b: Complex<T>) -> Result<Self> {
        if self.grid != other.grid {
            return Err(CoreError::DimensionMismatch(
                "lin_comb requires identical grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        let support_radius = match (self.support_radius, other.support_radius) {
            (Some(r1), Some(r2)) => Some(if r1 > r2 { r1 } else { r2 }),
            _ => None,
        };
        Ok(Self {
            grid: self.grid.clone(),
            values,
            support_radius,
        })
    }

    /// Translate the sample set by an integer number of cells per axis,
    /// filling with zeros. Fails if nonzero samples would fall off the grid.
    pub fn translate_cells(&self, shift: &[isize]) -> Result<Self> {
        if shift.len() != self.grid.dim {
            return Err(CoreError::DimensionMismatch(
                "shift length must equal grid dim".into(),
            ));
        }
        let n = self.grid.points as isize;
        let d = self.grid.dim;
        let mut values = vec![Complex::new(T::zero(), T::zero()); self.values.len()];
        let mut idx = vec![0usize; d];
        for (flat, v) in self.values.iter().enumerate() {
            if v.re == T::zero() && v.im == T::zero() {
                continue;
            }
            self.grid.multi_index(flat, &mut idx);
            let mut target = 0usize;
            let mut ok = true;
            for k in 0..d {
                let j = idx[k] as isize + shift[k];
                if j < 0 || j >= n {
                    ok = false;
                    break;
                }
                target = target * self.grid.points + j as usize;
            }
            if !ok {
                return Err(CoreError::Geometry(
                    "translation pushes support off the grid".into(),
                ));
            }
            values[target] = *v;
        }
        let shift_norm = {
            let h = self.grid.spacing();
            let mut acc = T::zero();
            for &s in shift {
                let c = T::from_isize(s).unwrap() * h;
                acc += c * c;
            }
            acc.sqrt()
        };
        Ok(Self {
            grid: self.grid.clone(),
            values,
            support_radius: self.support_radius.map(|r| r + shift_norm),
        })
    }

    /// The translation vector corresponding to an integer cell shift.
    pub fn cell_shift_vector(&self, shift: &[isize]) -> Vec<T> {
        let h = self.grid.spacing();
        shift
            .iter()
            .map(|&s| T::from_isize(s).unwrap() * h)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coords_cover_box() {
        let g = GridSpec::<f64>::new(2, 1.0, 8).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.axis_coord(0), -1.0);
        assert_eq!(g.axis_coord(4), 0.0);
        assert_eq!(g.axis_coord(7), 0.75);
        assert_eq!(g.len(), 64);
    }

    #[test]
    fn cell_centered_grid_is_symmetric() {
        let g = GridSpec::<f64>::with_centering(1, 1.0, 6, false).unwrap();
        let xs: Vec<f64> = (0..6).map(|i| g.axis_coord(i)).collect();
        for i in 0..6 {
            assert_eq!(xs[i], -xs[5 - i]);
        }
    }

    #[test]
    fn support_clamp_enforced() {
        let g = GridSpec::<f64>::new(2, 2.0, 16).unwrap();
        let f = SampledField::from_fn(g.clone(), Some(1.0), |_| Complex::new(1.0, 0.0));
        let mut x = vec![0.0; 2];
        for (flat, v) in f.values().iter().enumerate() {
            f.grid().coord(flat, &mut x);
            if (x[0] * x[0] + x[1] * x[1]).sqrt() > 1.0 {
                assert_eq!(v.re, 0.0);
            }
        }
        // constructing with a violated support clamp must fail
        let bad = SampledField::new(g, vec![Complex::new(1.0, 0.0); 256], Some(0.5));
        assert!(bad.is_err());
    }

    #[test]
    fn translate_cells_round_trip() {
        let g = GridSpec::<f64>::new(2, 2.0, 16).unwrap();
        let f = SampledField::from_fn(g, Some(0.5), |x| {
            Complex::new(1.0 - (x[0] * x[0] + x[1] * x[1]), 0.0)
        });
        let shifted = f.translate_cells(&[3, -2]).unwrap();
        let back = shifted.translate_cells(&[-3, 2]).unwrap();
        for (a, b) in f.values().iter().zip(back.values().iter()) {
            assert_eq!(a, b);
        }
    }
}
