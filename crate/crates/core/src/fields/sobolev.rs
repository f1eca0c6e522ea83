use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fields::SampledField;
use crate::scalar::{Kahan, Real};

/// Smoothness data of a potential: the order-`n` Sobolev norm
/// `max_{|J| <= n} || d^J v ||_{L1}`, its coordinate-weighted variants
/// `|| x_j v ||_{n,1}`, and the sup bound used by the scattering estimates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SobolevBudget<T> {
    pub n: usize,
    pub norm_n1: T,
    pub weighted_norms: Vec<T>,
    pub sup_bound: T,
    pub dim: usize,
}

impl<T: Real> SobolevBudget<T> {
    /// Measure all budget entries of a sampled field.
    pub fn measure(field: &SampledField<T>, n: usize) -> Result<Self> {
        let dim = field.grid().dim;
        let norm_n1 = sobolev_norm(field, n, None)?;
        let mut weighted_norms = Vec::with_capacity(dim);
        for axis in 0..dim {
            weighted_norms.push(sobolev_norm(field, n, Some(axis))?);
        }
        Ok(Self {
            n,
            norm_n1,
            weighted_norms,
            sup_bound: field.max_abs(),
            dim,
        })
    }

    pub fn max_weighted(&self) -> T {
        self.weighted_norms
            .iter()
            .copied()
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// `max_{|J| <= n} h^d sum |d^J f|` with centered second-order differences
/// (one-sided at the box boundary). With `weight_axis` set, the field is
/// first multiplied by the coordinate `x_j`.
///
/// The order is unsigned by construction, so the negative-order domain error
/// of the abstract operation is unrepresentable here.
pub fn sobolev_norm<T: Real>(
    field: &SampledField<T>,
    n: usize,
    weight_axis: Option<usize>,
) -> Result<T> {
    let grid = field.grid();
    let d = grid.dim;
    if let Some(axis) = weight_axis {
        if axis >= d {
            return Err(CoreError::InvalidParameter(format!(
                "weight axis {axis} out of range for dim {d}"
            )));
        }
    }
    if grid.points < 4 && n > 0 {
        return Err(CoreError::Resolution(
            "grid too coarse for finite differences".into(),
        ));
    }

    let mut base = field.values().to_vec();
    if let Some(axis) = weight_axis {
        let mut x = vec![T::zero(); d];
        for (flat, v) in base.iter_mut().enumerate() {
            grid.coord(flat, &mut x);
            *v = Complex::new(v.re * x[axis], v.im * x[axis]);
        }
    }

    let vol = grid.cell_volume();
    let mut best = T::zero();
    for order in multi_indices(d, n) {
        let mut work = base.clone();
        for (axis, &times) in order.iter().enumerate() {
            for _ in 0..times {
                work = axis_derivative(&work, grid.points, d, axis, grid.spacing());
            }
        }
        let mut acc = Kahan::default();
        for v in &work {
            acc.add(v.norm());
        }
        let l1 = acc.value() * vol;
        if l1 > best {
            best = l1;
        }
    }
    Ok(best)
}

/// All multi-indices `J` in `d` variables with `|J| <= n`.
fn multi_indices(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; d];
    fn rec(axis: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if axis == current.len() {
            out.push(current.clone());
            return;
        }
        for k in 0..=remaining {
            current[axis] = k;
            rec(axis + 1, remaining - k, current, out);
        }
        current[axis] = 0;
    }
    rec(0, n, &mut current, &mut out);
    out
}

fn axis_derivative<T: Real>(
    values: &[Complex<T>],
    points: usize,
    dim: usize,
    axis: usize,
    h: T,
) -> Vec<Complex<T>> {
    let stride = points.pow((dim - 1 - axis) as u32);
    let inv_2h = T::one() / (h + h);
    let n = values.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    let three = T::of(3.0);
    let four = T::of(4.0);
    for flat in 0..n {
        let i = (flat / stride) % points;
        let v = if i == 0 {
            // second-order forward difference
            (values[flat + stride] * four - values[flat] * three - values[flat + 2 * stride])
                * inv_2h
        } else if i == points - 1 {
            (values[flat] * three - values[flat - stride] * four + values[flat - 2 * stride])
                * inv_2h
        } else {
            (values[flat + stride] - values[flat - stride]) * inv_2h
        };
        out[flat] = v;
    }
    out
}
