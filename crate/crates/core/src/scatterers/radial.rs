use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::fields::special::gauss_legendre;
use crate::scalar::{Kahan, Real};
use crate::scatterers::BumpSpec;

/// Radial function tabulated on a uniform grid with natural cubic spline
/// interpolation. Evaluates to zero beyond the last radius.
#[derive(Clone, Debug)]
pub struct RadialTable<T> {
    r_max: T,
    step: T,
    values: Vec<T>,
    second_derivs: Vec<T>,
}

impl<T: Real> RadialTable<T> {
    pub fn from_samples(r_max: T, values: Vec<T>) -> Result<Self> {
        if values.len() < 4 {
            return Err(CoreError::InvalidParameter(
                "radial table needs at least 4 samples".into(),
            ));
        }
        if !(r_max > T::zero()) {
            return Err(CoreError::InvalidParameter(
                "radial table radius must be positive".into(),
            ));
        }
        let step = r_max / T::from_usize(values.len() - 1).unwrap();
        let second_derivs = natural_cubic_second_derivs(&values, step);
        Ok(Self {
            r_max,
            step,
            values,
            second_derivs,
        })
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    /// Spline evaluation at radius `t >= 0`.
    pub fn eval(&self, t: T) -> T {
        if t < T::zero() || t >= self.r_max {
            return T::zero();
        }
        let pos = t / self.step;
        let mut j = pos.floor().to_usize().unwrap_or(0);
        if j >= self.values.len() - 1 {
            j = self.values.len() - 2;
        }
        let jf = T::from_usize(j).unwrap();
        let a = jf + T::one() - pos;
        let b = T::one() - a;
        let h2_over_6 = self.step * self.step / T::of(6.0);
        a * self.values[j]
            + b * self.values[j + 1]
            + ((a * a * a - a) * self.second_derivs[j]
                + (b * b * b - b) * self.second_derivs[j + 1])
                * h2_over_6
    }
}

fn natural_cubic_second_derivs<T: Real>(y: &[T], h: T) -> Vec<T> {
    let n = y.len();
    let mut y2 = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let h2 = h * h;
    for i in 1..n - 1 {
        let sig = T::of(0.5);
        let p = sig * y2[i - 1] + T::of(2.0);
        y2[i] = (sig - T::one()) / p;
        let rhs = (y[i + 1] - y[i] - (y[i] - y[i - 1])) * (T::of(3.0) / h2);
        u[i] = (rhs - sig * u[i - 1]) / p;
    }
    for i in (1..n - 1).rev() {
        let next = y2[i + 1];
        y2[i] = y2[i] * next + u[i];
    }
    y2
}

/// Tabulate the self-convolution `(q * q)(x)` of a radial bump as a radial
/// profile on `[0, 2 r]`.
///
/// A radial factor keeps the convolution radial, so the integral reduces to
/// one radial and one angular quadrature per tabulated radius. Tabulating the
/// continuum function (instead of convolving on a fixed grid) lets every
/// solver grid sample the same background exactly.
pub fn self_convolution<T: Real>(
    spec: &BumpSpec<T>,
    dim: usize,
    table_len: usize,
) -> Result<RadialTable<T>> {
    if !(spec.radius > T::zero()) {
        return Err(CoreError::InvalidParameter(
            "self_convolution: radius must be positive".into(),
        ));
    }
    match dim {
        2 | 3 => {}
        _ => {
            return Err(CoreError::InvalidParameter(format!(
                "self_convolution supports d = 2, 3 (got {dim})"
            )))
        }
    }
    let r = spec.radius;
    let r_max = r + r;
    let n_len = table_len.max(64);
    let (rho_nodes, rho_weights) = gauss_legendre(96, T::zero(), r);

    let values: Vec<T> = (0..n_len)
        .into_par_iter()
        .map(|i| {
            let t = r_max * T::from_usize(i).unwrap() / T::from_usize(n_len - 1).unwrap();
            match dim {
                2 => conv_at_2d(spec, t, &rho_nodes, &rho_weights),
                _ => conv_at_3d(spec, t, &rho_nodes, &rho_weights),
            }
        })
        .collect();
    RadialTable::from_samples(r_max, values)
}

fn conv_at_2d<T: Real>(spec: &BumpSpec<T>, t: T, rho: &[T], w: &[T]) -> T {
    let m = 256usize;
    let dtheta = (T::PI() + T::PI()) / T::from_usize(m).unwrap();
    let mut outer = Kahan::default();
    for (i, &r_i) in rho.iter().enumerate() {
        let q_i = spec.eval_radial(r_i);
        if q_i == T::zero() {
            continue;
        }
        let mut inner = Kahan::default();
        for j in 0..m {
            let theta = dtheta * T::from_usize(j).unwrap();
            let dist2 = t * t + r_i * r_i - (t + t) * r_i * theta.cos();
            let dist = if dist2 > T::zero() {
                dist2.sqrt()
            } else {
                T::zero()
            };
            inner.add(spec.eval_radial(dist));
        }
        outer.add(w[i] * r_i * q_i * inner.value() * dtheta);
    }
    outer.value()
}

fn conv_at_3d<T: Real>(spec: &BumpSpec<T>, t: T, rho: &[T], w: &[T]) -> T {
    let (u_nodes, u_weights) = gauss_legendre(128, -T::one(), T::one());
    let two_pi = T::PI() + T::PI();
    let mut outer = Kahan::default();
    for (i, &r_i) in rho.iter().enumerate() {
        let q_i = spec.eval_radial(r_i);
        if q_i == T::zero() {
            continue;
        }
        let mut inner = Kahan::default();
        for (k, &u) in u_nodes.iter().enumerate() {
            let dist2 = t * t + r_i * r_i - (t + t) * r_i * u;
            let dist = if dist2 > T::zero() {
                dist2.sqrt()
            } else {
                T::zero()
            };
            inner.add(u_weights[k] * spec.eval_radial(dist));
        }
        outer.add(w[i] * r_i * r_i * q_i * inner.value());
    }
    two_pi * outer.value()
}
