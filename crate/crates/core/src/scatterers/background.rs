use std::sync::Arc;

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::fields::special::{bessel_k, gauss_legendre, kernel_transform_amplitude, omega_kernel};
use crate::fields::{fourier_transform, GridSpec, SampledField};
use crate::scalar::{Kahan, Real};
use crate::scatterers::{build_bump, self_convolution, BumpSpec, RadialTable};
use crate::vecn;

/// One admissible background scatterer `phase * w(x - T)` with
/// `w = omega_nu * (q * q)`.
///
/// `field` holds the untranslated, unphased `w` on its own grid; `translate`
/// and `phase_factor` place the member. The radial factors are kept so the
/// member can be sampled exactly on any forward-solver grid.
#[derive(Clone, Debug)]
pub struct BackgroundScatterer<T> {
    pub field: SampledField<T>,
    pub translate: Vec<T>,
    pub phase_factor: Complex<T>,
    pub nu: T,
    pub q_radius: T,
    pub beta: T,
    pub c1: T,
    pub omega_radius: T,
    q_spec: BumpSpec<T>,
    conv: Arc<RadialTable<T>>,
}

impl<T: Real> BackgroundScatterer<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.field.grid().dim
    }

    #[inline]
    pub fn q_spec(&self) -> &BumpSpec<T> {
        &self.q_spec
    }

    /// Untranslated radial profile `omega_nu(t) (q*q)(t)` for `t <= 2r`.
    pub fn base_radial(&self, t: T) -> T {
        if t > self.omega_radius {
            return T::zero();
        }
        let conv = self.conv.eval(t);
        if conv == T::zero() {
            return T::zero();
        }
        omega_kernel(self.nu, t).unwrap_or(T::zero()) * conv
    }

    /// Continuum value of the placed member at a point.
    pub fn evaluate(&self, x: &[T]) -> Complex<T> {
        let t = vecn::dist(x, &self.translate);
        self.phase_factor * Complex::new(self.base_radial(t), T::zero())
    }

    /// Member with a different placement/phase, sharing the radial tables.
    pub(crate) fn placed(&self, translate: Vec<T>, phase_factor: Complex<T>) -> Self {
        Self {
            field: self.field.clone(),
            translate,
            phase_factor,
            ..self.clone()
        }
    }
}

/// Build the background kernel from a bump `q` and order `nu`:
/// `w = omega_nu * (q * q)`, together with `beta = d + 2 nu` and the
/// certified lower-bound constant
/// `c1 = c12 / 2^{d + 2 nu} * integral_{|xi| <= 1} |q_hat(xi)|^2 dxi`.
pub fn build_background<T: Real>(
    q_spec: &BumpSpec<T>,
    nu: T,
    grid: &GridSpec<T>,
) -> Result<BackgroundScatterer<T>> {
    if !(nu > T::zero()) {
        return Err(CoreError::Domain("build_background: nu must be > 0".into()));
    }
    let q = build_bump(q_spec, grid)?;
    let r = q_spec.radius;
    let omega_radius = r + r;
    if grid.extent < omega_radius {
        return Err(CoreError::Geometry(
            "background support 2r exceeds the grid box".into(),
        ));
    }
    // the kernel varies on scale ~2r; an 8th of the bump radius is the
    // coarsest spacing that keeps its transform certificates meaningful
    if grid.spacing() > r / T::of(8.0) {
        return Err(CoreError::Resolution(format!(
            "grid spacing {} too coarse to resolve the kernel (need <= {})",
            grid.spacing().as_f64(),
            (r / T::of(8.0)).as_f64()
        )));
    }

    let dim = grid.dim;
    let conv = Arc::new(self_convolution(q_spec, dim, 2049)?);
    bessel_k(nu, T::of(0.5))?; // surface domain errors early

    let conv_ref = Arc::clone(&conv);
    let field = SampledField::from_fn(grid.clone(), Some(omega_radius), |x| {
        let t = vecn::norm(x);
        let c = conv_ref.eval(t);
        if c == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(omega_kernel(nu, t).unwrap_or(T::zero()) * c, T::zero())
        }
    });

    let c1 = lower_bound_constant(&q, dim, nu)?;
    let beta = T::from_usize(dim).unwrap() + nu + nu;

    Ok(BackgroundScatterer {
        field,
        translate: vec![T::zero(); dim],
        phase_factor: Complex::new(T::one(), T::zero()),
        nu,
        q_radius: r,
        beta,
        c1,
        omega_radius,
        q_spec: q_spec.clone(),
        conv,
    })
}

/// `c1(q, nu) = c12 / 2^{d + 2 nu} * integral_{|xi| <= 1} |q_hat|^2 d xi`,
/// evaluated by a tensor-product Gauss-Legendre rule masked to the unit ball.
fn lower_bound_constant<T: Real>(q: &SampledField<T>, dim: usize, nu: T) -> Result<T> {
    let n_axis = 64usize;
    let (nodes, weights) = gauss_legendre(n_axis, -T::one(), T::one());
    let mut targets = Vec::new();
    let mut target_weights = Vec::new();
    let mut idx = vec![0usize; dim];
    let total = n_axis.pow(dim as u32);
    for flat in 0..total {
        let mut rest = flat;
        for k in (0..dim).rev() {
            idx[k] = rest % n_axis;
            rest /= n_axis;
        }
        let xi: Vec<T> = idx.iter().map(|&i| nodes[i]).collect();
        if vecn::norm_sq(&xi) <= T::one() {
            let mut w = T::one();
            for &i in &idx {
                w *= weights[i];
            }
            targets.push(xi);
            target_weights.push(w);
        }
    }
    let q_hat = fourier_transform(q, &targets)?;
    let mut acc = Kahan::default();
    for (v, &w) in q_hat.values.iter().zip(target_weights.iter()) {
        acc.add(w * v.norm_sqr());
    }
    let c12 = kernel_transform_amplitude(dim, nu);
    let beta = T::from_usize(dim).unwrap() + nu + nu;
    Ok(c12 / T::of(2.0).powf(beta) * acc.value())
}
