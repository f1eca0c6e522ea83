use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::fields::{GridSpec, SampledField};
use crate::forward::greens::{greens_cell_weight, greens_value};
use crate::scalar::{Kahan, Real};
use crate::vecn;

/// Total field at the support points together with the relative residual.
pub type SupportSolution<T> = (Vec<Complex<T>>, T);

/// Solver options. The residual is the relative algebraic residual of the
/// discretized integral equation at the support points.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<T> {
    pub residual_tol: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            residual_tol: T::of(1e-8),
        }
    }
}

/// Scattering solution for one incident direction.
#[derive(Clone, Debug)]
pub struct ForwardSolution<T> {
    /// Incident wave vector, `|k|^2 = E`.
    pub k: Vec<T>,
    /// Total field on the full solver grid.
    pub psi_plus: SampledField<T>,
    /// Relative linear-system residual at the support points.
    pub residual: T,
    /// Far-field asymptotic constant `c(d, |k|)`, stored for provenance.
    pub asymptotic_constant: Complex<T>,
    pub energy: T,
}

/// `c(d, kappa) = -pi i (-2 pi i)^{(d-1)/2} kappa^{(d-3)/2}` (principal branch).
pub fn asymptotic_constant<T: Real>(dim: usize, kappa: T) -> Complex<T> {
    let minus_two_pi_i = Complex::new(T::zero(), -(T::PI() + T::PI()));
    let half = T::from_usize(dim - 1).unwrap() * T::of(0.5);
    let base = minus_two_pi_i.powf(half);
    let minus_pi_i = Complex::new(T::zero(), -T::PI());
    minus_pi_i * base * Complex::new(kappa.powf(T::from_usize(dim).unwrap() * T::of(0.5) - T::of(1.5)), T::zero())
}

/// Dense Lippmann-Schwinger solver restricted to the scatterer support.
///
/// The integral equation
///
/// ```text
/// psi(x) = exp(i k.x) - integral G_E(x - x') v(x') psi(x') dx'
/// ```
///
/// closes on the support of `v`, so the linear system has one unknown per
/// nonzero sample rather than one per grid point. The system matrix depends
/// on the energy but not on `k`; one factorization serves every probe at a
/// given energy.
pub struct LsSolver<T: Real + RealField> {
    grid: GridSpec<T>,
    energy: T,
    kappa: T,
    positions: Vec<T>,
    flat_indices: Vec<usize>,
    potential: Vec<Complex<T>>,
    matrix: DMatrix<Complex<T>>,
    lu: nalgebra::linalg::LU<Complex<T>, nalgebra::Dyn, nalgebra::Dyn>,
    options: SolverOptions<T>,
}

impl<T: Real + RealField> LsSolver<T> {
    /// Assemble from a continuum scatterer evaluated at the grid points.
    pub fn assemble(
        grid: &GridSpec<T>,
        energy: T,
        scatterer: impl Fn(&[T]) -> Complex<T> + Sync,
        options: SolverOptions<T>,
    ) -> Result<Self> {
        Self::assemble_impl(grid, energy, |_, x| scatterer(x), options)
    }

    /// Assemble directly from a sampled field (solver grid = field grid).
    pub fn assemble_from_field(
        field: &SampledField<T>,
        energy: T,
        options: SolverOptions<T>,
    ) -> Result<Self> {
        let values = field.values();
        Self::assemble_impl(field.grid(), energy, |flat, _| values[flat], options)
    }

    fn assemble_impl(
        grid: &GridSpec<T>,
        energy: T,
        eval: impl Fn(usize, &[T]) -> Complex<T>,
        options: SolverOptions<T>,
    ) -> Result<Self> {
        if grid.dim != 2 && grid.dim != 3 {
            return Err(CoreError::InvalidParameter(
                "forward solver supports d = 2, 3".into(),
            ));
        }
        if !(energy > T::zero()) {
            return Err(CoreError::InvalidParameter(
                "solver energy must be positive".into(),
            ));
        }
        grid.check_wavelength(energy);
        let d = grid.dim;
        let mut positions = Vec::new();
        let mut flat_indices = Vec::new();
        let mut potential = Vec::new();
        let mut x = vec![T::zero(); d];
        for flat in 0..grid.len() {
            grid.coord(flat, &mut x);
            let v = eval(flat, &x);
            if v.re != T::zero() || v.im != T::zero() {
                if !Float::is_finite(v.re) || !Float::is_finite(v.im) {
                    return Err(CoreError::NonFinite("scatterer sample".into()));
                }
                positions.extend_from_slice(&x);
                flat_indices.push(flat);
                potential.push(v);
            }
        }
        let n = potential.len();
        let kappa = Float::sqrt(energy);
        let cell = grid.cell_volume();
        let diag_weight = greens_cell_weight(d, kappa, grid.spacing())?;

        // column-major fill: column j couples every point to source x_j
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        data.par_chunks_mut(n.max(1))
            .enumerate()
            .for_each(|(j, column)| {
                let xj = &positions[d * j..d * (j + 1)];
                let vj = potential[j];
                for (i, slot) in column.iter_mut().enumerate() {
                    let xi = &positions[d * i..d * (i + 1)];
                    let w = if i == j {
                        diag_weight
                    } else {
                        greens_value(d, kappa, vecn::dist(xi, xj)) * cell
                    };
                    *slot = w * vj;
                    if i == j {
                        *slot += Complex::new(T::one(), T::zero());
                    }
                }
            });
        let matrix = DMatrix::from_vec(n, n, data);
        let lu = matrix.clone().lu();

        Ok(Self {
            grid: grid.clone(),
            energy,
            kappa,
            positions,
            flat_indices,
            potential,
            matrix,
            lu,
            options,
        })
    }

    pub fn support_len(&self) -> usize {
        self.potential.len()
    }

    pub fn energy(&self) -> T {
        self.energy
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    fn rhs_for(&self, k: &[T]) -> DVector<Complex<T>> {
        let d = self.grid.dim;
        let n = self.potential.len();
        DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let phase = vecn::dot(k, &self.positions[d * i..d * (i + 1)]);
                let (s, c) = Float::sin_cos(phase);
                Complex::new(c, s)
            }),
        )
    }

    fn residual_of(&self, psi: &DVector<Complex<T>>, rhs: &DVector<Complex<T>>) -> T {
        if self.potential.is_empty() {
            return T::zero();
        }
        let applied = &self.matrix * psi;
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..rhs.len() {
            num += (applied[i] - rhs[i]).norm_sqr();
            den += rhs[i].norm_sqr();
        }
        Float::sqrt(num / den)
    }

    /// Solve for one incident vector; returns the total field at the support
    /// points together with the relative residual.
    pub fn solve_support(&self, k: &[T]) -> Result<SupportSolution<T>> {
        if self.potential.is_empty() {
            return Ok((Vec::new(), T::zero()));
        }
        let rhs = self.rhs_for(k);
        let psi = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| CoreError::Solver("singular Lippmann-Schwinger system".into()))?;
        let residual = self.residual_of(&psi, &rhs);
        if residual > self.options.residual_tol {
            return Err(CoreError::Solver(format!(
                "residual {:.3e} above tolerance {:.3e}",
                residual.as_f64(),
                self.options.residual_tol.as_f64()
            )));
        }
        Ok((psi.as_slice().to_vec(), residual))
    }

    /// Solve for many incident vectors, reusing the factorization. Results
    /// are ordered like the input regardless of thread count.
    pub fn solve_support_many(&self, ks: &[Vec<T>]) -> Result<Vec<SupportSolution<T>>> {
        if self.potential.is_empty() {
            return Ok(ks.iter().map(|_| (Vec::new(), T::zero())).collect());
        }
        const CHUNK: usize = 32;
        let chunks: Vec<&[Vec<T>]> = ks.chunks(CHUNK).collect();
        let solved: Vec<Result<Vec<SupportSolution<T>>>> = chunks
            .par_iter()
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.len());
                for k in chunk.iter() {
                    let rhs = self.rhs_for(k);
                    let psi = self.lu.solve(&rhs).ok_or_else(|| {
                        CoreError::Solver("singular Lippmann-Schwinger system".into())
                    })?;
                    let residual = self.residual_of(&psi, &rhs);
                    out.push((psi.as_slice().to_vec(), residual));
                }
                Ok(out)
            })
            .collect();
        let mut flat = Vec::with_capacity(ks.len());
        for block in solved {
            flat.extend(block?);
        }
        Ok(flat)
    }

    /// Far-field amplitude `f(k, l) = (2 pi)^{-d} h^d sum exp(-i l.x) v(x) psi(x)`
    /// from a support solution.
    pub fn amplitude(&self, psi: &[Complex<T>], l: &[T]) -> Complex<T> {
        let d = self.grid.dim;
        let norm = crate::fields::norm_factor::<T>(d) * self.grid.cell_volume();
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (i, (&p, &v)) in psi.iter().zip(self.potential.iter()).enumerate() {
            let phase = -vecn::dot(l, &self.positions[d * i..d * (i + 1)]);
            let (s, c) = Float::sin_cos(phase);
            let term = Complex::new(c, s) * v * p;
            re.add(term.re);
            im.add(term.im);
        }
        Complex::new(re.value(), im.value()) * norm
    }

    /// Extend a support solution to the whole grid through the
    /// representation formula.
    pub fn extend_to_grid(&self, psi_supp: &[Complex<T>], k: &[T]) -> SampledField<T> {
        let d = self.grid.dim;
        let cell = self.grid.cell_volume();
        let diag = greens_cell_weight(d, self.kappa, self.grid.spacing()).expect("dims checked");
        let n_grid = self.grid.len();
        let sources: Vec<Complex<T>> = psi_supp
            .iter()
            .zip(self.potential.iter())
            .map(|(&p, &v)| p * v)
            .collect();
        let support_flat = &self.flat_indices;

        let values: Vec<Complex<T>> = (0..n_grid)
            .into_par_iter()
            .map(|flat| {
                let mut x = vec![T::zero(); d];
                self.grid.coord(flat, &mut x);
                let phase = vecn::dot(k, &x);
                let (s, c) = Float::sin_cos(phase);
                let mut acc = Complex::new(c, s);
                for (j, src) in sources.iter().enumerate() {
                    let xj = &self.positions[d * j..d * (j + 1)];
                    let w = if support_flat[j] == flat {
                        diag
                    } else {
                        greens_value(d, self.kappa, vecn::dist(&x, xj)) * cell
                    };
                    acc -= w * *src;
                }
                acc
            })
            .collect();
        SampledField::new(self.grid.clone(), values, None).expect("length matches grid")
    }
}

/// Solve the Lippmann-Schwinger equation for a sampled scatterer and one
/// incident wave vector `k` (energy `E = |k|^2`).
pub fn solve_lippmann_schwinger<T: Real + RealField>(
    scatterer: &SampledField<T>,
    k: &[T],
    options: SolverOptions<T>,
) -> Result<ForwardSolution<T>> {
    if k.len() != scatterer.grid().dim {
        return Err(CoreError::DimensionMismatch(
            "incident vector dimension mismatch".into(),
        ));
    }
    let energy = vecn::norm_sq(k);
    let solver = LsSolver::assemble_from_field(scatterer, energy, options)?;
    let (psi_supp, residual) = solver.solve_support(k)?;
    let psi_plus = solver.extend_to_grid(&psi_supp, k);
    Ok(ForwardSolution {
        k: k.to_vec(),
        psi_plus,
        residual,
        asymptotic_constant: asymptotic_constant(scatterer.grid().dim, Float::sqrt(energy)),
        energy,
    })
}
