//! Reconstruction of the potential from phaseless data.
//!
//! Away from the determinant zero set, the two intensity differences
//! `|f_j|^2 - |f_0|^2 - |w_hat_j|^2 = 2 Re(v_hat conj(w_hat_j))` form a 2x2
//! linear system for `(Re v_hat, Im v_hat)`; solving it per probe point gives
//! the spectral estimate `U(p, E)`. Inside the zero-set neighborhood the
//! system degenerates and `U` is replaced by a boundary-midpoint average
//! (translate pair) or a sphere average around the nearest lattice point
//! (lattice family). Configuration-space reconstructions integrate
//! `exp(-i p.x)` times the estimate over an energy-dependent ball whose
//! radius balances the Fourier tail of the potential against the `E^{-1/2}`
//! data error, which is what produces the `E^{-alpha}` rates.

mod budget;
mod config;
mod estimate;
mod quadrature;
mod reconstruct;
mod zeroset;

pub use budget::{error_budget, BudgetOptions, ErrorBudget};
pub use config::{ReconConfig, Theorem};
pub use estimate::{
    regularized_estimate_lattice, regularized_estimate_pair, spectral_estimate, SpectralEstimate,
    ZetaFloor,
};
pub use quadrature::{
    ball_nodes, plan_reconstruction, sphere_average_nodes, BallQuadSpec, NodeKind, PlanNode,
    ReconPlan,
};
pub use reconstruct::{reconstruct, x_grid_over_ball, QuadDiagnostics, ReconResult};
pub use zeroset::{lattice_pair_selector, Location, ZeroSetModel};
