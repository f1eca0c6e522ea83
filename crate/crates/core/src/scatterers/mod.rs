//! Construction of the unknown potential and the admissible background
//! scatterer families.
//!
//! A background is `w(x) = |x|^nu K_nu(|x|) (q * q)(x)` for an even, real,
//! compactly supported bump `q`. Its Fourier transform is real and bounded
//! below by `c1 (1 + |p|)^{-beta}` with `beta = d + 2 nu`, which is what makes
//! the phaseless 2x2 inversion well posed away from explicit zero sets.
//! Families come in three flavors: a member paired with `i` times itself
//! (determinant `|w_hat|^2`, no zeros), a translated pair (determinant
//! `sin(p.y) |w_hat|^2`, zeros on hyperplanes), and the `d+1`-member lattice
//! family (`w_{j+1} = w_1(. - s e_j)`, common zeros on `(pi/s) Z^d`).

mod background;
mod family;
mod profile;
mod radial;

pub use background::{build_background, BackgroundScatterer};
pub use family::{
    make_family, zeta, BackgroundFamily, FamilyKind, FamilyManifest, FamilySpec, ZetaProfile,
};
pub use profile::{build_bump, BumpSpec, Potential, ProfileKind};
pub use radial::{self_convolution, RadialTable};
