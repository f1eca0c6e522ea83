use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fields::fourier_transform;
use crate::scalar::Real;
use crate::scatterers::BackgroundScatterer;
use crate::vecn;

/// How the family members relate to the base scatterer.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind<T> {
    /// Two members: `w_1` and `w_2 = i w_1`. Determinant `|w_hat|^2`, no zeros.
    IwPair,
    /// Two members: `w_2(x) = w_1(x - y)`. Determinant `sin(p.y) |w_hat|^2`.
    TranslatePair { y: Vec<T> },
    /// `d + 1` members: `w_{j+1}(x) = w_1(x - s e_j)`. Common zeros `(pi/s) Z^d`.
    Lattice { s: T },
}

/// Placement request for [`make_family`].
#[derive(Clone, Debug)]
pub struct FamilySpec<T> {
    /// Translate of the first member.
    pub t1: Vec<T>,
    pub kind: FamilyKind<T>,
}

/// Closed form of the determinant, attached for cross-checks against the
/// numerically evaluated one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaProfile {
    /// `zeta(p) = |w_hat(p)|^2`
    ConstantPositive,
    /// `zeta(p) = sin(p.y) |w_hat(p)|^2`
    HyperplaneSine,
    /// `zeta_{1j}(p) = sin(s p_{j-1}) |w_hat(p)|^2`
    LatticeSine,
}

/// A validated family of background scatterers sharing one base kernel.
#[derive(Clone, Debug)]
pub struct BackgroundFamily<T> {
    kind: FamilyKind<T>,
    members: Vec<BackgroundScatterer<T>>,
    base_domain_gap: T,
    zeta_profile: ZetaProfile,
}

/// Assemble and validate a family from a base scatterer.
///
/// Every member's support ball must stay disjoint from the potential ball of
/// radius `domain_radius` at the origin.
pub fn make_family<T: Real>(
    base: BackgroundScatterer<T>,
    spec: FamilySpec<T>,
    domain_radius: T,
) -> Result<BackgroundFamily<T>> {
    let dim = base.dim();
    if spec.t1.len() != dim {
        return Err(CoreError::DimensionMismatch(
            "family translate dimension mismatch".into(),
        ));
    }
    let one = Complex::new(T::one(), T::zero());
    let i_unit = Complex::new(T::zero(), T::one());

    let (members, zeta_profile) = match &spec.kind {
        FamilyKind::IwPair => {
            let w1 = base.placed(spec.t1.clone(), one);
            let w2 = base.placed(spec.t1.clone(), i_unit);
            (vec![w1, w2], ZetaProfile::ConstantPositive)
        }
        FamilyKind::TranslatePair { y } => {
            if y.len() != dim {
                return Err(CoreError::DimensionMismatch(
                    "translate-pair offset dimension mismatch".into(),
                ));
            }
            if !(vecn::norm_sq(y) > T::zero()) {
                return Err(CoreError::InvalidParameter(
                    "translate-pair offset y must be nonzero".into(),
                ));
            }
            let w1 = base.placed(spec.t1.clone(), one);
            let w2 = base.placed(vecn::add(&spec.t1, y), one);
            (vec![w1, w2], ZetaProfile::HyperplaneSine)
        }
        FamilyKind::Lattice { s } => {
            if !(*s > T::zero()) {
                return Err(CoreError::InvalidParameter(
                    "lattice step s must be positive".into(),
                ));
            }
            let mut members = vec![base.placed(spec.t1.clone(), one)];
            for axis in 0..dim {
                let mut t = spec.t1.clone();
                t[axis] += *s;
                members.push(base.placed(t, one));
            }
            (members, ZetaProfile::LatticeSine)
        }
    };

    let mut gap = T::infinity();
    for member in &members {
        let g = vecn::norm(&member.translate) - member.omega_radius - domain_radius;
        if !(g > T::zero()) {
            return Err(CoreError::Geometry(format!(
                "background support at |T| = {} overlaps the potential ball (2r = {}, D = {})",
                vecn::norm(&member.translate).as_f64(),
                member.omega_radius.as_f64(),
                domain_radius.as_f64()
            )));
        }
        if g < gap {
            gap = g;
        }
    }

    Ok(BackgroundFamily {
        kind: spec.kind,
        members,
        base_domain_gap: gap,
        zeta_profile,
    })
}

impl<T: Real> BackgroundFamily<T> {
    #[inline]
    pub fn kind(&self) -> &FamilyKind<T> {
        &self.kind
    }

    #[inline]
    pub fn members(&self) -> &[BackgroundScatterer<T>] {
        &self.members
    }

    #[inline]
    pub fn base(&self) -> &BackgroundScatterer<T> {
        &self.members[0]
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.base().dim()
    }

    #[inline]
    pub fn base_domain_gap(&self) -> T {
        self.base_domain_gap
    }

    #[inline]
    pub fn zeta_profile(&self) -> ZetaProfile {
        self.zeta_profile
    }

    /// Number of members `m` (2 for pairs, d+1 for the lattice).
    #[inline]
    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    /// Numeric transform of the untranslated base kernel at each target.
    pub fn base_hat(&self, targets: &[Vec<T>]) -> Result<Vec<Complex<T>>> {
        Ok(fourier_transform(&self.base().field, targets)?.values)
    }

    /// Transform of the placed member `j` (0-based) given the base value at
    /// `p`: `w_hat_j(p) = phase_j * exp(i p.T_j) * w_hat(p)`.
    ///
    /// This equals the transform of the shifted sample set exactly, so the
    /// lattice phase algebra holds to rounding by construction.
    #[inline]
    pub fn member_hat(&self, j: usize, p: &[T], base_hat: Complex<T>) -> Complex<T> {
        let member = &self.members[j];
        let phase = Complex::from_polar(T::one(), vecn::dot(p, &member.translate));
        member.phase_factor * phase * base_hat
    }

    /// Numeric determinant `zeta` of the pair `(w_1, w_j)`, `pair >= 2`
    /// being the 1-based index of the second member.
    pub fn zeta_from_base(&self, pair: usize, p: &[T], base_hat: Complex<T>) -> Result<T> {
        if pair < 2 || pair > self.member_count() {
            return Err(CoreError::InvalidParameter(format!(
                "pair index {pair} outside 2..={}",
                self.member_count()
            )));
        }
        let w1 = self.member_hat(0, p, base_hat);
        let wj = self.member_hat(pair - 1, p, base_hat);
        Ok(w1.re * wj.im - w1.im * wj.re)
    }

    /// Analytic determinant from the attached [`ZetaProfile`].
    pub fn zeta_analytic(&self, pair: usize, p: &[T], base_hat_abs: T) -> Result<T> {
        if pair < 2 || pair > self.member_count() {
            return Err(CoreError::InvalidParameter(format!(
                "pair index {pair} outside 2..={}",
                self.member_count()
            )));
        }
        let sq = base_hat_abs * base_hat_abs;
        Ok(match (&self.kind, self.zeta_profile) {
            (FamilyKind::IwPair, ZetaProfile::ConstantPositive) => sq,
            (FamilyKind::TranslatePair { y }, ZetaProfile::HyperplaneSine) => {
                vecn::dot(p, y).sin() * sq
            }
            (FamilyKind::Lattice { s }, ZetaProfile::LatticeSine) => {
                (*s * p[pair - 2]).sin() * sq
            }
            _ => unreachable!("zeta profile always matches family kind"),
        })
    }

    /// Serializable provenance manifest.
    pub fn manifest(&self, base_field_sha256: &str) -> FamilyManifest {
        let base = self.base();
        let (mode, y, s) = match &self.kind {
            FamilyKind::IwPair => ("iw-pair".to_string(), None, None),
            FamilyKind::TranslatePair { y } => (
                "translate-pair".to_string(),
                Some(y.iter().map(|v| v.as_f64()).collect()),
                None,
            ),
            FamilyKind::Lattice { s } => ("lattice".to_string(), None, Some(s.as_f64())),
        };
        FamilyManifest {
            mode,
            nu: base.nu.as_f64(),
            q_radius: base.q_radius.as_f64(),
            q_amplitude: base.q_spec().amplitude.as_f64(),
            q_profile: base.q_spec().profile,
            beta: base.beta.as_f64(),
            c1: base.c1.as_f64(),
            translates: self
                .members
                .iter()
                .map(|m| m.translate.iter().map(|v| v.as_f64()).collect())
                .collect(),
            y,
            s,
            base_domain_gap: self.base_domain_gap.as_f64(),
            base_field_sha256: base_field_sha256.to_string(),
        }
    }
}

/// Numeric determinant of the pair `(w_1, w_j)` at a single point, from
/// freshly evaluated member transforms.
pub fn zeta<T: Real>(family: &BackgroundFamily<T>, pair: usize, p: &[T]) -> Result<T> {
    let base_hat = family.base_hat(std::slice::from_ref(&p.to_vec()))?[0];
    family.zeta_from_base(pair, p, base_hat)
}

/// Family provenance manifest (JSON interface).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub mode: String,
    pub nu: f64,
    pub q_radius: f64,
    pub q_amplitude: f64,
    pub q_profile: crate::scatterers::ProfileKind,
    pub beta: f64,
    pub c1: f64,
    pub translates: Vec<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub s: Option<f64>,
    pub base_domain_gap: f64,
    pub base_field_sha256: String,
}
