//! Two-qubit initial states in the standard basis
//! `{|11⟩, |10⟩, |01⟩, |00⟩}` (matrix indices 0..4, qubit A first).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Complex};

/// Default absolute tolerance for [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;

const XSTATE_TOL: f64 = 1e-12;

/// Off-pattern positions of an X state (both triangles).
const NON_X: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (1, 0),
    (1, 3),
    (2, 0),
    (2, 3),
    (3, 1),
    (3, 2),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Pure part `α|01⟩ + β|10⟩`.
    Phi,
    /// Pure part `α|00⟩ + β|11⟩`.
    Psi,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::Phi, Family::Psi];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Phi => "phi",
            Family::Psi => "psi",
        }
    }
}

/// Extended Werner-like state `r|ψ⟩⟨ψ| + (1 − r)/4 · I₄`, with `α` real and
/// `β = √(1 − α²) e^{iδ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwlSpec {
    family: Family,
    r: f64,
    alpha: f64,
    delta: f64,
}

impl EwlSpec {
    pub fn new(family: Family, r: f64, alpha: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "purity r must lie in [0, 1], got {r}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "amplitude α must lie in [0, 1], got {alpha}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phase δ must be finite, got {delta}"
            )));
        }
        Ok(Self {
            family,
            r,
            alpha,
            delta: delta.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_alpha_sq(family: Family, r: f64, alpha_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(Error::InvalidParameter(format!(
                "α² must lie in [0, 1], got {alpha_sq}"
            )));
        }
        Self::new(family, r, alpha_sq.sqrt(), 0.0)
    }

    /// Werner-like state (`α = |β| = 1/√2`).
    pub fn werner(family: Family, r: f64) -> Result<Self> {
        Self::new(family, r, FRAC_1_SQRT_2, 0.0)
    }

    /// Bell-like pure state (`r = 1`).
    pub fn bell_like(family: Family, alpha: f64) -> Result<Self> {
        Self::new(family, 1.0, alpha, 0.0)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta_abs(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }

    pub fn beta(&self) -> Complex {
        Complex::from_polar(self.beta_abs(), self.delta)
    }

    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn with_r(self, r: f64) -> Result<Self> {
        Self::new(self.family, r, self.alpha, self.delta)
    }

    pub fn with_alpha_sq(self, alpha_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(Error::InvalidParameter(format!(
                "α² must lie in [0, 1], got {alpha_sq}"
            )));
        }
        Self::new(self.family, self.r, alpha_sq.sqrt(), self.delta)
    }

    pub fn to_xstate(&self) -> XState {
        let r = self.r;
        let q = (1.0 - r) / 4.0;
        let beta = self.beta();
        let b2 = self.beta_abs() * self.beta_abs();
        let a2 = self.alpha * self.alpha;
        let coherence = beta * (self.alpha * r);
        let zero = Complex::new(0.0, 0.0);
        match self.family {
            Family::Phi => XState {
                diag: [q, q + b2 * r, q + a2 * r, q],
                rho14: zero,
                rho23: coherence,
            },
            Family::Psi => XState {
                diag: [q + b2 * r, q, q, q + a2 * r],
                rho14: coherence,
                rho23: zero,
            },
        }
    }
}

/// Builds the 4×4 density matrix of an extended Werner-like state.
pub fn make_ewl(spec: &EwlSpec) -> DensityMatrix {
    spec.to_xstate().to_density()
}

/// Two-qubit state whose only nonzero entries are on the two diagonals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub diag: [f64; 4],
    pub rho14: Complex,
    pub rho23: Complex,
}

impl XState {
    pub fn new(diag: [f64; 4], rho14: Complex, rho23: Complex) -> Result<Self> {
        let x = Self { diag, rho14, rho23 };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.diag.iter().all(|d| d.is_finite())
            && [self.rho14, self.rho23]
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::InvalidState("non-finite X-state entry".into()));
        }
        if self.diag.iter().any(|&d| d < -XSTATE_TOL) {
            return Err(Error::InvalidState(format!(
                "negative population in {:?}",
                self.diag
            )));
        }
        let sum: f64 = self.diag.iter().sum();
        if (sum - 1.0).abs() > XSTATE_TOL {
            return Err(Error::InvalidState(format!("populations sum to {sum}")));
        }
        let [d1, d2, d3, d4] = self.diag;
        if self.rho14.norm_sqr() > d1 * d4 + XSTATE_TOL
            || self.rho23.norm_sqr() > d2 * d3 + XSTATE_TOL
        {
            return Err(Error::InvalidState("X-state coherence too large for PSD".into()));
        }
        Ok(())
    }

    /// Reads the X entries of `rho`; fails if any off-pattern entry exceeds `tol`.
    pub fn from_density(rho: &DensityMatrix, tol: f64) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho.dim(),
            });
        }
        if let Some(&(r, c)) = NON_X.iter().find(|&&(r, c)| rho.get(r, c).norm() > tol) {
            return Err(Error::InvalidState(format!(
                "entry ({r}, {c}) breaks the X pattern"
            )));
        }
        Ok(Self::from_density_unchecked(rho))
    }

    /// Reads the X entries without inspecting the off-pattern ones.
    pub(crate) fn from_density_unchecked(rho: &DensityMatrix) -> Self {
        Self {
            diag: [
                rho.get(0, 0).re,
                rho.get(1, 1).re,
                rho.get(2, 2).re,
                rho.get(3, 3).re,
            ],
            rho14: rho.get(0, 3),
            rho23: rho.get(1, 2),
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::from_real_diag(&self.diag);
        m[(0, 3)] = self.rho14;
        m[(3, 0)] = self.rho14.conj();
        m[(1, 2)] = self.rho23;
        m[(2, 1)] = self.rho23.conj();
        m
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(self.to_matrix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    X,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub kind: StateKind,
    pub werner_like: bool,
    pub bell_like: bool,
    pub product: bool,
}

/// Classifies a two-qubit state by structure.
///
/// `werner_like`: an EWL state with `α = |β| = 1/√2` (either family, any
/// phase). `bell_like`: a pure, entangled EWL state. `product`: equals the
/// tensor product of its marginals.
pub fn classify(rho: &DensityMatrix, tol: f64) -> Classification {
    let m = rho.matrix();
    let is_x = rho.dim() == 4 && NON_X.iter().all(|&(r, c)| m[(r, c)].norm() <= tol);
    let product = is_product(m, tol);
    if !is_x {
        return Classification {
            kind: StateKind::General,
            werner_like: false,
            bell_like: false,
            product,
        };
    }
    let x = XState::from_density_unchecked(rho);
    let [d1, d2, d3, d4] = x.diag;
    let close = |a: f64, b: f64| (a - b).abs() <= tol;

    // Φ family: ρ₁₁ = ρ₄₄ = (1−r)/4, ρ₁₄ = 0.
    let phi_r = 1.0 - 4.0 * d1;
    let phi = close(d1, d4) && x.rho14.norm() <= tol && (-tol..=1.0 + tol).contains(&phi_r);
    // Ψ family: ρ₂₂ = ρ₃₃ = (1−r)/4, ρ₂₃ = 0.
    let psi_r = 1.0 - 4.0 * d2;
    let psi = close(d2, d3) && x.rho23.norm() <= tol && (-tol..=1.0 + tol).contains(&psi_r);

    let werner_like = (phi
        && close(d2, d1 + phi_r / 2.0)
        && close(d3, d1 + phi_r / 2.0)
        && close(x.rho23.norm(), phi_r / 2.0))
        || (psi
            && close(d1, d2 + psi_r / 2.0)
            && close(d4, d2 + psi_r / 2.0)
            && close(x.rho14.norm(), psi_r / 2.0));

    let bell_like = (phi
        && close(phi_r, 1.0)
        && close(x.rho23.norm_sqr(), d2 * d3)
        && x.rho23.norm() > tol)
        || (psi
            && close(psi_r, 1.0)
            && close(x.rho14.norm_sqr(), d1 * d4)
            && x.rho14.norm() > tol);

    Classification {
        kind: StateKind::X,
        werner_like,
        bell_like,
        product,
    }
}

fn is_product(m: &CMatrix, tol: f64) -> bool {
    if m.dim() != 4 {
        return false;
    }
    let (Ok(a), Ok(b)) = (m.partial_trace(&[2, 2], &[1]), m.partial_trace(&[2, 2], &[0])) else {
        return false;
    };
    a.kron(&b).max_abs_diff(m) <= tol
}
