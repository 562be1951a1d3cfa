//! Wootters concurrence.

use log::debug;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, Complex};
use crate::states::XState;

/// Eigenvalues of `ζ` above this (negative) value are treated as rounding
/// noise and clamped to zero.
pub const ZETA_CLAMP: f64 = -1e-8;

/// Largest imaginary part tolerated on an eigenvalue of `ζ`.
pub const ZETA_IMAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Concurrence> for f64 {
    fn from(c: Concurrence) -> f64 {
        c.0
    }
}

/// `σ_y ⊗ σ_y` in the standard basis.
fn sigma_yy() -> CMatrix {
    let mut m = CMatrix::zeros(4);
    m[(0, 3)] = Complex::new(-1.0, 0.0);
    m[(1, 2)] = Complex::new(1.0, 0.0);
    m[(2, 1)] = Complex::new(1.0, 0.0);
    m[(3, 0)] = Complex::new(-1.0, 0.0);
    m
}

/// `ζ = ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn zeta(rho: &DensityMatrix) -> CMatrix {
    let yy = sigma_yy();
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    rho.matrix() * &flipped
}

/// `√λ₁ − √λ₂ − √λ₃ − √λ₄` before clamping at zero.
pub fn concurrence_raw(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let eig = matrix::eigenvalues(&zeta(rho))?;
    let mut lambdas = Vec::with_capacity(4);
    for z in eig {
        if z.im.abs() > ZETA_IMAG_TOL {
            return Err(Error::InvalidState(format!(
                "ζ has a non-real eigenvalue {z}"
            )));
        }
        if z.re < ZETA_CLAMP {
            return Err(Error::InvalidState(format!(
                "ζ has a negative eigenvalue {:e}",
                z.re
            )));
        }
        lambdas.push(z.re.max(0.0));
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let roots: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    Ok(roots[0] - roots[1] - roots[2] - roots[3])
}

/// Concurrence of an arbitrary two-qubit state.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<Concurrence> {
    let raw = concurrence_raw(rho)?;
    if raw > 1.0 {
        debug!("raw concurrence {raw} above 1, clamping");
    }
    Ok(Concurrence(raw.clamp(0.0, 1.0)))
}

/// `K₁ = |ρ₂₃| − √(ρ₁₁ρ₄₄)` and `K₂ = |ρ₁₄| − √(ρ₂₂ρ₃₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTerms {
    pub k1: f64,
    pub k2: f64,
}

impl KTerms {
    /// `2 max{K₁, K₂}`, negative when the state is separable.
    pub fn signed(&self) -> f64 {
        2.0 * self.k1.max(self.k2)
    }
}

pub fn k_terms(x: &XState) -> KTerms {
    let [d1, d2, d3, d4] = x.diag;
    KTerms {
        k1: x.rho23.norm() - (d1 * d4).max(0.0).sqrt(),
        k2: x.rho14.norm() - (d2 * d3).max(0.0).sqrt(),
    }
}

/// Closed-form concurrence of an X state, `2 max{0, K₁, K₂}`.
pub fn concurrence_x(x: &XState) -> Concurrence {
    let k = k_terms(x);
    Concurrence((2.0 * 0f64.max(k.k1).max(k.k2)).min(1.0))
}

/// Concurrence of the EWL states at `t = 0`, `2 max{0, (α|β| + 1/4) r − 1/4}`.
pub fn initial_concurrence(r: f64, alpha: f64) -> Result<Concurrence> {
    if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "r = {r} and α = {alpha} must lie in [0, 1]"
        )));
    }
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    // Same operation order as the X-state route so both agree bit for bit.
    let q = (1.0 - r) / 4.0;
    let k = beta * (alpha * r) - q;
    Ok(Concurrence((2.0 * k.max(0.0)).min(1.0)))
}

/// Purity threshold `r* = 1/(1 + 4α|β|)` above which EWL states start
/// entangled.
pub fn r_star(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "α must lie in [0, 1], got {alpha}"
        )));
    }
    let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
    Ok(1.0 / (1.0 + 4.0 * alpha * beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_ewl, EwlSpec, Family};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_and_product() {
        let bell = make_ewl(&EwlSpec::bell_like(Family::Psi, FRAC_1_SQRT_2).unwrap());
        let c = concurrence_general(&bell).unwrap().value();
        assert!((c - 1.0).abs() < 1e-7, "{c}");
        let product =
            DensityMatrix::new(CMatrix::from_real_diag(&[0.0, 0.0, 1.0, 0.0]), 1e-12).unwrap();
        assert_eq!(concurrence_general(&product).unwrap().value(), 0.0);
    }

    #[test]
    fn werner_at_r_0_6() {
        for fam in Family::BOTH {
            let rho = make_ewl(&EwlSpec::werner(fam, 0.6).unwrap());
            let c = concurrence_general(&rho).unwrap().value();
            assert!((c - 0.4).abs() < 1e-10, "{c}");
            let cx = concurrence_x(&XState::from_density(&rho, 1e-12).unwrap()).value();
            assert!((cx - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_k_terms() {
        let x = XState::new([0.25; 4], Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)).unwrap();
        let k = k_terms(&x);
        assert_eq!((k.k1, k.k2), (-0.25, -0.25));
        assert_eq!(concurrence_x(&x).value(), 0.0);
    }

    #[test]
    fn initial_concurrence_values() {
        assert_eq!(initial_concurrence(1.0, FRAC_1_SQRT_2).unwrap().value(), 1.0);
        for alpha in [0.0f64, 0.3, 0.5, 0.8, 1.0] {
            let expected = 2.0 * alpha * (1.0 - alpha * alpha).sqrt();
            assert!((initial_concurrence(1.0, alpha).unwrap().value() - expected).abs() < 1e-15);
        }
        assert_eq!(initial_concurrence(1.0 / 3.0, FRAC_1_SQRT_2).unwrap().value(), 0.0);
        assert!(initial_concurrence(1.2, 0.5).is_err());
    }

    #[test]
    fn r_star_values() {
        assert!((r_star(FRAC_1_SQRT_2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r_star(0.0).unwrap(), 1.0);
        let a = (1.0f64 / 3.0).sqrt();
        let expected = 1.0 / (1.0 + 4.0 * 2f64.sqrt() / 3.0);
        assert!((r_star(a).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.346_546_206).abs() < 1e-9);
    }

    #[test]
    fn non_two_qubit_input_rejected() {
        let rho = DensityMatrix::new(CMatrix::from_real_diag(&[0.5, 0.5]), 1e-12).unwrap();
        assert!(matches!(
            concurrence_general(&rho),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn initial_matches_x_route_exactly(
            r in 0.0f64..=1.0,
            alpha in 0.0f64..=1.0,
            psi in any::<bool>(),
        ) {
            let fam = if psi { Family::Psi } else { Family::Phi };
            let spec = EwlSpec::new(fam, r, alpha, 0.0).unwrap();
            let via_x = concurrence_x(&spec.to_xstate()).value();
            prop_assert_eq!(via_x, initial_concurrence(r, alpha).unwrap().value());
        }

        #[test]
        fn delta_does_not_change_concurrence(
            r in 0.0f64..=1.0,
            alpha in 0.0f64..=1.0,
            delta in 0.0f64..std::f64::consts::TAU,
        ) {
            let a = concurrence_x(&EwlSpec::new(Family::Psi, r, alpha, 0.0).unwrap().to_xstate()).value();
            let b = concurrence_x(&EwlSpec::new(Family::Psi, r, alpha, delta).unwrap().to_xstate()).value();
            prop_assert!((a - b).abs() <= 1e-15);
        }

        #[test]
        fn initial_concurrence_monotone_in_r(alpha in 0.0f64..=1.0, r in 0.0f64..0.99) {
            let lo = initial_concurrence(r, alpha).unwrap().value();
            let hi = initial_concurrence(r + 0.01, alpha).unwrap().value();
            prop_assert!(hi >= lo);
            let best = initial_concurrence(r, FRAC_1_SQRT_2).unwrap().value();
            prop_assert!(best >= lo - 1e-15);
        }
    }
}
