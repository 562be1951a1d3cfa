//! Closed-form single-qubit reduced dynamics for the three reservoir models.
//!
//! Each model yields the triple `(u, v, z)` that fixes the qubit map
//!
//! ```text
//! ρ₁₁(t) = u ρ₁₁(0) + v ρ₀₀(0)
//! ρ₀₀(t) = (1 − u) ρ₁₁(0) + (1 − v) ρ₀₀(0)
//! ρ₁₀(t) = z ρ₁₀(0)
//! ```
//!
//! Times passed to the model functions are physical times in the same unit
//! as `1/Γ`. Zero temperature is encoded as `x = ħω₀/k_BT = +∞`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::Complex;

/// Slack allowed on the `[0, 1]` ranges and the complete-positivity bound.
pub const UVZ_TOL: f64 = 1e-12;

/// Relative distance from `λ = 2Γ` inside which the critically damped
/// branch of the strong-coupling solution is used.
pub const CRITICAL_REL_TOL: f64 = 1e-9;

/// Temperatures with `x` below this are outside the low-temperature block's
/// intended domain.
pub const LOW_T_VALIDITY_X: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uvz {
    pub u: f64,
    pub v: f64,
    pub z: Complex,
}

impl Uvz {
    pub const IDENTITY: Uvz = Uvz {
        u: 1.0,
        v: 0.0,
        z: Complex::new(1.0, 0.0),
    };

    pub fn new(u: f64, v: f64, z: Complex) -> Self {
        Self { u, v, z }
    }

    /// `u(1 − v) − |z|²`; non-negative exactly when the map is completely
    /// positive.
    pub fn cp_margin(&self) -> f64 {
        self.u * (1.0 - self.v) - self.z.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.u.is_finite()
            && self.v.is_finite()
            && self.z.re.is_finite()
            && self.z.im.is_finite();
        if !finite {
            return Err(Error::InvalidParameter(format!(
                "non-finite (u, v, z) = ({}, {}, {})",
                self.u, self.v, self.z
            )));
        }
        let in_unit = |x: f64| (-UVZ_TOL..=1.0 + UVZ_TOL).contains(&x);
        if !in_unit(self.u) || !in_unit(self.v) {
            return Err(Error::InvalidParameter(format!(
                "u = {} and v = {} must lie in [0, 1]",
                self.u, self.v
            )));
        }
        if self.cp_margin() < -UVZ_TOL {
            return Err(Error::InvalidParameter(format!(
                "|z|² = {} exceeds u(1 − v) = {}",
                self.z.norm_sqr(),
                self.u * (1.0 - self.v)
            )));
        }
        Ok(())
    }
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t == f64::INFINITY {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Lorentzian-coupled reservoir at zero temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongCouplingParams {
    gamma: f64,
    lambda: f64,
}

impl StrongCouplingParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        check_rate("Γ", gamma)?;
        check_rate("λ", lambda)?;
        Ok(Self { gamma, lambda })
    }

    /// `Γ = 1`, `λ = ratio`.
    pub fn from_ratio(lambda_over_gamma: f64) -> Result<Self> {
        Self::new(1.0, lambda_over_gamma)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ratio(&self) -> f64 {
        self.lambda / self.gamma
    }

    /// `d = √(2Γλ − λ²)`, or `None` outside the oscillatory regime.
    pub fn oscillation_frequency(&self) -> Option<f64> {
        let d2 = 2.0 * self.gamma * self.lambda - self.lambda * self.lambda;
        (self.ratio() < 2.0 && d2 > 0.0).then(|| d2.sqrt())
    }

    fn require_oscillatory(&self) -> Result<f64> {
        self.oscillation_frequency()
            .ok_or(Error::NoZerosInWeakRegime {
                ratio: self.ratio(),
            })
    }
}

/// Thermal reservoir parameters. `x = ħω₀/k_BT`; `x = +∞` is `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    gamma: f64,
    omega0: f64,
    x: f64,
}

impl ThermalParams {
    pub fn new(gamma: f64, omega0: f64, x: f64) -> Result<Self> {
        check_rate("Γ", gamma)?;
        check_rate("ω₀", omega0)?;
        if x.is_nan() || x <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "x = ħω₀/k_BT must be positive, got {x}"
            )));
        }
        Ok(Self { gamma, omega0, x })
    }

    pub fn zero_temperature(gamma: f64, omega0: f64) -> Result<Self> {
        Self::new(gamma, omega0, f64::INFINITY)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `k_BT/ħω₀`; zero at `T = 0`.
    pub fn kt_over_hbar_omega0(&self) -> f64 {
        1.0 / self.x
    }

    /// Thermal mean photon number `n̄ = 1/(eˣ − 1)`.
    pub fn mean_photon_number(&self) -> f64 {
        1.0 / self.x.exp_m1()
    }

    /// Population relaxation rate `Γ(2n̄ + 1) = Γ coth(x/2)`.
    pub fn relaxation_rate(&self) -> f64 {
        self.gamma / (0.5 * self.x).tanh()
    }

    /// Stationary excited-state population `1/(eˣ + 1)`.
    pub fn equilibrium_excitation(&self) -> f64 {
        1.0 / (self.x.exp() + 1.0)
    }
}

/// Exact zero-temperature solution for the Lorentzian spectral density.
///
/// `v = 0` and `z = √u` for every `t`; `z` carries no `e^{−iω₀t}` factor
/// (interaction picture), which leaves concurrence unchanged.
pub fn strong_t0(p: &StrongCouplingParams, t: f64) -> Result<Uvz> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(Uvz::IDENTITY);
    }
    let u = strong_t0_u(p, t);
    Ok(Uvz::new(u, 0.0, Complex::new(u.sqrt(), 0.0)))
}

fn strong_t0_u(p: &StrongCouplingParams, t: f64) -> f64 {
    let (gamma, lambda) = (p.gamma, p.lambda);
    let detune = lambda - 2.0 * gamma;
    if detune.abs() <= CRITICAL_REL_TOL * gamma {
        let a = (-0.5 * lambda * t).exp() * (1.0 + 0.5 * lambda * t);
        return a * a;
    }
    if detune < 0.0 {
        let d = (2.0 * gamma * lambda - lambda * lambda).sqrt();
        let half = 0.5 * d * t;
        let g = half.cos() + (lambda / d) * half.sin();
        (-lambda * t).exp() * g * g
    } else {
        // cosh/sinh folded into decaying exponentials so large t stays finite.
        let db = (lambda * lambda - 2.0 * gamma * lambda).sqrt();
        let k = lambda / db;
        let a = 0.5
            * ((1.0 + k) * (0.5 * (db - lambda) * t).exp()
                + (1.0 - k) * (-0.5 * (db + lambda) * t).exp());
        a * a
    }
}

/// Zeros `t_n = (2/d)[nπ − arctan(d/λ)]` of the strong-coupling `u_t`.
pub fn u_zeros(p: &StrongCouplingParams, n: u32) -> Result<f64> {
    let d = p.require_oscillatory()?;
    if n == 0 {
        return Err(Error::InvalidParameter("zero index n must be ≥ 1".into()));
    }
    Ok((2.0 / d) * (f64::from(n) * PI - (d / p.lambda).atan()))
}

/// Spacing `Δt = 2π/d` between consecutive zeros of `u_t`.
pub fn zero_spacing(p: &StrongCouplingParams) -> Result<f64> {
    let d = p.require_oscillatory()?;
    Ok(2.0 * PI / d)
}

/// Lorentzian `J(ω) = (1/2π) Γλ² / ((ω₀ − ω)² + λ²)`.
pub fn spectral_density(omega: f64, p: &StrongCouplingParams, omega0: f64) -> f64 {
    let detune = omega0 - omega;
    p.gamma * p.lambda * p.lambda / (2.0 * PI * (detune * detune + p.lambda * p.lambda))
}

/// Exact solution of the thermal Lindblad equation; relaxes to the Gibbs
/// population `1/(eˣ + 1)`.
pub fn markovian_exact(p: &ThermalParams, t: f64) -> Result<Uvz> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(Uvz::IDENTITY);
    }
    let rate = p.relaxation_rate();
    let p_eq = p.equilibrium_excitation();
    let decay = (-rate * t).exp();
    let filled = -(-rate * t).exp_m1();
    Ok(Uvz::new(
        decay + p_eq * filled,
        p_eq * filled,
        Complex::from_polar((-0.5 * rate * t).exp(), -p.omega0 * t),
    ))
}

/// Low-temperature Markovian closed form together with a flag marking
/// evaluations outside its intended domain (`x < 3`). Its stationary
/// populations are `1/(eˣ − 1)`, which is unphysical at high temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowTEvaluation {
    pub uvz: Uvz,
    pub outside_validity: bool,
}

pub fn markovian_low_t_block(p: &ThermalParams, t: f64) -> Result<LowTEvaluation> {
    check_time(t)?;
    let outside_validity = p.x < LOW_T_VALIDITY_X;
    if t == 0.0 {
        return Ok(LowTEvaluation {
            uvz: Uvz::IDENTITY,
            outside_validity,
        });
    }
    let rate = p.relaxation_rate();
    let ex = (-p.x).exp();
    let decay = (-rate * t).exp();
    let u = (ex + decay * (1.0 - 2.0 * ex)) / (1.0 - ex);
    let v = ex / (1.0 - ex) * -(-rate * t).exp_m1();
    let z = Complex::from_polar((-0.5 * rate * t).exp(), -p.omega0 * t);
    Ok(LowTEvaluation {
        uvz: Uvz::new(u, v, z),
        outside_validity,
    })
}

/// Weak-coupling, low-temperature non-Markovian solution.
pub fn nonmark_weak_lowt(p: &ThermalParams, t: f64) -> Result<Uvz> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(Uvz::IDENTITY);
    }
    let ex = (-p.x).exp();
    let g = (-p.gamma * t).exp();
    let one_minus_g = -(-p.gamma * t).exp_m1();
    let denom = 1.0 - ex * g;
    let u = 1.0 - one_minus_g * (1.0 - ex) / (denom * denom);
    let v = ex * one_minus_g / denom;
    let z = Complex::from_polar(
        (1.0 - ex) / denom * (-0.5 * p.gamma * t).exp(),
        -p.omega0 * t,
    );
    Ok(Uvz::new(u, v, z))
}

/// A reservoir model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvModel {
    StrongT0(StrongCouplingParams),
    Markovian(ThermalParams),
    MarkovianLowTBlock(ThermalParams),
    NonMarkWeakLowT(ThermalParams),
}

impl EnvModel {
    pub fn gamma(&self) -> f64 {
        match self {
            EnvModel::StrongT0(p) => p.gamma,
            EnvModel::Markovian(p)
            | EnvModel::MarkovianLowTBlock(p)
            | EnvModel::NonMarkWeakLowT(p) => p.gamma,
        }
    }

    /// Command-line name of the model.
    pub fn name(&self) -> &'static str {
        match self {
            EnvModel::StrongT0(_) => "strong-t0",
            EnvModel::Markovian(_) => "markovian",
            EnvModel::MarkovianLowTBlock(_) => "markovian-paper-lowt",
            EnvModel::NonMarkWeakLowT(_) => "nonmark-weak-lowt",
        }
    }

    pub fn thermal(&self) -> Option<&ThermalParams> {
        match self {
            EnvModel::StrongT0(_) => None,
            EnvModel::Markovian(p)
            | EnvModel::MarkovianLowTBlock(p)
            | EnvModel::NonMarkWeakLowT(p) => Some(p),
        }
    }

    /// `(u, v, z)` at physical time `t`.
    pub fn uvz(&self, t: f64) -> Result<Uvz> {
        match self {
            EnvModel::StrongT0(p) => strong_t0(p, t),
            EnvModel::Markovian(p) => markovian_exact(p, t),
            EnvModel::MarkovianLowTBlock(p) => markovian_low_t_block(p, t).map(|e| e.uvz),
            EnvModel::NonMarkWeakLowT(p) => nonmark_weak_lowt(p, t),
        }
    }

    /// `(u, v, z)` at dimensionless time `Γt`.
    pub fn uvz_at(&self, gamma_t: f64) -> Result<Uvz> {
        self.uvz(gamma_t / self.gamma())
    }
}
