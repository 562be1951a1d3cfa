//! Concurrence trajectories, sudden-death detection, dark periods and
//! parameter sweeps.
//!
//! Times are dimensionless `Γt` throughout.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::evolve_x;
use crate::entanglement::{concurrence_x, initial_concurrence, k_terms, r_star};
use crate::env::{EnvModel, StrongCouplingParams, ThermalParams};
use crate::error::{Error, Result};
use crate::states::{EwlSpec, Family, XState};

/// Concurrence at or below this value counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Width to which interval edges, minima and onsets are refined.
pub const REFINE_TOL: f64 = 1e-12;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// An environment model together with the initial state, both qubits
/// seeing the same reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    env: EnvModel,
    spec: EwlSpec,
    x0: XState,
}

impl Config {
    pub fn new(env: EnvModel, spec: EwlSpec) -> Self {
        Self {
            env,
            spec,
            x0: spec.to_xstate(),
        }
    }

    pub fn env(&self) -> &EnvModel {
        &self.env
    }

    pub fn spec(&self) -> &EwlSpec {
        &self.spec
    }

    pub fn with_family(&self, family: Family) -> Self {
        Self::new(self.env, self.spec.with_family(family))
    }

    /// Evolved state at `Γt`.
    pub fn state_at(&self, gamma_t: f64) -> Result<XState> {
        let q = self.env.uvz_at(gamma_t)?;
        Ok(evolve_x(&q, &q, &self.x0))
    }

    pub fn concurrence(&self, gamma_t: f64) -> Result<f64> {
        if gamma_t == 0.0 {
            return Ok(initial_concurrence(self.spec.r(), self.spec.alpha())?.value());
        }
        Ok(concurrence_x(&self.state_at(gamma_t)?).value())
    }

    /// `2 max{K₁, K₂}`: smooth where the concurrence is, negative in the
    /// separable region.
    pub fn signed_k(&self, gamma_t: f64) -> Result<f64> {
        Ok(k_terms(&self.state_at(gamma_t)?).signed())
    }
}

/// Concurrence sampled on a uniform `Γt` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Vec<f64>,
    c: Vec<f64>,
    config: Config,
}

impl Trajectory {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// `n` evenly spaced points from `min` to `max`, both included.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let span = max - min;
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { max } else { min + span * (i as f64 / last) })
                .collect()
        }
    }
}

fn check_grid(tmax: f64, steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "a trajectory needs at least 2 points, got {steps}"
        )));
    }
    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Γt range must be positive and finite, got {tmax}"
        )));
    }
    Ok(())
}

pub fn trajectory(env: EnvModel, spec: EwlSpec, tmax: f64, steps: usize) -> Result<Trajectory> {
    trajectory_of(Config::new(env, spec), tmax, steps)
}

pub fn trajectory_of(config: Config, tmax: f64, steps: usize) -> Result<Trajectory> {
    check_grid(tmax, steps)?;
    let grid = linspace(0.0, tmax, steps);
    let c = grid
        .iter()
        .map(|&t| config.concurrence(t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { grid, c, config })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkInterval {
    pub t_start: f64,
    pub t_end: f64,
}

impl DarkInterval {
    pub fn width(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Largest concurrence between a dark interval and the next zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revival {
    pub t_peak: f64,
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DarkReport {
    /// Finite zero-concurrence periods followed by positive concurrence.
    pub intervals: Vec<DarkInterval>,
    /// Isolated zeros narrower than the grid spacing.
    pub touch_points: Vec<f64>,
    /// Onset of a zero tail lasting to the end of the trajectory.
    pub terminal_esd: Option<f64>,
    /// One entry per interval, in order.
    pub revivals: Vec<Revival>,
}

impl DarkReport {
    pub fn has_revival(&self) -> bool {
        !self.intervals.is_empty()
    }
}

/// Last `t` in `[lo, hi]` where `pred` is false, given `pred(lo) != pred(hi)`.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    pred: impl Fn(f64) -> Result<bool>,
) -> Result<f64> {
    let lo_val = pred(lo)?;
    while hi - lo > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? == lo_val {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section minimum of `f` on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > REFINE_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
        if x1 >= x2 {
            break;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?))
}

/// Zero periods of a trajectory, with edges refined against the continuous
/// dynamics.
pub fn dark_intervals(traj: &Trajectory, zero_tol: f64) -> Result<DarkReport> {
    let cfg = traj.config;
    let (g, c) = (&traj.grid, &traj.c);
    let n = g.len();
    let dt = g[1] - g[0];
    let dark: Vec<bool> = c.iter().map(|&v| v <= zero_tol).collect();
    let is_dark = |t: f64| cfg.concurrence(t).map(|v| v <= zero_tol);
    let k = |t: f64| cfg.signed_k(t);

    let mut report = DarkReport::default();
    let mut i = 0;
    while i < n {
        if !dark[i] {
            // Shallow minima between grid points.
            if i > 0 && i + 1 < n && !dark[i - 1] && !dark[i + 1] && c[i] <= c[i - 1] && c[i] < c[i + 1] {
                let (t, v) = golden_min(g[i - 1], g[i + 1], k)?;
                if v <= zero_tol {
                    report.touch_points.push(t);
                }
            }
            i += 1;
            continue;
        }
        let i0 = i;
        while i < n && dark[i] {
            i += 1;
        }
        let i1 = i - 1;
        let start = if i0 == 0 { g[0] } else { bisect(g[i0 - 1], g[i0], is_dark)? };
        if i1 == n - 1 {
            report.terminal_esd = Some(start);
            break;
        }
        let end = bisect(g[i1], g[i1 + 1], is_dark)?;
        if end - start < dt && i0 > 0 {
            let (t, _) = golden_min(g[i0 - 1], g[i1 + 1], k)?;
            report.touch_points.push(t);
        } else {
            report.intervals.push(DarkInterval { t_start: start, t_end: end });
        }
    }

    for (idx, iv) in report.intervals.iter().enumerate() {
        let stop = report
            .intervals
            .get(idx + 1)
            .map(|next| next.t_start)
            .or(report.terminal_esd)
            .unwrap_or(g[n - 1]);
        let best = (0..n)
            .filter(|&j| g[j] > iv.t_end && g[j] < stop)
            .max_by(|&a, &b| c[a].total_cmp(&c[b]));
        let revival = match best {
            Some(j) => {
                let lo = g[j.saturating_sub(1)].max(iv.t_end);
                let hi = g[(j + 1).min(n - 1)].min(stop);
                let (t, neg) = golden_min(lo, hi, |t| cfg.concurrence(t).map(|v| -v))?;
                if -neg >= c[j] {
                    Revival { t_peak: t, peak: -neg }
                } else {
                    Revival { t_peak: g[j], peak: c[j] }
                }
            }
            None => {
                let t = 0.5 * (iv.t_end + stop);
                Revival { t_peak: t, peak: cfg.concurrence(t)? }
            }
        };
        report.revivals.push(revival);
    }
    report.touch_points.sort_by(f64::total_cmp);
    Ok(report)
}

/// First entry into the zero set inside `bracket`, refined by bisection.
pub fn esd_time_numeric(config: &Config, bracket: (f64, f64)) -> Result<f64> {
    let (t0, t1) = bracket;
    if !(t0.is_finite() && t1.is_finite() && t0 >= 0.0 && t1 > t0) {
        return Err(Error::InvalidBracket(format!("[{t0}, {t1}] is not a valid Γt range")));
    }
    if config.concurrence(t0)? <= ZERO_TOL {
        return Err(Error::InvalidBracket(format!(
            "concurrence already vanishes at Γt = {t0}"
        )));
    }
    if config.concurrence(t1)? > ZERO_TOL {
        return Err(Error::InvalidBracket(format!(
            "concurrence still positive at Γt = {t1}"
        )));
    }
    const SCAN: usize = 1024;
    let mut prev = t0;
    for j in 1..=SCAN {
        let t = if j == SCAN { t1 } else { t0 + (t1 - t0) * (j as f64 / SCAN as f64) };
        if config.concurrence(t)? <= ZERO_TOL {
            return bisect(prev, t, |s| config.concurrence(s).map(|v| v <= ZERO_TOL));
        }
        prev = t;
    }
    unreachable!("bracket end is dark")
}

/// Sudden-death onset within `[0, tmax]`, if any.
pub fn esd_onset(config: &Config, tmax: f64, steps: usize) -> Result<Option<f64>> {
    let traj = trajectory_of(*config, tmax, steps)?;
    match traj.c.iter().position(|&v| v <= ZERO_TOL) {
        None => Ok(None),
        Some(0) => Ok(Some(0.0)),
        Some(i) => esd_time_numeric(config, (traj.grid[i - 1], traj.grid[i])).map(Some),
    }
}

fn check_amplitudes(r: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "r = {r} and α = {alpha} must lie in [0, 1]"
        )));
    }
    Ok((1.0 - alpha * alpha).max(0.0).sqrt())
}

/// High-temperature concurrence kernel
/// `K̃ = 2[(r/4)e^{−4Γt/x} + rα|β|e^{−2Γt/x} − 1/4]`, shared by both families.
pub fn k_tilde(r: f64, alpha: f64, x: f64, gamma_t: f64) -> Result<f64> {
    let beta = check_amplitudes(r, alpha)?;
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
    }
    let e2 = (-2.0 * gamma_t / x).exp();
    Ok(2.0 * (0.25 * r * e2 * e2 + r * alpha * beta * e2 - 0.25))
}

/// Root of [`k_tilde`]:
/// `Γt̃ = −(x/2) ln(√((1 + 4rα²|β|²)/r) − 2α|β|)`.
pub fn esd_time_high_t(r: f64, alpha: f64, x: f64) -> Result<f64> {
    let beta = check_amplitudes(r, alpha)?;
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "x must be positive and finite, got {x}"
        )));
    }
    let threshold = r_star(alpha)?;
    if r <= threshold {
        return Err(Error::NoInitialEntanglement { r, r_star: threshold });
    }
    let ab = alpha * beta;
    let y = ((1.0 + 4.0 * r * ab * ab) / r).sqrt() - 2.0 * ab;
    Ok(-0.5 * x * y.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    R,
    AlphaSq,
    LambdaOverGamma,
    KtOverHbarOmega0,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [
        SweepParam::R,
        SweepParam::AlphaSq,
        SweepParam::LambdaOverGamma,
        SweepParam::KtOverHbarOmega0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::R => "r",
            SweepParam::AlphaSq => "alpha_sq",
            SweepParam::LambdaOverGamma => "lambda_over_gamma",
            SweepParam::KtOverHbarOmega0 => "kt_over_hbar_omega0",
        }
    }

    /// Replaces this parameter in `(env, spec)`. A temperature of zero maps
    /// to `x = +∞`.
    pub fn apply(&self, env: EnvModel, spec: EwlSpec, value: f64) -> Result<(EnvModel, EwlSpec)> {
        match self {
            SweepParam::R => Ok((env, spec.with_r(value)?)),
            SweepParam::AlphaSq => Ok((env, spec.with_alpha_sq(value)?)),
            SweepParam::LambdaOverGamma => match env {
                EnvModel::StrongT0(p) => {
                    let q = StrongCouplingParams::new(p.gamma(), value * p.gamma())?;
                    Ok((EnvModel::StrongT0(q), spec))
                }
                _ => Err(Error::InvalidParameter(format!(
                    "{} applies only to strong-t0",
                    self.name()
                ))),
            },
            SweepParam::KtOverHbarOmega0 => {
                let p = env.thermal().ok_or_else(|| {
                    Error::InvalidParameter(format!("{} needs a thermal model", self.name()))
                })?;
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "temperature must be non-negative, got {value}"
                    )));
                }
                let x = if value == 0.0 { f64::INFINITY } else { 1.0 / value };
                let q = ThermalParams::new(p.gamma(), p.omega0(), x)?;
                let env = match env {
                    EnvModel::Markovian(_) => EnvModel::Markovian(q),
                    EnvModel::MarkovianLowTBlock(_) => EnvModel::MarkovianLowTBlock(q),
                    EnvModel::NonMarkWeakLowT(_) => EnvModel::NonMarkWeakLowT(q),
                    EnvModel::StrongT0(_) => unreachable!(),
                };
                Ok((env, spec))
            }
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown sweep axis {s:?}")))
    }
}

/// Concurrence of both families over `(parameter, Γt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub param: SweepParam,
    pub param_values: Vec<f64>,
    pub gamma_t: Vec<f64>,
    /// `phi[i][j]` is the Φ concurrence at `param_values[i]`, `gamma_t[j]`.
    pub phi: Vec<Vec<f64>>,
    pub psi: Vec<Vec<f64>>,
}

pub fn sweep(
    env: EnvModel,
    spec: EwlSpec,
    param: SweepParam,
    values: &[f64],
    tmax: f64,
    steps: usize,
) -> Result<SweepGrid> {
    check_grid(tmax, steps)?;
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    let rows = values
        .par_iter()
        .map(|&v| {
            let (env, spec) = param.apply(env, spec, v)?;
            let phi = trajectory(env, spec.with_family(Family::Phi), tmax, steps)?;
            let psi = trajectory(env, spec.with_family(Family::Psi), tmax, steps)?;
            Ok((phi.c, psi.c))
        })
        .collect::<Result<Vec<_>>>()?;
    let (phi, psi) = rows.into_iter().unzip();
    Ok(SweepGrid {
        param,
        param_values: values.to_vec(),
        gamma_t: linspace(0.0, tmax, steps),
        phi,
        psi,
    })
}

/// Grid sizes for the figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureOptions {
    pub time_points: usize,
    pub param_points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            time_points: 2000,
            param_points: 101,
        }
    }
}

/// Reservoir frequency used by the thermal presets, in units of `Γ`.
pub const PRESET_OMEGA0_OVER_GAMMA: f64 = 100.0;

/// A fully specified figure computation.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: u8,
    pub env: EnvModel,
    pub spec: EwlSpec,
    pub tmax: f64,
    pub time_points: usize,
    pub sweep: Option<(SweepParam, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum FigureData {
    Trajectories { phi: Trajectory, psi: Trajectory },
    Sweep(SweepGrid),
}

pub fn figure_preset(id: u8) -> Result<FigurePreset> {
    figure_preset_with(id, FigureOptions::default())
}

pub fn figure_preset_with(id: u8, opts: FigureOptions) -> Result<FigurePreset> {
    let strong = |ratio: f64| StrongCouplingParams::from_ratio(ratio);
    let thermal = |kt: f64| ThermalParams::new(1.0, PRESET_OMEGA0_OVER_GAMMA, 1.0 / kt);
    let third = 1.0 / 3.0;
    let n = opts.param_points;
    let (env, spec, tmax, sweep) = match id {
        1 => {
            let p = strong(0.01)?;
            let tmax = 3.0 * crate::env::zero_spacing(&p)?;
            (EnvModel::StrongT0(p), EwlSpec::from_alpha_sq(Family::Phi, 1.0, third)?, tmax, None)
        }
        2 => {
            let p = strong(0.1)?;
            let tmax = 2.0 * crate::env::zero_spacing(&p)?;
            let values = linspace(0.0, 1.0, n);
            (EnvModel::StrongT0(p), EwlSpec::werner(Family::Phi, 1.0)?, tmax, Some((SweepParam::R, values)))
        }
        3 => {
            let p = strong(0.1)?;
            let tmax = 2.0 * crate::env::zero_spacing(&p)?;
            let values = linspace(0.01, 1.99, n);
            (
                EnvModel::StrongT0(p),
                EwlSpec::from_alpha_sq(Family::Phi, 1.0, third)?,
                tmax,
                Some((SweepParam::LambdaOverGamma, values)),
            )
        }
        4 => (
            EnvModel::Markovian(thermal(0.1)?),
            EwlSpec::werner(Family::Phi, 1.0)?,
            10.0,
            Some((SweepParam::R, linspace(0.0, 1.0, n))),
        ),
        5 => (
            EnvModel::Markovian(thermal(0.1)?),
            EwlSpec::from_alpha_sq(Family::Phi, 1.0, 0.5)?,
            10.0,
            Some((SweepParam::AlphaSq, linspace(0.0, 1.0, n))),
        ),
        6 => {
            let mut values = vec![0.0];
            values.extend(linspace(1e-3, 1.0, n.saturating_sub(1).max(1)));
            (
                EnvModel::Markovian(thermal(0.1)?),
                EwlSpec::from_alpha_sq(Family::Phi, 1.0, third)?,
                10.0,
                Some((SweepParam::KtOverHbarOmega0, values)),
            )
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "figure id must be 1..=6, got {id}"
            )))
        }
    };
    Ok(FigurePreset {
        id,
        env,
        spec,
        tmax,
        time_points: opts.time_points,
        sweep,
    })
}

impl FigurePreset {
    pub fn run(&self) -> Result<FigureData> {
        match &self.sweep {
            None => {
                let cfg = Config::new(self.env, self.spec);
                Ok(FigureData::Trajectories {
                    phi: trajectory_of(cfg.with_family(Family::Phi), self.tmax, self.time_points)?,
                    psi: trajectory_of(cfg.with_family(Family::Psi), self.tmax, self.time_points)?,
                })
            }
            Some((param, values)) => {
                sweep(self.env, self.spec, *param, values, self.tmax, self.time_points).map(FigureData::Sweep)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{strong_t0, u_zeros, zero_spacing};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn strong_env(ratio: f64) -> EnvModel {
        EnvModel::StrongT0(StrongCouplingParams::from_ratio(ratio).unwrap())
    }

    fn markov_env(x: f64) -> EnvModel {
        EnvModel::Markovian(ThermalParams::new(1.0, 100.0, x).unwrap())
    }

    fn bell(f: Family) -> EwlSpec {
        EwlSpec::bell_like(f, FRAC_1_SQRT_2).unwrap()
    }

    #[test]
    fn bell_closed_forms_strong_coupling() {
        let p = StrongCouplingParams::from_ratio(0.1).unwrap();
        let tmax = 2.0 * zero_spacing(&p).unwrap();
        let phi = trajectory(EnvModel::StrongT0(p), bell(Family::Phi), tmax, 500).unwrap();
        let psi = trajectory(EnvModel::StrongT0(p), bell(Family::Psi), tmax, 500).unwrap();
        for (j, &t) in phi.grid().iter().enumerate() {
            let u = strong_t0(&p, t).unwrap().u;
            assert!((phi.c()[j] - u).abs() <= 1e-12);
            assert!((psi.c()[j] - u * u).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_temperature_markovian_phi_bell_decays_exponentially() {
        // ρ₁₁ stays empty, so C = 2|ρ₂₃| = |z|² = e^{−Γt}.
        let tr = trajectory(markov_env(f64::INFINITY), bell(Family::Phi), 10.0, 201).unwrap();
        for (t, c) in tr.grid().iter().zip(tr.c()) {
            assert!((c - (-t).exp()).abs() < 1e-14, "{t} {c}");
        }
    }

    #[test]
    fn grid_shape() {
        let tr = trajectory(strong_env(0.5), bell(Family::Psi), 3.0, 2).unwrap();
        assert_eq!(tr.grid(), &[0.0, 3.0]);
        assert!(trajectory(strong_env(0.5), bell(Family::Psi), 3.0, 1).is_err());
        assert!(trajectory(strong_env(0.5), bell(Family::Psi), -1.0, 10).is_err());
        let g = linspace(0.0, 7.3, 1000);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*g.last().unwrap(), 7.3);
    }

    #[test]
    fn markovian_werner_single_terminal_esd() {
        let spec = EwlSpec::werner(Family::Phi, 0.5).unwrap();
        let tr = trajectory(markov_env(10.0), spec, 20.0, 4001).unwrap();
        let rep = dark_intervals(&tr, ZERO_TOL).unwrap();
        assert!(rep.intervals.is_empty() && rep.touch_points.is_empty());
        let onset = rep.terminal_esd.unwrap();
        // Independent fine scan.
        let cfg = tr.config();
        let scan = (0..200_000)
            .map(|k| k as f64 * 1e-4)
            .find(|&t| cfg.concurrence(t).unwrap() <= ZERO_TOL)
            .unwrap();
        assert!((scan - onset).abs() <= 1e-4 + 1e-9);
    }

    #[test]
    fn bell_phi_touch_points_match_zeros_of_u() {
        let p = StrongCouplingParams::from_ratio(0.1).unwrap();
        let tmax = u_zeros(&p, 5).unwrap() + 1.0;
        let tr = trajectory(EnvModel::StrongT0(p), bell(Family::Phi), tmax, 2000).unwrap();
        let rep = dark_intervals(&tr, ZERO_TOL).unwrap();
        assert!(rep.intervals.is_empty() && rep.terminal_esd.is_none());
        assert_eq!(rep.touch_points.len(), 5);
        for (n, &t) in rep.touch_points.iter().enumerate() {
            let tn = u_zeros(&p, n as u32 + 1).unwrap();
            assert!((t - tn).abs() < 1e-6, "{t} vs {tn}");
        }
    }

    #[test]
    fn fig1_psi_dark_period_then_smaller_revivals() {
        let spec = EwlSpec::from_alpha_sq(Family::Psi, 1.0, 1.0 / 3.0).unwrap();
        let env = strong_env(0.01);
        let tmax = 5.0 * zero_spacing(&StrongCouplingParams::from_ratio(0.01).unwrap()).unwrap();
        let tr = trajectory(env, spec, tmax, 4000).unwrap();
        let rep = dark_intervals(&tr, ZERO_TOL).unwrap();
        assert!(!rep.intervals.is_empty());
        let c0 = tr.c()[0];
        assert!(rep.revivals[0].peak > 0.0 && rep.revivals[0].peak < c0);
        for w in rep.revivals.windows(2) {
            assert!(w[1].peak <= w[0].peak);
        }
        let phi = trajectory(env, spec.with_family(Family::Phi), tmax, 4000).unwrap();
        let rep = dark_intervals(&phi, ZERO_TOL).unwrap();
        assert!(rep.intervals.is_empty() && rep.terminal_esd.is_none());
        assert!(!rep.touch_points.is_empty());
    }

    #[test]
    fn esd_bracket_errors() {
        let cfg = Config::new(strong_env(0.1), bell(Family::Phi));
        assert!(matches!(esd_time_numeric(&cfg, (0.0, 20.0)), Err(Error::InvalidBracket(_))));
        assert!(matches!(esd_time_numeric(&cfg, (3.0, 1.0)), Err(Error::InvalidBracket(_))));
    }

    #[test]
    fn high_t_numeric_onset() {
        let x = 0.1;
        let cfg = Config::new(markov_env(x), bell(Family::Psi));
        let t = esd_time_numeric(&cfg, (0.0, 1.0)).unwrap();
        let analytic = esd_time_high_t(1.0, FRAC_1_SQRT_2, x).unwrap();
        assert!((t - analytic).abs() / analytic < 0.01, "{t} {analytic}");
    }

    #[test]
    fn high_t_formula_values() {
        for x in [0.01, 0.1, 1.0] {
            let t = esd_time_high_t(1.0, FRAC_1_SQRT_2, x).unwrap();
            let expected = -(x / 2.0) * (2f64.sqrt() - 1.0).ln();
            assert!((t - expected).abs() <= 4.0 * f64::EPSILON * expected);
            assert!(k_tilde(1.0, FRAC_1_SQRT_2, x, t).unwrap().abs() < 1e-12);
        }
        let a = (1.0f64 / 3.0).sqrt();
        let expected = -((17.0f64 / 9.0).sqrt() - 2.0 * 2f64.sqrt() / 3.0).ln();
        assert!((esd_time_high_t(1.0, a, 2.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.8403).abs() < 1e-4);
        assert!(matches!(
            esd_time_high_t(0.3, FRAC_1_SQRT_2, 0.1),
            Err(Error::NoInitialEntanglement { .. })
        ));
    }

    #[test]
    fn near_threshold_linear_in_purity() {
        let x = 0.1;
        for alpha in [FRAC_1_SQRT_2, 0.5, 0.3] {
            let ab = alpha * (1.0 - alpha * alpha).sqrt();
            let rs = r_star(alpha).unwrap();
            // First-order expansion of the root around r*.
            let slope = 0.5 * x * (1.0 + 4.0 * ab).powi(2) / (2.0 * (1.0 + 2.0 * ab));
            for rel in [1e-3, 1e-2] {
                let dr = rs * rel;
                let exact = esd_time_high_t(rs + dr, alpha, x).unwrap();
                assert!((exact - slope * dr).abs() / exact < 0.05, "{alpha} {rel}");
            }
            let t1 = esd_time_high_t(rs * 1.001, alpha, x).unwrap();
            let t2 = esd_time_high_t(rs * 1.002, alpha, x).unwrap();
            assert!((t2 / t1 - 2.0).abs() < 0.01);
        }
    }

    #[test]
    fn k_tilde_at_zero_is_initial_concurrence() {
        for (r, a) in [(1.0, FRAC_1_SQRT_2), (0.8, 0.6), (0.5, 0.5)] {
            let k0 = k_tilde(r, a, 0.1, 0.0).unwrap();
            let c0 = initial_concurrence(r, a).unwrap().value();
            assert!((k0.max(0.0) - c0).abs() < 1e-15);
        }
    }

    #[test]
    fn markovian_ordering_at_low_temperature() {
        let env = markov_env(10.0);
        let mut prev = (0.0, 0.0);
        for r in [0.4, 0.6, 0.8, 1.0] {
            let cfg = Config::new(env, EwlSpec::werner(Family::Phi, r).unwrap());
            let phi = esd_onset(&cfg, 50.0, 5001).unwrap().unwrap();
            let psi = esd_onset(&cfg.with_family(Family::Psi), 50.0, 5001).unwrap().unwrap();
            assert!(phi > psi, "r {r}: {phi} {psi}");
            assert!(phi >= prev.0 && psi >= prev.1);
            prev = (phi, psi);
        }
    }

    #[test]
    fn zero_temperature_pure_state_asymmetry() {
        let env = markov_env(f64::INFINITY);
        let psi = Config::new(env, EwlSpec::from_alpha_sq(Family::Psi, 1.0, 0.25).unwrap());
        assert!(esd_onset(&psi, 20.0, 2001).unwrap().is_some());
        for a2 in [0.25, 0.5, 0.75] {
            let phi = Config::new(env, EwlSpec::from_alpha_sq(Family::Phi, 1.0, a2).unwrap());
            assert!(esd_onset(&phi, 20.0, 2001).unwrap().is_none());
        }
    }

    #[test]
    fn sweep_shape_and_order() {
        let values = linspace(0.4, 1.0, 7);
        let g = sweep(strong_env(0.1), bell(Family::Phi), SweepParam::R, &values, 10.0, 50).unwrap();
        assert_eq!(g.phi.len(), 7);
        assert!(g.phi.iter().chain(&g.psi).all(|row| row.len() == 50));
        for (i, &r) in values.iter().enumerate() {
            let single = trajectory(strong_env(0.1), bell(Family::Psi).with_r(r).unwrap(), 10.0, 50).unwrap();
            assert_eq!(g.psi[i], single.c());
        }
        assert!(sweep(strong_env(0.1), bell(Family::Phi), SweepParam::KtOverHbarOmega0, &values, 10.0, 50).is_err());
        assert!(sweep(markov_env(1.0), bell(Family::Phi), SweepParam::LambdaOverGamma, &values, 10.0, 50).is_err());
    }

    #[test]
    fn temperature_zero_maps_to_infinite_x() {
        let (env, _) = SweepParam::KtOverHbarOmega0
            .apply(markov_env(1.0), bell(Family::Phi), 0.0)
            .unwrap();
        assert_eq!(env.thermal().unwrap().x(), f64::INFINITY);
    }

    #[test]
    fn sweep_param_names_round_trip() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
        }
        assert!("beta".parse::<SweepParam>().is_err());
    }

    #[test]
    fn presets() {
        let opts = FigureOptions { time_points: 50, param_points: 11 };
        for id in 1..=6 {
            let p = figure_preset_with(id, opts).unwrap();
            let data = p.run().unwrap();
            match (id, data) {
                (1, FigureData::Trajectories { phi, psi }) => {
                    assert_eq!(phi.len(), 50);
                    assert_eq!(psi.config().spec().family(), Family::Psi);
                }
                (2..=6, FigureData::Sweep(g)) => assert_eq!(g.param_values.len(), 11),
                _ => panic!("unexpected data for preset {id}"),
            }
        }
        assert!(figure_preset(7).is_err());
        let p6 = figure_preset_with(6, opts).unwrap();
        let values = &p6.sweep.unwrap().1;
        assert_eq!(values[0], 0.0);
        assert_eq!(values[1], 1e-3);
    }

    #[test]
    fn preset2_full_purity_row_matches_bell() {
        let opts = FigureOptions { time_points: 200, param_points: 11 };
        let FigureData::Sweep(g) = figure_preset_with(2, opts).unwrap().run().unwrap() else {
            panic!()
        };
        let p = StrongCouplingParams::from_ratio(0.1).unwrap();
        for (j, &t) in g.gamma_t.iter().enumerate() {
            let u = strong_t0(&p, t).unwrap().u;
            assert!((g.phi[10][j] - u).abs() < 1e-12);
        }
    }

    #[test]
    fn preset4_immediate_esd_just_above_threshold() {
        let cfg = Config::new(markov_env(10.0), EwlSpec::werner(Family::Phi, 1.0 / 3.0 + 1e-4).unwrap());
        let onset = esd_onset(&cfg, 10.0, 2001).unwrap().unwrap();
        assert!(onset < 1e-3, "{onset}");
    }

    #[test]
    fn markovian_trajectories_eventually_separable() {
        for x in [0.1, 1.0, 10.0] {
            for (f, r, a2) in [(Family::Phi, 1.0, 0.5), (Family::Psi, 0.7, 0.3), (Family::Phi, 0.9, 0.8)] {
                let cfg = Config::new(markov_env(x), EwlSpec::from_alpha_sq(f, r, a2).unwrap());
                let tmax = 50.0 * f64::max(1.0, x);
                let tr = trajectory_of(cfg, tmax, 5001).unwrap();
                let rep = dark_intervals(&tr, ZERO_TOL).unwrap();
                assert!(rep.terminal_esd.is_some() && rep.intervals.is_empty());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn first_sample_is_initial_concurrence(
            r in 0.0f64..=1.0,
            alpha in 0.0f64..=1.0,
            psi in any::<bool>(),
            ratio in 0.01f64..3.0,
            x in 0.05f64..20.0,
            delta in 0.0f64..std::f64::consts::TAU,
        ) {
            let fam = if psi { Family::Psi } else { Family::Phi };
            let spec = EwlSpec::new(fam, r, alpha, delta).unwrap();
            let c0 = initial_concurrence(r, alpha).unwrap().value();
            for env in [strong_env(ratio), markov_env(x)] {
                let tr = trajectory(env, spec, 5.0, 3).unwrap();
                prop_assert_eq!(tr.c()[0], c0);
                prop_assert!(tr.c().iter().all(|c| (0.0..=1.0).contains(c)));
            }
        }
    }
}
