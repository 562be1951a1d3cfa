//! Run configuration: flag and config-file merging, model construction and
//! the header block written at the top of every CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use entlab_core::analysis::{linspace, SweepParam};
use entlab_core::env::{EnvModel, StrongCouplingParams, ThermalParams};
use entlab_core::states::{EwlSpec, Family};

use crate::cli::RunArgs;
use crate::error::{CliError, CliResult};

pub const DEFAULT_LAMBDA_OVER_GAMMA: f64 = 0.1;
pub const DEFAULT_X: f64 = 10.0;
pub const DEFAULT_OMEGA0_OVER_GAMMA: f64 = 100.0;
pub const DEFAULT_TMAX: f64 = 10.0;
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_POINTS: usize = 101;

const KEYS: [&str; 16] = [
    "env",
    "lambda_over_gamma",
    "x",
    "omega0_over_gamma",
    "family",
    "r",
    "alpha_sq",
    "delta",
    "tmax",
    "steps",
    "axis",
    "min",
    "max",
    "points",
    "out",
    "config",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Trajectory,
    Sweep,
    Esd,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Trajectory => "trajectory",
            Subcommand::Sweep => "sweep",
            Subcommand::Esd => "esd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    StrongT0,
    Markovian,
    MarkovianLowTBlock,
    NonMarkWeakLowT,
}

impl EnvKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnvKind::StrongT0 => "strong-t0",
            EnvKind::Markovian => "markovian",
            EnvKind::MarkovianLowTBlock => "markovian-paper-lowt",
            EnvKind::NonMarkWeakLowT => "nonmark-weak-lowt",
        }
    }

    pub fn is_thermal(&self) -> bool {
        !matches!(self, EnvKind::StrongT0)
    }
}

impl FromStr for EnvKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        [
            EnvKind::StrongT0,
            EnvKind::Markovian,
            EnvKind::MarkovianLowTBlock,
            EnvKind::NonMarkWeakLowT,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| CliError::usage(format!("unknown env {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Strong { lambda_over_gamma: f64 },
    Thermal { x: f64, omega0_over_gamma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub env: EnvKind,
    pub params: ModelParams,
    pub family: Option<Family>,
    pub r: f64,
    pub alpha_sq: f64,
    pub delta: f64,
    pub tmax: f64,
    pub steps: usize,
    pub sweep: Option<SweepAxis>,
    pub out: Option<PathBuf>,
}

/// Reads a flat `key=value` file. Blank lines and `#` comments are
/// skipped; dashes in keys are read as underscores.
pub fn parse_config_text(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", n + 1)))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) || key == "config" {
            return Err(CliError::usage(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("config line {}: duplicate key {key:?}", n + 1)));
        }
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_config_text(&text)
}

struct Merged<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Merged<'_> {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("invalid value {s:?} for {key}"))),
        }
    }
}

fn parse_family(s: &str) -> CliResult<Family> {
    match s {
        "phi" => Ok(Family::Phi),
        "psi" => Ok(Family::Psi),
        _ => Err(CliError::usage(format!("unknown family {s:?} (phi | psi)"))),
    }
}

impl RunConfig {
    pub fn resolve(subcommand: Subcommand, args: &RunArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        Self::resolve_with(subcommand, args, &file)
    }

    pub fn resolve_with(
        subcommand: Subcommand,
        args: &RunArgs,
        file: &BTreeMap<String, String>,
    ) -> CliResult<Self> {
        let m = Merged { file };
        let env = m
            .get(args.env.clone(), "env")?
            .map(|s: String| s.parse::<EnvKind>())
            .transpose()?
            .unwrap_or(EnvKind::StrongT0);
        let lambda = m.get(args.lambda_over_gamma, "lambda_over_gamma")?;
        let x = m.get(args.x, "x")?;
        let omega0 = m.get(args.omega0_over_gamma, "omega0_over_gamma")?;
        let params = if env.is_thermal() {
            if lambda.is_some() {
                return Err(CliError::usage(format!(
                    "--lambda-over-gamma does not apply to {}",
                    env.name()
                )));
            }
            ModelParams::Thermal {
                x: x.unwrap_or(DEFAULT_X),
                omega0_over_gamma: omega0.unwrap_or(DEFAULT_OMEGA0_OVER_GAMMA),
            }
        } else {
            if x.is_some() || omega0.is_some() {
                return Err(CliError::usage(
                    "--x and --omega0-over-gamma apply only to the thermal models",
                ));
            }
            ModelParams::Strong {
                lambda_over_gamma: lambda.unwrap_or(DEFAULT_LAMBDA_OVER_GAMMA),
            }
        };

        let family = m
            .get(args.family.clone(), "family")?
            .map(|s: String| parse_family(&s))
            .transpose()?;

        let axis = m.get(args.axis.clone(), "axis")?;
        let min = m.get(args.min, "min")?;
        let max = m.get(args.max, "max")?;
        let points = m.get(args.points, "points")?;
        let sweep = match subcommand {
            Subcommand::Sweep => {
                let name: String = axis.ok_or_else(|| CliError::usage("sweep needs --axis"))?;
                let param = SweepParam::from_str(&name).map_err(|e| CliError::usage(e.to_string()))?;
                let (min, max) = match (min, max) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(CliError::usage("sweep needs --min and --max")),
                };
                Some(SweepAxis {
                    param,
                    min,
                    max,
                    points: points.unwrap_or(DEFAULT_POINTS),
                })
            }
            _ => {
                if axis.is_some() || min.is_some() || max.is_some() || points.is_some() {
                    return Err(CliError::usage(format!(
                        "--axis, --min, --max and --points apply only to sweep, not {}",
                        subcommand.name()
                    )));
                }
                None
            }
        };

        Ok(Self {
            subcommand,
            env,
            params,
            family,
            r: m.get(args.r, "r")?.unwrap_or(1.0),
            alpha_sq: m.get(args.alpha_sq, "alpha_sq")?.unwrap_or(0.5),
            delta: m.get(args.delta, "delta")?.unwrap_or(0.0),
            tmax: m.get(args.tmax, "tmax")?.unwrap_or(DEFAULT_TMAX),
            steps: m.get(args.steps, "steps")?.unwrap_or(DEFAULT_STEPS),
            sweep,
            out: m.get(args.out.clone(), "out")?,
        })
    }

    pub fn env_model(&self) -> entlab_core::Result<EnvModel> {
        Ok(match (self.env, &self.params) {
            (EnvKind::StrongT0, ModelParams::Strong { lambda_over_gamma }) => {
                EnvModel::StrongT0(StrongCouplingParams::new(1.0, *lambda_over_gamma)?)
            }
            (kind, ModelParams::Thermal { x, omega0_over_gamma }) => {
                let p = ThermalParams::new(1.0, *omega0_over_gamma, *x)?;
                match kind {
                    EnvKind::Markovian => EnvModel::Markovian(p),
                    EnvKind::MarkovianLowTBlock => EnvModel::MarkovianLowTBlock(p),
                    EnvKind::NonMarkWeakLowT => EnvModel::NonMarkWeakLowT(p),
                    EnvKind::StrongT0 => unreachable!(),
                }
            }
            (_, ModelParams::Strong { .. }) => unreachable!(),
        })
    }

    /// Initial state; the family defaults to Φ and is swapped per column.
    pub fn spec(&self) -> entlab_core::Result<EwlSpec> {
        let base = EwlSpec::from_alpha_sq(self.family.unwrap_or(Family::Phi), self.r, self.alpha_sq)?;
        EwlSpec::new(base.family(), base.r(), base.alpha(), self.delta)
    }

    pub fn header(&self) -> String {
        let mut h = Header::new(self.subcommand.name());
        h.push("env", self.env.name());
        match &self.params {
            ModelParams::Strong { lambda_over_gamma } => h.push("lambda_over_gamma", num(*lambda_over_gamma)),
            ModelParams::Thermal { x, omega0_over_gamma } => {
                h.push("x", num(*x));
                h.push("kt_over_hbar_omega0", num(1.0 / x));
                h.push("omega0_over_gamma", num(*omega0_over_gamma));
            }
        }
        h.push("family", self.family.map_or("phi,psi", |f| f.name()));
        h.push("r", num(self.r));
        h.push("alpha_sq", num(self.alpha_sq));
        h.push("delta", num(self.delta));
        h.push("tmax", num(self.tmax));
        h.push("steps", self.steps);
        if let Some(s) = &self.sweep {
            h.push("axis", s.param.name());
            h.push("min", num(s.min));
            h.push("max", num(s.max));
            h.push("points", s.points);
        }
        h.finish()
    }
}

/// Float formatting shared by headers and data rows: 17 significant digits.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// `# key=value` comment block.
pub struct Header(String);

impl Header {
    pub fn new(command: &str) -> Self {
        let mut s = String::new();
        let _ = writeln!(s, "# entlab {} {command}", env!("CARGO_PKG_VERSION"));
        Header(s)
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "# {key}={value}");
    }

    pub fn finish(self) -> String {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_flags_override() {
        let file = parse_config_text("# comment\nenv = markovian\nx=0.5\nalpha-sq=0.25\n\nr=0.9\n").unwrap();
        let args = RunArgs { r: Some(0.7), ..Default::default() };
        let cfg = RunConfig::resolve_with(Subcommand::Trajectory, &args, &file).unwrap();
        assert_eq!(cfg.env, EnvKind::Markovian);
        assert_eq!(cfg.r, 0.7);
        assert_eq!(cfg.alpha_sq, 0.25);
        assert_eq!(
            cfg.params,
            ModelParams::Thermal { x: 0.5, omega0_over_gamma: DEFAULT_OMEGA0_OVER_GAMMA }
        );
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_config_text("nonsense").is_err());
        assert!(parse_config_text("colour=red").is_err());
        assert!(parse_config_text("r=1\nr=0.5").is_err());
        let file = parse_config_text("r=abc").unwrap();
        let err = RunConfig::resolve_with(Subcommand::Trajectory, &RunArgs::default(), &file).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn flag_combinations() {
        let strong_with_x = RunArgs { x: Some(1.0), ..Default::default() };
        assert!(matches!(
            RunConfig::resolve_with(Subcommand::Trajectory, &strong_with_x, &BTreeMap::new()),
            Err(CliError::Usage(_))
        ));
        let thermal_with_lambda = RunArgs {
            env: Some("markovian".into()),
            lambda_over_gamma: Some(0.1),
            ..Default::default()
        };
        assert!(RunConfig::resolve_with(Subcommand::Esd, &thermal_with_lambda, &BTreeMap::new()).is_err());
        assert!(RunConfig::resolve_with(Subcommand::Sweep, &RunArgs::default(), &BTreeMap::new()).is_err());
        let axis_on_trajectory = RunArgs { axis: Some("r".into()), ..Default::default() };
        assert!(RunConfig::resolve_with(Subcommand::Trajectory, &axis_on_trajectory, &BTreeMap::new()).is_err());
    }

    #[test]
    fn infinite_x_round_trips_through_header() {
        let args = RunArgs { env: Some("markovian".into()), x: Some(f64::INFINITY), ..Default::default() };
        let cfg = RunConfig::resolve_with(Subcommand::Trajectory, &args, &BTreeMap::new()).unwrap();
        let h = cfg.header();
        assert!(h.contains("# x=inf\n"));
        assert!(h.contains("# kt_over_hbar_omega0=0.0000000000000000e0\n"));
        assert_eq!(cfg.env_model().unwrap().thermal().unwrap().x(), f64::INFINITY);
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
