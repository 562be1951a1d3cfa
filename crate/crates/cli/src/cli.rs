use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Entanglement dynamics of two qubits in independent reservoirs.
///
/// Times are dimensionless Γt, temperatures k_BT/ħω₀, rates ratios to Γ.
#[derive(Debug, Parser)]
#[command(name = "entlab", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence of both families on a Γt grid.
    Trajectory(RunArgs),
    /// Concurrence over a (parameter, Γt) grid in long format.
    Sweep(RunArgs),
    /// Sudden-death onsets, dark periods and touch points.
    Esd(RunArgs),
    /// One of six preset computations, written as fig<N>.csv.
    Figure(FigureArgs),
    /// Runs the invariant suite; exits 0 only if every check passes.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// key=value file with the same names as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// strong-t0 | markovian | markovian-paper-lowt | nonmark-weak-lowt
    #[arg(long)]
    pub env: Option<String>,

    /// λ/Γ for strong-t0.
    #[arg(long = "lambda-over-gamma")]
    pub lambda_over_gamma: Option<f64>,

    /// ħω₀/k_BT for the thermal models; `inf` is zero temperature.
    #[arg(long)]
    pub x: Option<f64>,

    /// ω₀/Γ for the thermal models.
    #[arg(long = "omega0-over-gamma")]
    pub omega0_over_gamma: Option<f64>,

    /// phi | psi (esd only; trajectories always carry both).
    #[arg(long)]
    pub family: Option<String>,

    /// Purity of the initial state.
    #[arg(long)]
    pub r: Option<f64>,

    /// Weight α² of the first basis state.
    #[arg(long = "alpha-sq")]
    pub alpha_sq: Option<f64>,

    /// Relative phase δ of β.
    #[arg(long)]
    pub delta: Option<f64>,

    /// Largest Γt on the grid.
    #[arg(long)]
    pub tmax: Option<f64>,

    /// Number of Γt grid points, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,

    /// r | alpha_sq | lambda_over_gamma | kt_over_hbar_omega0 (sweep only).
    #[arg(long)]
    pub axis: Option<String>,

    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,

    /// Number of parameter values, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    pub id: u8,

    /// Directory receiving fig<N>.csv.
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,

    /// Γt grid points (default 2000).
    #[arg(long)]
    pub steps: Option<usize>,

    /// Parameter grid points for sweep figures (default 101).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub seed: Option<u64>,
}
