mod cli;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;
use entlab_core::analysis::{
    self, dark_intervals, esd_onset, figure_preset_with, Config, FigureData, FigureOptions, FigurePreset,
    ZERO_TOL,
};
use entlab_core::env::EnvModel;
use entlab_core::states::Family;
use entlab_core::validate::{run_validation, DEFAULT_SEED};

use crate::cli::{Cli, Command, FigureArgs, RunArgs, ValidateArgs};
use crate::config::{num, Header, RunConfig, Subcommand};
use crate::error::{CliError, CliResult};
use crate::output::{with_output, write_esd, write_sweep, write_trajectories, EsdRows};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("ENTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("ENTLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size thread pool: {e}")))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Trajectory(a) => trajectory(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Esd(a) => esd(&a),
        Command::Figure(a) => figure(&a),
        Command::Validate(a) => validate(&a),
    }
}

fn trajectory(args: &RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(Subcommand::Trajectory, args)?;
    let (env, spec) = (cfg.env_model()?, cfg.spec()?);
    let phi = analysis::trajectory(env, spec.with_family(Family::Phi), cfg.tmax, cfg.steps)?;
    let psi = analysis::trajectory(env, spec.with_family(Family::Psi), cfg.tmax, cfg.steps)?;
    let header = cfg.header();
    with_output(cfg.out.as_deref(), |w| write_trajectories(w, &header, &phi, &psi))
}

fn sweep(args: &RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(Subcommand::Sweep, args)?;
    let axis = cfg.sweep.as_ref().expect("sweep axis resolved");
    let grid = analysis::sweep(cfg.env_model()?, cfg.spec()?, axis.param, &axis.values(), cfg.tmax, cfg.steps)?;
    let header = cfg.header();
    with_output(cfg.out.as_deref(), |w| write_sweep(w, &header, &grid))
}

fn esd(args: &RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(Subcommand::Esd, args)?;
    let (env, spec) = (cfg.env_model()?, cfg.spec()?);
    let families = match cfg.family {
        Some(f) => vec![f],
        None => Family::BOTH.to_vec(),
    };
    let mut results = Vec::new();
    for f in families {
        let c = Config::new(env, spec.with_family(f));
        let traj = analysis::trajectory_of(c, cfg.tmax, cfg.steps)?;
        let report = dark_intervals(&traj, ZERO_TOL)?;
        let onset = esd_onset(&c, cfg.tmax, cfg.steps)?;
        results.push((f, onset, report));
    }
    let rows: Vec<EsdRows> = results
        .iter()
        .map(|(f, onset, report)| EsdRows {
            family: f.name(),
            onset: *onset,
            report,
            tmax: cfg.tmax,
        })
        .collect();
    let header = cfg.header();
    with_output(cfg.out.as_deref(), |w| write_esd(w, &header, &rows))
}

fn preset_header(p: &FigurePreset) -> String {
    let mut h = Header::new("figure");
    h.push("id", p.id);
    h.push("env", p.env.name());
    match p.env {
        EnvModel::StrongT0(s) => h.push("lambda_over_gamma", num(s.ratio())),
        _ => {
            let t = p.env.thermal().expect("thermal preset");
            h.push("x", num(t.x()));
            h.push("kt_over_hbar_omega0", num(t.kt_over_hbar_omega0()));
            h.push("omega0_over_gamma", num(t.omega0() / t.gamma()));
        }
    }
    h.push("family", "phi,psi");
    h.push("r", num(p.spec.r()));
    h.push("alpha_sq", num(p.spec.alpha() * p.spec.alpha()));
    h.push("delta", num(p.spec.delta()));
    h.push("tmax", num(p.tmax));
    h.push("steps", p.time_points);
    if let Some((param, values)) = &p.sweep {
        h.push("axis", param.name());
        h.push("min", num(values[0]));
        h.push("max", num(values[values.len() - 1]));
        h.push("points", values.len());
    }
    h.finish()
}

fn figure(args: &FigureArgs) -> CliResult<()> {
    let defaults = FigureOptions::default();
    let opts = FigureOptions {
        time_points: args.steps.unwrap_or(defaults.time_points),
        param_points: args.points.unwrap_or(defaults.param_points),
    };
    let preset = figure_preset_with(args.id, opts)?;
    let header = preset_header(&preset);
    let data = preset.run()?;
    let path = args.out_dir.join(format!("fig{}.csv", args.id));
    with_output(Some(&path), |w| match &data {
        FigureData::Trajectories { phi, psi } => write_trajectories(w, &header, phi, psi),
        FigureData::Sweep(g) => write_sweep(w, &header, g),
    })
}

fn validate(args: &ValidateArgs) -> CliResult<()> {
    let report = run_validation(args.seed.unwrap_or(DEFAULT_SEED));
    for c in &report.checks {
        println!(
            "{} {} ({:.2?}): {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.elapsed,
            c.detail
        );
    }
    let failed = report.failures().count();
    println!(
        "{} of {} checks passed in {:.2?} (seed {})",
        report.checks.len() - failed,
        report.checks.len(),
        report.elapsed(),
        report.seed
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::ValidationFailed(failed))
    }
}
