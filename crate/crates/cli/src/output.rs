//! CSV writers. Every file starts with a `#` header block describing the
//! run.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use entlab_core::analysis::{DarkReport, SweepGrid, Trajectory};

use crate::config::num;
use crate::error::{CliError, CliResult};

pub const TRAJECTORY_COLUMNS: &str = "gamma_t,c_phi,c_psi";
pub const SWEEP_COLUMNS: &str = "param_name,param_value,gamma_t,c_phi,c_psi";
pub const ESD_COLUMNS: &str = "family,kind,t_start,t_end";

pub fn write_trajectories(w: &mut (impl Write + ?Sized), header: &str, phi: &Trajectory, psi: &Trajectory) -> io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "{TRAJECTORY_COLUMNS}")?;
    for ((t, a), b) in phi.grid().iter().zip(phi.c()).zip(psi.c()) {
        writeln!(w, "{},{},{}", num(*t), num(*a), num(*b))?;
    }
    Ok(())
}

pub fn write_sweep(w: &mut (impl Write + ?Sized), header: &str, g: &SweepGrid) -> io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "{SWEEP_COLUMNS}")?;
    let name = g.param.name();
    for (i, &p) in g.param_values.iter().enumerate() {
        let p = num(p);
        for (j, &t) in g.gamma_t.iter().enumerate() {
            writeln!(w, "{name},{p},{},{},{}", num(t), num(g.phi[i][j]), num(g.psi[i][j]))?;
        }
    }
    Ok(())
}

/// One row per feature: `onset`, `dark`, `touch` or `terminal`.
pub struct EsdRows<'a> {
    pub family: &'a str,
    pub onset: Option<f64>,
    pub report: &'a DarkReport,
    pub tmax: f64,
}

pub fn write_esd(w: &mut (impl Write + ?Sized), header: &str, rows: &[EsdRows<'_>]) -> io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "{ESD_COLUMNS}")?;
    for r in rows {
        if let Some(t) = r.onset {
            writeln!(w, "{},onset,{},{}", r.family, num(t), num(t))?;
        }
        for iv in &r.report.intervals {
            writeln!(w, "{},dark,{},{}", r.family, num(iv.t_start), num(iv.t_end))?;
        }
        for &t in &r.report.touch_points {
            writeln!(w, "{},touch,{},{}", r.family, num(t), num(t))?;
        }
        if let Some(t) = r.report.terminal_esd {
            writeln!(w, "{},terminal,{},{}", r.family, num(t), num(r.tmax))?;
        }
    }
    Ok(())
}

/// Runs `f` against the file at `path`, or standard output when `None`.
pub fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(format!("creating {}", p.display()), e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(format!("writing {}", p.display()), e))?;
            log::info!("wrote {}", p.display());
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io("writing standard output", e))
        }
    }
}
