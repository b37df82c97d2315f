//! CSV and manifest emission.

use std::fmt::Write as _;
use std::path::Path;

use spinbath_core::effh::RateMap;
use spinbath_core::redfield::Trajectory;

use crate::error::CliError;

pub const DYNAMICS_HEADER: &str = "t,re_rho12,im_rho12,sx,sz,trace_err";
pub const RATEMAP_HEADER: &str =
    "eps_x,eps_z,gamma_d,gamma_x_eff,gamma_z_eff,kappa_x,kappa_y,kappa_z";
pub const KAPPA_HEADER: &str = "eps_x,eps_y,eps_z,kappa_x,kappa_y,kappa_z,err_x,err_y,err_z,status";
pub const CONVERGENCE_HEADER: &str = "M,dev_vs_ref,dev_vs_exact";

/// Twelve significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| num(*v)).collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

pub fn dynamics_csv(traj: &Trajectory) -> String {
    let mut out = format!("{DYNAMICS_HEADER}\n");
    for (t, o) in traj.times.iter().zip(&traj.observables) {
        row(
            &mut out,
            &[*t, o.re_rho12, o.im_rho12, o.sx, o.sz, o.trace_err],
        );
    }
    out
}

pub fn ratemap_csv(map: &RateMap) -> String {
    let mut out = format!("{RATEMAP_HEADER}\n");
    for c in &map.cells {
        row(
            &mut out,
            &[
                c.eps_x,
                c.eps_z,
                c.gamma_d,
                c.gamma_x_eff,
                c.gamma_z_eff,
                c.kappa_x,
                c.kappa_y,
                c.kappa_z,
            ],
        );
    }
    out
}

/// One dressing evaluation; failed cells carry NaN values.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaRow {
    pub epsilons: [f64; 3],
    pub kappas: [f64; 3],
    pub errors: [f64; 3],
    pub failure: Option<String>,
}

pub fn kappa_csv(rows: &[KappaRow]) -> String {
    let mut out = format!("{KAPPA_HEADER}\n");
    for r in rows {
        let cells: Vec<String> = r
            .epsilons
            .iter()
            .chain(&r.kappas)
            .chain(&r.errors)
            .map(|v| num(*v))
            .collect();
        let status = if r.failure.is_some() { "failed" } else { "ok" };
        let _ = writeln!(out, "{},{status}", cells.join(","));
    }
    out
}

/// Sup-norm deviations of one truncation level.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub levels: usize,
    pub dev_vs_ref: f64,
    pub dev_vs_exact: Option<f64>,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("{CONVERGENCE_HEADER}\n");
    for r in rows {
        let exact = r.dev_vs_exact.map(num).unwrap_or_default();
        let _ = writeln!(out, "{},{},{exact}", r.levels, num(r.dev_vs_ref));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
