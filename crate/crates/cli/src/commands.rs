//! Scenario runners behind each subcommand.

use std::path::PathBuf;

use rayon::prelude::*;
use spinbath_core::effh::{
    analytic_dynamics, build_effective_model, effh_rates, kappa_triple, rate_map, RateMap,
};
use spinbath_core::oracle::DephasingKernel;
use spinbath_core::qcore::BathAxis;
use spinbath_core::rcmap::{simulate_rc_qme, ModelConfig};
use spinbath_core::redfield::{build_generator, propagate, PropagationOptions, Trajectory};

use crate::config::{Diagonal, Method, RunConfig};
use crate::error::{config, CliError};
use crate::output::{self, ConvergenceRow, KappaRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dynamics,
    Ratemap,
    Kappa,
    Convergence,
    Exact,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dynamics => "dynamics",
            Command::Ratemap => "ratemap",
            Command::Kappa => "kappa",
            Command::Convergence => "convergence",
            Command::Exact => "exact",
        }
    }
}

fn require_baths(model: &ModelConfig) -> Result<(), CliError> {
    if model.baths.is_empty() {
        return Err(config("at least one [[bath]] section is required"));
    }
    Ok(())
}

/// The pure-dephasing kernel, if the model is a single z bath without tunneling.
pub fn exact_kernel(model: &ModelConfig) -> Result<DephasingKernel, CliError> {
    match model.baths.as_slice() {
        [b] if b.axis == BathAxis::Z && model.tunneling == 0.0 => {
            Ok(DephasingKernel::new(b, model.delta)?)
        }
        _ => Err(config(
            "the exact solution needs a single z bath and zero tunneling",
        )),
    }
}

fn common_temperature(model: &ModelConfig) -> Result<f64, CliError> {
    let t = model.baths[0].temperature;
    if model.baths.iter().any(|b| b.temperature != t) {
        return Err(config("effh-analytic needs all baths at one temperature"));
    }
    Ok(t)
}

/// Qubit trajectory of `cfg` with the given method and truncation.
pub fn trajectory(cfg: &RunConfig, method: Method, levels: usize) -> Result<Trajectory, CliError> {
    let model = &cfg.model;
    require_baths(model)?;
    let rho0 = cfg.simulation.initial_state()?;
    let times = cfg.simulation.times();
    let traj = match method {
        Method::RcQme => simulate_rc_qme(model, levels, &rho0, &times)?,
        Method::EffhQme => {
            let eff = build_effective_model(model)?;
            let gen = build_generator(&eff.hamiltonian, &eff.couplings)?;
            propagate(
                &gen,
                &rho0,
                &times,
                &PropagationOptions::with_max_step(model.max_step()),
            )?
        }
        Method::EffhAnalytic => {
            if model.tunneling != 0.0 {
                return Err(config("effh-analytic needs zero tunneling"));
            }
            let beta = 1.0 / common_temperature(model)?;
            analytic_dynamics(&effh_rates(model)?, beta, &rho0, &times)?
        }
        Method::ExactDephasing => exact_kernel(model)?.trajectory(&rho0, &times)?,
    };
    Ok(traj)
}

pub fn run_dynamics(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    trajectory(cfg, cfg.simulation.method, cfg.simulation.levels)
}

pub fn run_exact(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    trajectory(cfg, Method::ExactDephasing, cfg.simulation.levels)
}

/// The rate-map template: the configured baths with the sweep temperature applied.
fn map_template(cfg: &RunConfig) -> Result<ModelConfig, CliError> {
    let mut model = cfg.model.clone();
    if model.bath(BathAxis::X).is_none() || model.bath(BathAxis::Z).is_none() {
        return Err(config("ratemap needs an x and a z bath"));
    }
    if let Some(t) = cfg.sweep.temperature {
        for b in &mut model.baths {
            b.temperature = t;
        }
    }
    Ok(model)
}

pub fn run_ratemap(cfg: &RunConfig) -> Result<RateMap, CliError> {
    Ok(rate_map(
        &map_template(cfg)?,
        &cfg.sweep.eps_x,
        &cfg.sweep.eps_z,
    )?)
}

/// The `(ε_x, ε_y, ε_z)` points of the kappa sweep.
pub fn kappa_points(cfg: &RunConfig) -> Vec<[f64; 3]> {
    let s = &cfg.sweep;
    match s.diagonal {
        Diagonal::Xz => s.eps_x.iter().map(|&e| [e, 0.0, e]).collect(),
        Diagonal::Xyz => s.eps_x.iter().map(|&e| [e, e, e]).collect(),
        Diagonal::None => {
            let mut pts = Vec::with_capacity(s.eps_x.len() * s.eps_y.len() * s.eps_z.len());
            for &ez in &s.eps_z {
                for &ey in &s.eps_y {
                    for &ex in &s.eps_x {
                        pts.push([ex, ey, ez]);
                    }
                }
            }
            pts
        }
    }
}

/// Evaluates every point; failures are recorded per row.
pub fn run_kappa(cfg: &RunConfig) -> Vec<KappaRow> {
    kappa_points(cfg)
        .par_iter()
        .map(|&[ex, ey, ez]| match kappa_triple(ex, ey, ez) {
            Ok(d) => KappaRow {
                epsilons: [ex, ey, ez],
                kappas: d.kappas(),
                errors: d.errors,
                failure: None,
            },
            Err(e) => KappaRow {
                epsilons: [ex, ey, ez],
                kappas: [f64::NAN; 3],
                errors: [f64::NAN; 3],
                failure: Some(e.to_string()),
            },
        })
        .collect()
}

fn sup_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    a.observables
        .iter()
        .zip(&b.observables)
        .map(|(p, q)| (p.sx - q.sx).abs())
        .fold(0.0, f64::max)
}

/// One RC trajectory per truncation level, with sup-norm ⟨σ^x⟩ deviations
/// from the largest level and, for pure dephasing, from the exact solution.
pub fn run_convergence(cfg: &RunConfig) -> Result<Vec<(Trajectory, ConvergenceRow)>, CliError> {
    if cfg.simulation.method != Method::RcQme {
        return Err(config(
            "convergence runs need simulation.method = \"rc-qme\"",
        ));
    }
    let levels = &cfg.simulation.levels_list;
    let trajectories = levels
        .par_iter()
        .map(|&m| trajectory(cfg, Method::RcQme, m))
        .collect::<Result<Vec<_>, _>>()?;
    let exact = match exact_kernel(&cfg.model) {
        Ok(_) => Some(run_exact(cfg)?),
        Err(_) => None,
    };
    let reference = levels
        .iter()
        .enumerate()
        .max_by_key(|(_, m)| **m)
        .map(|(i, _)| i)
        .unwrap_or(0);
    let rows = levels
        .iter()
        .zip(&trajectories)
        .map(|(&m, tr)| ConvergenceRow {
            levels: m,
            dev_vs_ref: sup_deviation(tr, &trajectories[reference]),
            dev_vs_exact: exact.as_ref().map(|e| sup_deviation(tr, e)),
        })
        .collect::<Vec<_>>();
    Ok(trajectories.into_iter().zip(rows).collect())
}

/// Runs `command` and writes its files, returning their paths.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let out = &cfg.output;
    let mut files = Vec::new();
    let mut emit = |suffix: &str, contents: String| -> Result<(), CliError> {
        let path = out.path(suffix);
        output::write_file(&path, &contents)?;
        files.push(path);
        Ok(())
    };
    match command {
        Command::Dynamics => emit("dynamics.csv", output::dynamics_csv(&run_dynamics(cfg)?))?,
        Command::Exact => emit("dynamics.csv", output::dynamics_csv(&run_exact(cfg)?))?,
        Command::Ratemap => emit("ratemap.csv", output::ratemap_csv(&run_ratemap(cfg)?))?,
        Command::Kappa => emit("kappa.csv", output::kappa_csv(&run_kappa(cfg)))?,
        Command::Convergence => {
            let results = run_convergence(cfg)?;
            let mut rows = Vec::with_capacity(results.len());
            for (tr, row) in results {
                emit(
                    &format!("M{}_dynamics.csv", row.levels),
                    output::dynamics_csv(&tr),
                )?;
                rows.push(row);
            }
            emit("conv_summary.csv", output::convergence_csv(&rows))?;
        }
    }
    emit("manifest", cfg.manifest(command.name()))?;
    Ok(files)
}

/// Loads the config, applies the overrides and runs on a pool of `jobs` threads.
pub fn run(
    command: Command,
    config_path: &std::path::Path,
    out: Option<PathBuf>,
    jobs: Option<usize>,
) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = RunConfig::load(config_path)?;
    if let Some(dir) = out {
        cfg.output.directory = dir;
    }
    if jobs == Some(0) {
        return Err(config("--jobs must be >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| execute(command, &cfg))
}
