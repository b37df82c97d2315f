//! Run configuration: TOML input, validation, and the flat manifest format.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Deserialize;
use spinbath_core::qcore::{qubit_state, BathAxis, DensityMatrix};
use spinbath_core::rcmap::ModelConfig;
use spinbath_core::spectral::BathSpec;

use crate::error::{config, CliError};

/// First line of every manifest file.
pub const MANIFEST_HEADER: &str = "# spinbath manifest";

fn one() -> f64 {
    1.0
}
fn default_omega() -> f64 {
    8.0
}
fn default_gamma() -> f64 {
    0.05 / PI
}
fn default_cutoff() -> f64 {
    1000.0
}
fn default_levels() -> usize {
    5
}
fn default_levels_list() -> Vec<usize> {
    vec![3, 4, 5]
}
fn default_t_max() -> f64 {
    10.0
}
fn default_output_step() -> f64 {
    0.02
}
fn half() -> f64 {
    0.5
}
fn default_map_grid() -> GridSpec {
    GridSpec::Range(RangeSpec {
        start: 0.0,
        stop: 1.2,
        count: 41,
    })
}
fn default_zero_grid() -> GridSpec {
    GridSpec::List(vec![0.0])
}
fn default_directory() -> PathBuf {
    PathBuf::from(".")
}
fn default_stem() -> String {
    "spinbath".to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RcQme,
    EffhQme,
    EffhAnalytic,
    ExactDephasing,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RcQme => "rc-qme",
            Method::EffhQme => "effh-qme",
            Method::EffhAnalytic => "effh-analytic",
            Method::ExactDephasing => "exact-dephasing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagonal {
    None,
    Xz,
    Xyz,
}

impl Diagonal {
    pub fn name(self) -> &'static str {
        match self {
            Diagonal::None => "none",
            Diagonal::Xz => "xz",
            Diagonal::Xyz => "xyz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// A grid given either as explicit values or as an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range(RangeSpec),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            GridSpec::List(v) => Ok(v.clone()),
            GridSpec::Range(r) => {
                if r.count == 0 {
                    return Err(config("grid range needs count >= 1"));
                }
                if r.count == 1 {
                    return Ok(vec![r.start]);
                }
                let step = (r.stop - r.start) / (r.count - 1) as f64;
                Ok((0..r.count)
                    .map(|i| {
                        if i + 1 == r.count {
                            r.stop
                        } else {
                            r.start + i as f64 * step
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitSection {
    #[serde(default = "one")]
    delta: f64,
    #[serde(default)]
    tunneling: f64,
    #[serde(default = "one")]
    unit_delta: f64,
}

impl Default for QubitSection {
    fn default() -> Self {
        Self {
            delta: 1.0,
            tunneling: 0.0,
            unit_delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct BathSection {
    axis: String,
    #[serde(default)]
    lambda: f64,
    #[serde(default = "default_omega")]
    omega: f64,
    #[serde(default = "default_gamma")]
    gamma: f64,
    temperature: f64,
    #[serde(default = "default_cutoff")]
    cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    #[serde(default = "default_method")]
    method: Method,
    #[serde(default = "default_levels")]
    levels: usize,
    #[serde(default = "default_levels_list")]
    levels_list: Vec<usize>,
    #[serde(default = "default_t_max")]
    t_max: f64,
    #[serde(default = "default_output_step")]
    output_step: f64,
    #[serde(default = "half")]
    initial_rho11: f64,
    #[serde(default = "half")]
    initial_rho12_re: f64,
    #[serde(default)]
    initial_rho12_im: f64,
}

fn default_method() -> Method {
    Method::RcQme
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            method: default_method(),
            levels: default_levels(),
            levels_list: default_levels_list(),
            t_max: default_t_max(),
            output_step: default_output_step(),
            initial_rho11: 0.5,
            initial_rho12_re: 0.5,
            initial_rho12_im: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    #[serde(default = "default_map_grid")]
    eps_x: GridSpec,
    #[serde(default = "default_zero_grid")]
    eps_y: GridSpec,
    #[serde(default = "default_map_grid")]
    eps_z: GridSpec,
    temperature: Option<f64>,
    #[serde(default = "default_diagonal")]
    diagonal: Diagonal,
}

fn default_diagonal() -> Diagonal {
    Diagonal::None
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            eps_x: default_map_grid(),
            eps_y: default_zero_grid(),
            eps_z: default_map_grid(),
            temperature: None,
            diagonal: Diagonal::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default = "default_directory")]
    directory: PathBuf,
    #[serde(default = "default_stem")]
    stem: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            stem: default_stem(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    qubit: QubitSection,
    #[serde(default)]
    bath: Vec<BathSection>,
    #[serde(default)]
    simulation: SimulationSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub method: Method,
    pub levels: usize,
    pub levels_list: Vec<usize>,
    /// In units of 1/Δ.
    pub t_max: f64,
    pub output_step: f64,
    pub initial_rho11: f64,
    pub initial_rho12: C64,
}

impl Simulation {
    /// Output times `0, step, …, t_max`.
    pub fn times(&self) -> Vec<f64> {
        let n = (self.t_max / self.output_step).round() as usize;
        let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * self.output_step).collect();
        if n > 0 {
            times[n] = self.t_max;
        }
        times
    }

    pub fn initial_state(&self) -> Result<DensityMatrix, CliError> {
        qubit_state(self.initial_rho11, self.initial_rho12)
            .map_err(|e| config(format!("invalid initial state: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub eps_x: Vec<f64>,
    pub eps_y: Vec<f64>,
    pub eps_z: Vec<f64>,
    pub temperature: Option<f64>,
    pub diagonal: Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub directory: PathBuf,
    pub stem: String,
}

impl Output {
    pub fn path(&self, suffix: &str) -> PathBuf {
        self.directory.join(format!("{}_{suffix}", self.stem))
    }
}

/// A validated run description with energies in units of Δ.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// May hold no baths for runs that only need the sweep grids.
    pub model: ModelConfig,
    pub simulation: Simulation,
    pub sweep: Sweep,
    pub output: Output,
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| config(e.to_string()))?;
        if text.trim_start().starts_with(MANIFEST_HEADER) {
            table = manifest_to_config(table)?;
        }
        let raw: RawConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| config(e.to_string()))?;
        Self::resolve(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    fn resolve(raw: RawConfig) -> Result<Self, CliError> {
        let unit = positive("qubit.unit_delta", raw.qubit.unit_delta)?;
        let energy = |v: f64| v / unit;
        let mut baths = Vec::with_capacity(raw.bath.len());
        for b in &raw.bath {
            let axis: BathAxis = b.axis.parse().map_err(|e| config(format!("{e}")))?;
            baths.push(BathSpec {
                axis,
                lambda: energy(b.lambda),
                omega: energy(b.omega),
                gamma: b.gamma,
                temperature: energy(b.temperature),
                cutoff: energy(b.cutoff),
            });
        }
        baths.sort_by_key(|b| b.axis.index());
        let model = ModelConfig {
            delta: energy(raw.qubit.delta),
            tunneling: energy(raw.qubit.tunneling),
            baths,
        };
        if !model.baths.is_empty() {
            model.validate().map_err(|e| config(e.to_string()))?;
        }

        let s = &raw.simulation;
        let t_max = positive("simulation.t_max", s.t_max * unit)?;
        let output_step = positive("simulation.output_step", s.output_step * unit)?;
        let n = (t_max / output_step).round();
        if (n * output_step - t_max).abs() > 1e-9 * t_max {
            return Err(config(
                "simulation.t_max must be a multiple of simulation.output_step",
            ));
        }
        if s.levels < 2 {
            return Err(config("simulation.levels must be >= 2"));
        }
        if s.levels_list.is_empty() || s.levels_list.iter().any(|&m| m < 2) {
            return Err(config(
                "simulation.levels_list must be nonempty with entries >= 2",
            ));
        }
        let simulation = Simulation {
            method: s.method,
            levels: s.levels,
            levels_list: s.levels_list.clone(),
            t_max,
            output_step,
            initial_rho11: s.initial_rho11,
            initial_rho12: C64::new(s.initial_rho12_re, s.initial_rho12_im),
        };
        simulation.initial_state()?;

        let sweep = Sweep {
            eps_x: raw.sweep.eps_x.values()?,
            eps_y: raw.sweep.eps_y.values()?,
            eps_z: raw.sweep.eps_z.values()?,
            temperature: match raw.sweep.temperature {
                Some(t) if t >= 0.0 && t.is_finite() => Some(energy(t)),
                Some(t) => return Err(config(format!("sweep.temperature must be >= 0, got {t}"))),
                None => None,
            },
            diagonal: raw.sweep.diagonal,
        };
        for (name, grid) in [
            ("eps_x", &sweep.eps_x),
            ("eps_y", &sweep.eps_y),
            ("eps_z", &sweep.eps_z),
        ] {
            if grid.is_empty() || grid.iter().any(|e| e.is_nan() || *e < 0.0 || e.is_infinite()) {
                return Err(config(format!(
                    "sweep.{name} must be a nonempty list of finite values >= 0"
                )));
            }
        }
        if raw.output.stem.is_empty() || raw.output.stem.contains(['/', '\\']) {
            return Err(config("output.stem must be a plain file-name prefix"));
        }
        Ok(Self {
            model,
            simulation,
            sweep,
            output: Output {
                directory: raw.output.directory,
                stem: raw.output.stem,
            },
        })
    }

    /// Flat `key = value` listing of every resolved parameter. It is valid
    /// TOML and loads back through [`RunConfig::from_toml_str`].
    pub fn manifest(&self, command: &str) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let num = |v: f64| format!("{v:?}");
        let list = |v: &[f64]| {
            format!(
                "[{}]",
                v.iter()
                    .map(|x| format!("{x:?}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        };
        let text = |s: &str| format!("{:?}", s);
        line("derived.command", text(command));
        line("qubit.delta", num(self.model.delta));
        line("qubit.tunneling", num(self.model.tunneling));
        line("qubit.unit_delta", num(1.0));
        for b in &self.model.baths {
            let key = |f: &str| format!("bath.{}.{f}", b.axis);
            line(&key("lambda"), num(b.lambda));
            line(&key("omega"), num(b.omega));
            line(&key("gamma"), num(b.gamma));
            line(&key("temperature"), num(b.temperature));
            line(&key("cutoff"), num(b.cutoff));
            line(
                &format!("derived.bath.{}.epsilon", b.axis),
                num(b.epsilon()),
            );
        }
        let s = &self.simulation;
        line("simulation.method", text(s.method.name()));
        line("simulation.levels", s.levels.to_string());
        line(
            "simulation.levels_list",
            format!(
                "[{}]",
                s.levels_list
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        );
        line("simulation.t_max", num(s.t_max));
        line("simulation.output_step", num(s.output_step));
        line("simulation.initial_rho11", num(s.initial_rho11));
        line("simulation.initial_rho12_re", num(s.initial_rho12.re));
        line("simulation.initial_rho12_im", num(s.initial_rho12.im));
        line("sweep.eps_x", list(&self.sweep.eps_x));
        line("sweep.eps_y", list(&self.sweep.eps_y));
        line("sweep.eps_z", list(&self.sweep.eps_z));
        if let Some(t) = self.sweep.temperature {
            line("sweep.temperature", num(t));
        }
        line("sweep.diagonal", text(self.sweep.diagonal.name()));
        line(
            "output.directory",
            text(&self.output.directory.to_string_lossy()),
        );
        line("output.stem", text(&self.output.stem));
        format!("{MANIFEST_HEADER}\n{out}")
    }
}

/// Turns the axis-keyed bath tables of a manifest back into a bath array
/// and drops the informational entries.
fn manifest_to_config(mut table: toml::Table) -> Result<toml::Table, CliError> {
    table.remove("derived");
    if let Some(baths) = table.remove("bath") {
        let toml::Value::Table(baths) = baths else {
            return Err(config("manifest bath entries must be keyed by axis"));
        };
        let mut list = Vec::with_capacity(baths.len());
        for (axis, fields) in baths {
            let toml::Value::Table(mut fields) = fields else {
                return Err(config(format!("manifest bath.{axis} is not a table")));
            };
            fields.insert("axis".to_string(), toml::Value::String(axis));
            list.push(toml::Value::Table(fields));
        }
        table.insert("bath".to_string(), toml::Value::Array(list));
    }
    Ok(table)
}
