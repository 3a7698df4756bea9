//! Job files and their validation into runnable plans.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use tetraweight::identities::{PentagonVariant, Quadrature};
use tetraweight::lattice::LatticeSpec;
use tetraweight::quadrature::{circle_grid, line_grid, Grid, LineTruncation};
use tetraweight::shapes::{in_domain_d, pentagon_angles, reference_pentagon_angles, PentagonAngles};
use tetraweight::weights::{ModelParams, TetWeight};
use tetraweight::{AngleTriple, RhoSix, SpectralQuad, StateSpace, TetrahedralWeight};

pub const SCHEMA: u32 = 1;
pub const DEFAULT_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = tetraweight::sampling::DEFAULT_SEED;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed job at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("job schema: {0}")]
    Schema(String),
    #[error("invalid {what}: {msg}")]
    Invalid { what: &'static str, msg: String },
}

fn invalid(what: &'static str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid { what, msg: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyPentagon,
    VerifyTe6,
    VerifyTe4,
    SweepEps,
    TransferCommute,
    Partition,
    GaugeProbe,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyPentagon => "verify-pentagon",
            Command::VerifyTe6 => "verify-te6",
            Command::VerifyTe4 => "verify-te4",
            Command::SweepEps => "sweep-eps",
            Command::TransferCommute => "transfer-commute",
            Command::Partition => "partition",
            Command::GaugeProbe => "gauge-probe",
            Command::Selftest => "selftest",
        }
    }
}

/// Discretization settings. `nodes` is the circle size for the 3D index and
/// the line size for KLV lattice runs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub nodes: Option<usize>,
    /// Adaptive real-line policy for KLV identity checks.
    pub line: Option<LineTruncation>,
    /// Half-width and Gauss order of fixed KLV lattice grids.
    pub x_max: Option<f64>,
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<String>,
    pub json: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub schema: u32,
    pub command: Command,
    pub model: Option<ModelParams>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub instances: Option<usize>,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PentagonParams {
    alpha0: Option<AngleTriple>,
    alpha4: Option<AngleTriple>,
    alpha2_1: Option<f64>,
    #[serde(default = "standard")]
    variant: PentagonVariant,
}

fn standard() -> PentagonVariant {
    PentagonVariant::Standard
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Te6Params {
    rho: [f64; 6],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Te4Params {
    r: [f64; 4],
    eps: f64,
    delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepParams {
    r: [f64; 4],
    deltas: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeParams {
    lattice: LatticeSpec,
    shift: Option<f64>,
}

/// A fully validated job.
#[derive(Debug, Clone)]
pub enum Task {
    Pentagon { angles: PentagonAngles, variant: PentagonVariant },
    Te6 { rho: RhoSix },
    Te4 { r: SpectralQuad, eps: f64, delta: f64 },
    Sweep { r: SpectralQuad, deltas: Vec<f64> },
    Commute { spec: LatticeSpec },
    Partition { spec: LatticeSpec },
    Gauge { spec: LatticeSpec, shift: f64 },
    Selftest,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub command: Command,
    pub weight: TetWeight,
    pub task: Task,
    pub quad: Quadrature,
    /// Fixed grid for lattice commands.
    pub grid: Option<Grid>,
    pub seed: u64,
    pub threshold: f64,
    pub instances: usize,
    pub csv_name: String,
    pub json_name: String,
}

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub threshold: Option<f64>,
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
}

pub fn parse_job(text: &str) -> Result<Job, ConfigError> {
    let job: Job = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ConfigError::Schema(e.to_string()),
        _ => ConfigError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() },
    })?;
    if job.schema != SCHEMA {
        return Err(ConfigError::Schema(format!("unsupported schema {} (expected {SCHEMA})", job.schema)));
    }
    Ok(job)
}

pub fn read_job(path: &Path) -> Result<Job, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_job(&text)
}

fn params<T: DeserializeOwned>(v: &serde_json::Value) -> Result<T, ConfigError> {
    let v = if v.is_null() { serde_json::json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| invalid("params", e))
}

fn spectral(r: [f64; 4], eps: f64) -> Result<SpectralQuad, ConfigError> {
    let q = SpectralQuad::new(r[0], r[1], r[2], r[3]);
    if !q.is_ordered(eps) {
        return Err(invalid("r", format!("need r1 < r2 < r3 < r4 < pi + r1 - {eps}, got {r:?}")));
    }
    Ok(q)
}

fn check_lattice(spec: &LatticeSpec) -> Result<(), ConfigError> {
    spec.validate().map_err(|e| invalid("lattice", e))?;
    for &u in &spec.u {
        spec.cube_angles(u).map_err(|e| invalid("lattice", e))?;
    }
    Ok(())
}

fn default_nodes(command: Command) -> usize {
    match command {
        Command::VerifyPentagon => 256,
        Command::VerifyTe6 | Command::VerifyTe4 | Command::SweepEps => 2048,
        _ => 16,
    }
}

impl Job {
    /// Checks every parameter against the library's preconditions.
    pub fn plan(&self, o: Overrides) -> Result<Plan, ConfigError> {
        let model = self.model.unwrap_or(ModelParams::ThreeDIndex { q: 0.3.into() });
        let weight = TetWeight::from_params(&model).map_err(|e| invalid("model", e))?;
        let threshold = o.threshold.or(self.threshold).unwrap_or(DEFAULT_THRESHOLD);
        if threshold.is_nan() || threshold <= 0.0 {
            return Err(invalid("threshold", format!("{threshold} is not positive")));
        }
        let seed = o.seed.or(self.seed).unwrap_or(DEFAULT_SEED);
        let instances = self.instances.unwrap_or(10);
        if instances == 0 {
            return Err(invalid("instances", "need at least one"));
        }
        let nodes = o.nodes.or(self.grid.nodes).unwrap_or(default_nodes(self.command));
        let task = match self.command {
            Command::VerifyPentagon => {
                let p: PentagonParams = params(&self.params)?;
                let angles = match (p.alpha0, p.alpha4, p.alpha2_1) {
                    (None, None, None) => reference_pentagon_angles(),
                    (Some(a0), Some(a4), Some(a21)) => {
                        pentagon_angles(a0, a4, a21).map_err(|e| invalid("angles", e))?
                    }
                    _ => return Err(invalid("angles", "give all of alpha0, alpha4, alpha2_1 or none")),
                };
                Task::Pentagon { angles, variant: p.variant }
            }
            Command::VerifyTe6 => {
                let p: Te6Params = params(&self.params)?;
                let rho = RhoSix::new(p.rho);
                if !in_domain_d(&rho) {
                    return Err(invalid("rho", format!("{:?} is outside D", p.rho)));
                }
                Task::Te6 { rho }
            }
            Command::VerifyTe4 => {
                let p: Te4Params = params(&self.params)?;
                if !(p.eps > p.delta && p.delta > 0.0) {
                    return Err(invalid("eps/delta", format!("need eps > delta > 0, got {} and {}", p.eps, p.delta)));
                }
                Task::Te4 { r: spectral(p.r, p.eps)?, eps: p.eps, delta: p.delta }
            }
            Command::SweepEps => {
                let p: SweepParams = params(&self.params)?;
                if p.deltas.is_empty() || p.deltas.iter().any(|d| d.is_nan() || *d <= 0.0) {
                    return Err(invalid("deltas", "need a non-empty list of positive values"));
                }
                let largest = p.deltas.iter().cloned().fold(0.0, f64::max);
                Task::Sweep { r: spectral(p.r, 2.0 * largest)?, deltas: p.deltas }
            }
            Command::TransferCommute | Command::Partition | Command::GaugeProbe => {
                let p: LatticeParams = params(&self.params)?;
                check_lattice(&p.lattice)?;
                match self.command {
                    Command::TransferCommute => {
                        if p.lattice.u.len() < 2 {
                            return Err(invalid("lattice", "need at least two u values to commute"));
                        }
                        Task::Commute { spec: p.lattice }
                    }
                    Command::Partition => Task::Partition { spec: p.lattice },
                    _ => {
                        let shift = p.shift.unwrap_or(0.0);
                        check_lattice(&p.lattice.shifted(shift))?;
                        Task::Gauge { spec: p.lattice, shift }
                    }
                }
            }
            Command::Selftest => Task::Selftest,
        };
        let quad = match weight.state_space() {
            StateSpace::UnitCircle => Quadrature::Fixed(circle_grid(nodes).map_err(|e| invalid("grid", e))?),
            _ => Quadrature::AdaptiveLine(self.grid.line.unwrap_or_default()),
        };
        let grid = match (&task, weight.state_space()) {
            (Task::Commute { .. } | Task::Partition { .. } | Task::Gauge { .. }, StateSpace::UnitCircle) => {
                Some(circle_grid(nodes).map_err(|e| invalid("grid", e))?)
            }
            (Task::Commute { .. } | Task::Partition { .. } | Task::Gauge { .. }, _) => {
                let order = self.grid.order.unwrap_or(4);
                if order == 0 || !nodes.is_multiple_of(order) {
                    return Err(invalid("grid", format!("{nodes} nodes is not a multiple of order {order}")));
                }
                let x_max = self.grid.x_max.unwrap_or(6.0);
                Some(line_grid(x_max, nodes / order, order).map_err(|e| invalid("grid", e))?)
            }
            _ => None,
        };
        let stem = self.command.name();
        Ok(Plan {
            command: self.command,
            weight,
            task,
            quad,
            grid,
            seed,
            threshold,
            instances,
            csv_name: self.outputs.csv.clone().unwrap_or_else(|| format!("{stem}.csv")),
            json_name: self.outputs.json.clone().unwrap_or_else(|| format!("{stem}.json")),
        })
    }
}
