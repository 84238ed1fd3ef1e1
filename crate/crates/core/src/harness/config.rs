//! TOML experiment configuration.
//!
//! Every section is a typed table and unknown keys are rejected. See the
//! README for the full grammar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ProjectionSpec;
use crate::model::{ModelParams, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub projection: ProjectionConfig,
    pub grid: GridConfig,
    pub model: ModelParams,
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub render: RenderConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<ScalesConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProjectionConfig {
    /// `P = B = I` in `d` dimensions.
    Periodic { d: usize },
    /// Four-dimensional embedding of the 2D dodecagonal quasicrystal.
    Dodecagonal,
    /// Explicit row-major `P` (`d×n`) and `B` (`n×n`).
    Custom { d: usize, n: usize, p: Vec<f64>, b: Vec<f64> },
}

impl ProjectionConfig {
    pub fn build(&self) -> Result<ProjectionSpec> {
        match self {
            Self::Periodic { d } => ProjectionSpec::periodic(*d),
            Self::Dodecagonal => Ok(ProjectionSpec::dodecagonal()),
            Self::Custom { d, n, p, b } => ProjectionSpec::new(*d, *n, p.clone(), b.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub dealias: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SavCn,
    SavCnSdc,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::SavCn => "sav_cn",
            Self::SavCnSdc => "sav_cn_sdc",
        }
    }
}

/// Node placement for plain SAV/CN. SDC always uses Chebyshev nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    #[default]
    Uniform,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    /// Number of time intervals `N_T`.
    pub steps: usize,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub nodes: NodeKind,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    /// Intervals per SDC block; 0 means one global block.
    #[serde(default)]
    pub block: usize,
}

fn default_scheme() -> Scheme {
    Scheme::SavCn
}

fn default_sweeps() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub h: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    #[default]
    Zero,
    /// `amplitude · sin(x_axis)`: lattice mode `e_axis`.
    Sine {
        #[serde(default)]
        axis: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `Σ amplitude · cos(k_h·r + phase)`.
    Modes { modes: Vec<ModeSpec> },
    /// Every mode whose projected wavevector lies on one of the circles gets
    /// coefficient `amplitude`. Radii default to the model's length scales.
    /// `perturbation` scales the first circle's modes at multiples of 60° by
    /// `1 + perturbation`, seeding a hexagonal bias.
    Rings {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radii: Option<Vec<f64>>,
        #[serde(default = "default_ring_amplitude")]
        amplitude: f64,
        #[serde(default)]
        perturbation: f64,
    },
    /// A field dump.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn default_ring_amplitude() -> f64 {
    0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_energy_csv")]
    pub energy_csv: String,
    /// Snapshot times; the first node at or after each time is dumped.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_prefix")]
    pub dump_prefix: String,
    /// Also write a graymap next to every dump.
    #[serde(default)]
    pub render_snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            energy_csv: default_energy_csv(),
            snapshots: Vec::new(),
            dump_prefix: default_prefix(),
            render_snapshots: false,
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_energy_csv() -> String {
    "energy.csv".into()
}

fn default_prefix() -> String {
    "phi".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    /// Window corners; default `[0, 40]` on every axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
    /// Samples per axis; default 256.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Vec<usize>>,
    /// Modes below `floor · max|φ̂|` are skipped.
    #[serde(default = "default_floor")]
    pub floor: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            lo: None,
            hi: None,
            resolution: None,
            floor: default_floor(),
        }
    }
}

fn default_floor() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Peaks are modes with `|φ̂| > threshold · max|φ̂|`.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            threshold: default_threshold(),
        }
    }
}

fn default_threshold() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    /// `‖φ̂‖₂` over coefficients, the almost-periodic L² norm.
    #[default]
    ApL2,
    /// `ℓ²` of the unnormalized DFT coefficients: the mode count times
    /// [`ErrorNorm::ApL2`].
    DftL2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub steps: Vec<usize>,
    pub reference: usize,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub norm: ErrorNorm,
    #[serde(default = "default_convergence_csv")]
    pub csv: String,
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::SavCn, Scheme::SavCnSdc]
}

fn default_convergence_csv() -> String {
    "convergence.csv".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalesConfig {
    /// Numbers of length scales to run.
    pub m: Vec<usize>,
    /// Ratio of consecutive length scales, `q_j = s^{j−1}`.
    #[serde(default = "default_ratio")]
    pub s: f64,
}

pub fn default_ratio() -> f64 {
    2.0 * (std::f64::consts::PI / 12.0).cos()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        let spec = self.projection.build().map_err(cfg_err)?;
        if self.grid.sizes.len() != spec.lattice_dim() {
            return Err(Error::Config(format!(
                "grid.sizes has {} entries for a {}-dimensional lattice",
                self.grid.sizes.len(),
                spec.lattice_dim()
            )));
        }
        self.model.validate().map_err(cfg_err)?;
        let t = &self.time;
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return Err(Error::Config(format!("time.t_end must be positive (got {})", t.t_end)));
        }
        if t.steps == 0 {
            return Err(Error::Config("time.steps must be positive".into()));
        }
        if t.scheme == Scheme::SavCnSdc && t.block != 0 && t.steps % t.block != 0 {
            return Err(Error::Config(format!(
                "time.block = {} does not divide time.steps = {}",
                t.block, t.steps
            )));
        }
        if let Some(c) = &self.convergence {
            if c.steps.is_empty() || c.schemes.is_empty() {
                return Err(Error::Config("convergence.steps and schemes must be non-empty".into()));
            }
            if let Some(&bad) = c.steps.iter().find(|&&n| n >= c.reference) {
                return Err(Error::Config(format!(
                    "convergence.reference = {} must exceed every tested N_T (got {bad})",
                    c.reference
                )));
            }
        }
        if let Some(s) = &self.scales {
            if s.m.is_empty() || s.m.contains(&0) {
                return Err(Error::Config("scales.m must list positive counts".into()));
            }
            if !(s.s > 0.0 && s.s.is_finite()) {
                return Err(Error::Config("scales.s must be positive".into()));
            }
        }
        if !(self.spectrum.threshold > 0.0) {
            return Err(Error::Config("spectrum.threshold must be positive".into()));
        }
        if !(self.render.floor >= 0.0) {
            return Err(Error::Config("render.floor must be non-negative".into()));
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ProjectionSpec> {
        self.projection.build()
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::new(self.spec()?, &self.grid.sizes, self.model.clone(), self.grid.dealias)
    }
}

/// Configuration files shipped with the crate.
pub mod presets {
    /// 1D convergence benchmark.
    pub const BENCH1D: &str = include_str!("../../../../configs/bench1d.toml");
    /// Dodecagonal quasicrystal relaxation, `T = 200`, 24⁴ modes.
    pub const DDQC: &str = include_str!("../../../../configs/ddqc.toml");
    /// Short-horizon dodecagonal run for energy comparisons.
    pub const DDQC_SHORT: &str = include_str!("../../../../configs/ddqc_short.toml");
    /// Very coarse dodecagonal run with large steps.
    pub const DDQC_COARSE: &str = include_str!("../../../../configs/ddqc_coarse.toml");
    /// Length-scale study.
    pub const SCALES: &str = include_str!("../../../../configs/scales.toml");
}
