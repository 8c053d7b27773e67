//! Experiment configuration: a versioned TOML document with `--set` overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use fracctl::control::{ResolventMethod, ResolventOptions};
use fracctl::fracops::FracOrder;
use fracctl::hvi::{check_epsilons, FixedPointOptions, Potential, SelectionStrategy, Tabulated};
use fracctl::lpspace::{GridFunction, SpectralState};
use fracctl::spectral::{KernelSpec, SpectralModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_err, CliError, Result};

/// Schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelConfig,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Number of sine modes `N`.
    pub modes: usize,
    pub alpha: f64,
    pub alpha1: f64,
    /// Time horizon `a`.
    pub horizon: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    pub kernel_b: KernelConfig,
    /// Defaults to `kernel_b`.
    #[serde(default)]
    pub kernel_h: Option<KernelConfig>,
}

fn default_p() -> f64 {
    2.0
}

/// `"green"`, `"min"`, or an inline table of kernel samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelConfig {
    Named(KernelName),
    Table(KernelTable),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelName {
    Green,
    Min,
}

/// Row-major samples on an `n`-point midpoint θ-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTable {
    pub n: usize,
    pub values: Vec<f64>,
}

impl KernelConfig {
    fn spec(&self) -> KernelSpec<f64> {
        match self {
            Self::Named(KernelName::Green) => KernelSpec::Green,
            Self::Named(KernelName::Min) => KernelSpec::Min,
            Self::Table(t) => KernelSpec::Table { n: t.n, values: t.values.clone() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub x0: StateConfig,
    pub target: StateConfig,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub selection: SelectionConfig,
}

/// A state given by sine coefficients or by a sampled profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Zero,
    /// `Σ c w_n` over `(n, c)` pairs, `n` 1-based.
    Modes { coefficients: Vec<(usize, f64)> },
    /// `scale · θ(π - θ)` projected onto the basis.
    Parabola { scale: f64 },
}

impl StateConfig {
    pub fn state(&self, model: &SpectralModel<f64>) -> Result<SpectralState<f64>> {
        let n = model.n_modes();
        match self {
            Self::Zero => Ok(SpectralState::zeros(n)),
            Self::Modes { coefficients } => {
                let mut c = vec![0.0; n];
                for &(k, v) in coefficients {
                    if k == 0 || k > n {
                        return Err(CliError::Config(format!("mode {k} outside 1..={n}")));
                    }
                    if !v.is_finite() {
                        return Err(CliError::Config(format!("coefficient of mode {k} is not finite")));
                    }
                    c[k - 1] += v;
                }
                Ok(SpectralState::new(c)?)
            }
            Self::Parabola { scale } => {
                let basis = model.basis();
                let f = GridFunction::from_fn(basis.n_theta(), model.p(), |t| scale * t * (PI - t))?;
                Ok(basis.to_basis(&f)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    Abs { c: f64 },
    SaturatingAbs { c: f64 },
    Tabulated { knots: Vec<f64>, values: Vec<f64>, eta: f64 },
}

impl PotentialConfig {
    pub fn potential(&self) -> Result<Potential<f64>> {
        Ok(match self {
            Self::Zero => Potential::Zero,
            Self::Abs { c } => Potential::abs(*c)?,
            Self::SaturatingAbs { c } => Potential::saturating_abs(*c)?,
            Self::Tabulated { knots, values, eta } => {
                Potential::Tabulated(Tabulated::new(knots.clone(), values.clone(), *eta)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionConfig {
    MinimalNorm,
    Midpoint,
    SignZero,
    #[default]
    Sticky,
}

impl From<SelectionConfig> for SelectionStrategy {
    fn from(s: SelectionConfig) -> Self {
        match s {
            SelectionConfig::MinimalNorm => Self::MinimalNorm,
            SelectionConfig::Midpoint => Self::Midpoint,
            SelectionConfig::SignZero => Self::SignZero,
            SelectionConfig::Sticky => Self::Sticky,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolventConfig {
    #[default]
    Auto,
    Direct,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Uniform time steps on `[0, a]`.
    pub steps: usize,
    pub n_theta: usize,
    /// Resolution of the standalone Gramian assembly.
    pub quad_steps: usize,
    pub resolvent: ResolventConfig,
    pub resolvent_tol: f64,
    pub resolvent_max_iter: usize,
    pub fixed_point_tol: f64,
    pub relaxation: f64,
    pub max_iter: usize,
    /// Seed of the random directions used by the checks.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            steps: 512,
            n_theta: 256,
            quad_steps: 512,
            resolvent: ResolventConfig::Auto,
            resolvent_tol: 1e-12,
            resolvent_max_iter: 500,
            fixed_point_tol: 1e-10,
            relaxation: 0.5,
            max_iter: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Strictly descending regularisation parameters.
    pub epsilons: Vec<f64>,
    /// Rows solved in parallel.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4], workers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Write one trajectory CSV per ε.
    pub trajectories: bool,
    /// Write one control CSV per ε.
    pub controls: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), trajectories: true, controls: true }
    }
}

impl ExperimentConfig {
    /// Reads `path`, applies `key.path=value` overrides, and validates the result.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut doc: toml::Table =
            toml::from_str(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = toml::Value::Table(doc)
            .try_into()
            .map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|source| CliError::Parse { path: PathBuf::from("<inline>"), source })?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Re-runs the guards of every module the config feeds.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let model = self.build_model()?;
        self.problem.x0.state(&model)?;
        self.problem.target.state(&model)?;
        self.problem.potential.potential()?;
        check_epsilons(&self.sweep.epsilons)?;
        let s = &self.solver;
        if s.steps < 2 || s.quad_steps < fracctl::gramian::MIN_QUAD_STEPS {
            return Err(CliError::Config(format!(
                "need steps ≥ 2 and quad_steps ≥ {}",
                fracctl::gramian::MIN_QUAD_STEPS
            )));
        }
        if !(s.relaxation > 0.0 && s.relaxation <= 1.0) {
            return Err(CliError::Config(format!("relaxation {} outside (0, 1]", s.relaxation)));
        }
        if !(s.resolvent_tol > 0.0 && s.fixed_point_tol > 0.0) || s.resolvent_max_iter == 0 || s.max_iter == 0 {
            return Err(CliError::Config("tolerances and iteration limits must be positive".into()));
        }
        if self.sweep.workers == 0 {
            return Err(CliError::Config("sweep.workers must be at least 1".into()));
        }
        if s.resolvent == ResolventConfig::Direct && self.model.p != 2.0 {
            return Err(CliError::Config("the direct resolvent needs p = 2".into()));
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<SpectralModel<f64>> {
        let m = &self.model;
        let order = FracOrder::new(m.alpha, m.alpha1)?;
        let kb = m.kernel_b.spec();
        let kh = m.kernel_h.as_ref().map(KernelConfig::spec);
        Ok(SpectralModel::build(m.modes, order, m.horizon, &kb, kh.as_ref(), m.p, self.solver.n_theta)?)
    }

    pub fn resolvent_options(&self) -> ResolventOptions<f64> {
        ResolventOptions {
            tol: self.solver.resolvent_tol,
            max_iter: self.solver.resolvent_max_iter,
            method: match self.solver.resolvent {
                ResolventConfig::Auto => ResolventMethod::Auto,
                ResolventConfig::Direct => ResolventMethod::Direct,
                ResolventConfig::Iterative => ResolventMethod::Iterative,
            },
        }
    }

    pub fn fixed_point_options(&self) -> FixedPointOptions<f64> {
        FixedPointOptions {
            relaxation: self.solver.relaxation,
            max_iter: self.solver.max_iter,
            tol: self.solver.fixed_point_tol,
            strategy: self.problem.selection.into(),
            resolvent: self.resolvent_options(),
        }
    }

    /// The effective configuration as canonical TOML.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of [`canonical`](Self::canonical), stamped into every output.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Sets one scalar entry from `dotted.key=value`; `value` is read as TOML, else as a string.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    if matches!(value, toml::Value::Table(_)) {
        return Err(CliError::Config(format!("override `{key}` must be a scalar or list")));
    }
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut table = doc;
    for part in path {
        table = match table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new())) {
            toml::Value::Table(t) => t,
            _ => return Err(CliError::Config(format!("`{part}` in `{key}` is not a table"))),
        };
    }
    if let Some(toml::Value::Table(_)) = table.get(*last) {
        return Err(CliError::Config(format!("`{key}` is a table; only scalar entries can be overridden")));
    }
    table.insert(last.to_string(), value);
    Ok(())
}
