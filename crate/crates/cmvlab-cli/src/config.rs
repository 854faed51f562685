//! Experiment configuration: JSON schema, defaults and validation.
//!
//! A config names one command (or a list run in order) and a model, and
//! carries every scale parameter the commands read. Unknown keys are
//! rejected, and every error names the offending field.

use std::fmt;
use std::path::{Path, PathBuf};

use cmvlab::model::{CoinSpec, ModelFile, TrigPolySpec};
use cmvlab::qwalk::Closure;
use cmvlab::spectral::{IntervalConvention, Subsampling};
use cmvlab::{CoinField, Frequency, Phase, SamplingFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ConfigError;

/// Fields without a default.
pub const REQUIRED_FIELDS: [&str; 2] = ["command", "model"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    LyapunovScan,
    Ldt,
    ApCheck,
    RateTable,
    GreenCheck,
    GreenDecay,
    Spectrum,
    Localize,
    Resonance,
    Visits,
    QwalkGauge,
    QwalkEquiv,
    QwalkEvolve,
    QwalkLyapunov,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::LyapunovScan,
        Command::Ldt,
        Command::ApCheck,
        Command::RateTable,
        Command::GreenCheck,
        Command::GreenDecay,
        Command::Spectrum,
        Command::Localize,
        Command::Resonance,
        Command::Visits,
        Command::QwalkGauge,
        Command::QwalkEquiv,
        Command::QwalkEvolve,
        Command::QwalkLyapunov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::LyapunovScan => "lyapunov-scan",
            Command::Ldt => "ldt",
            Command::ApCheck => "ap-check",
            Command::RateTable => "rate-table",
            Command::GreenCheck => "green-check",
            Command::GreenDecay => "green-decay",
            Command::Spectrum => "spectrum",
            Command::Localize => "localize",
            Command::Resonance => "resonance",
            Command::Visits => "visits",
            Command::QwalkGauge => "qwalk-gauge",
            Command::QwalkEquiv => "qwalk-equiv",
            Command::QwalkEvolve => "qwalk-evolve",
            Command::QwalkLyapunov => "qwalk-lyapunov",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Whether the command walks a coin field rather than sampling α.
    pub fn needs_coins(self) -> bool {
        matches!(
            self,
            Command::QwalkGauge | Command::QwalkEquiv | Command::QwalkEvolve | Command::QwalkLyapunov
        )
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One command or a pipeline of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CommandList {
    One(Command),
    Many(Vec<Command>),
}

impl CommandList {
    pub fn commands(&self) -> Vec<Command> {
        match self {
            CommandList::One(c) => vec![*c],
            CommandList::Many(v) => v.clone(),
        }
    }
}

/// Spectral parameters: `{"points": N}` gives θ_i = 2πi/N, `{"thetas": [...]}`
/// lists them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ZGrid {
    Points { points: usize },
    Thetas { thetas: Vec<f64> },
}

impl ZGrid {
    pub fn thetas(&self) -> Vec<f64> {
        match self {
            ZGrid::Points { points } => (0..*points)
                .map(|i| std::f64::consts::TAU * i as f64 / *points as f64)
                .collect(),
            ZGrid::Thetas { thetas } => thetas.clone(),
        }
    }
}

/// A boundary phase given as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(r) => Complex64::new(r, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// How the LDT scale of the visit indicator depends on the orbit length N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VisitScale {
    /// n(N) = ⌈N^{1/3}⌉
    #[default]
    CubeRoot,
    /// n(N) = config.n for every N
    Fixed,
}

fn d_frequency() -> Vec<f64> {
    Frequency::default_2d().coords().to_vec()
}
fn d_dioph_p() -> f64 {
    1e-3
}
fn d_z() -> ZGrid {
    ZGrid::Points { points: 8 }
}
fn d_n() -> usize {
    200
}
fn d_n_list() -> Vec<usize> {
    vec![25, 50, 100, 200]
}
fn d_samples() -> usize {
    1000
}
fn d_one() -> ComplexValue {
    ComplexValue::Real(1.0)
}
fn d_tau() -> f64 {
    0.3
}
fn d_sigma() -> f64 {
    1.0
}
fn d_chains() -> usize {
    100
}
fn d_chain_len() -> usize {
    8
}
fn d_block_len() -> usize {
    10
}
fn d_relation_max_n() -> usize {
    12
}
fn d_n1() -> usize {
    64
}
fn d_orbit_lengths() -> Vec<u64> {
    vec![1_000, 10_000, 100_000]
}
fn d_window() -> [i64; 2] {
    [-128, 127]
}
fn d_steps() -> usize {
    1000
}
fn d_eigen_count() -> usize {
    10
}

/// The fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandList,
    /// built-in name, path to a JSON model file, or an inline model
    pub model: Value,
    #[serde(default = "d_frequency")]
    pub frequency: Vec<f64>,
    #[serde(default = "d_dioph_p")]
    pub dioph_p: f64,
    /// defaults to d + 1
    #[serde(default)]
    pub dioph_q: Option<f64>,
    /// defaults to the origin
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default = "d_z")]
    pub z: ZGrid,
    #[serde(default = "d_n")]
    pub n: usize,
    #[serde(default = "d_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_one")]
    pub beta: ComplexValue,
    #[serde(default = "d_one")]
    pub eta: ComplexValue,
    #[serde(default = "d_tau")]
    pub tau: f64,
    /// exponent in the rate (log n)^{1/σ}/n
    #[serde(default = "d_sigma")]
    pub sigma: f64,
    /// decay rate for green-decay; measured as L_n when absent
    #[serde(default)]
    pub gamma: Option<f64>,
    /// truncation interval for green-check, spectrum and localize;
    /// defaults to [0, n − 1]
    #[serde(default)]
    pub interval: Option<[i64; 2]>,
    #[serde(default = "d_chains")]
    pub chains: usize,
    #[serde(default = "d_chain_len")]
    pub chain_len: usize,
    #[serde(default = "d_block_len")]
    pub block_len: usize,
    #[serde(default = "d_relation_max_n")]
    pub relation_max_n: usize,
    #[serde(default = "d_n1")]
    pub n1: usize,
    #[serde(default)]
    pub subsampling: Subsampling,
    #[serde(default)]
    pub convention: IntervalConvention,
    #[serde(default = "d_orbit_lengths")]
    pub orbit_lengths: Vec<u64>,
    #[serde(default)]
    pub visit_scale: VisitScale,
    #[serde(default = "d_window")]
    pub window: [i64; 2],
    #[serde(default)]
    pub closure: Closure,
    #[serde(default = "d_steps")]
    pub steps: usize,
    #[serde(default)]
    pub start_site: i64,
    #[serde(default = "d_eigen_count")]
    pub eigen_count: usize,
    /// output directory; --out and CMVLAB_OUT take precedence
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Parses and validates a config, applying defaults.
///
/// Relative model paths are resolved against the current directory; use
/// [`load_config`] to resolve them against the config file instead.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    validate_config_in(raw, None)
}

/// Reads and validates the config at `path`.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let raw = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    validate_config_in(&raw, path.parent())
}

fn validate_config_in(raw: &str, base: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    let value: Value = serde_json::from_str(raw).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| ConfigError::Invalid {
        path: ".".into(),
        message: "the config must be a JSON object".into(),
    })?;
    let missing: Vec<String> = REQUIRED_FIELDS
        .iter()
        .filter(|f| !obj.contains_key(**f))
        .map(|f| f.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing { fields: missing });
    }
    let mut cfg: ExperimentConfig =
        serde_path_to_error::deserialize(&value).map_err(|e| ConfigError::Invalid {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    cfg.resolve(base)?;
    Ok(cfg)
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn commands(&self) -> Vec<Command> {
        self.command.commands()
    }

    /// Fills the defaults that depend on other fields and checks ranges.
    fn resolve(&mut self, base: Option<&Path>) -> Result<(), ConfigError> {
        if self.commands().is_empty() {
            return Err(invalid("command", "the command list is empty"));
        }
        // a relative model path is kept relative to the config file
        if let (Value::String(s), Some(base)) = (&self.model, base) {
            if s.ends_with(".json") && Path::new(s).is_relative() {
                self.model = Value::String(base.join(s).to_string_lossy().into_owned());
            }
        }
        let model = self.load_model()?;
        let d = model.dim;
        if self.frequency.len() != d {
            return Err(invalid(
                "frequency",
                format!("has {} coordinates but the model has d = {d}", self.frequency.len()),
            ));
        }
        self.dioph_q.get_or_insert(d as f64 + 1.0);
        let x0 = self.x0.get_or_insert_with(|| vec![0.0; d]);
        if x0.len() != d {
            return Err(invalid("x0", format!("has {} coordinates but d = {d}", x0.len())));
        }
        if let Some([a, b]) = self.interval {
            if a > b {
                return Err(invalid("interval", format!("[{a}, {b}] is empty")));
            }
        }
        if self.window[0] >= self.window[1] {
            return Err(invalid("window", "needs at least two sites"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(invalid("tau", format!("must lie in (0, 1), got {}", self.tau)));
        }
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be positive"));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_list", "must be nonempty and strictly increasing"));
        }
        if self.z.thetas().is_empty() {
            return Err(invalid("z", "the spectral grid is empty"));
        }
        for cmd in self.commands() {
            if cmd.needs_coins() && model.coins.is_none() {
                return Err(invalid("model", format!("{cmd} needs a coin field")));
            }
            if !cmd.needs_coins() && model.alpha.is_none() {
                return Err(invalid("model", format!("{cmd} needs a Verblunsky function alpha")));
            }
        }
        Ok(())
    }

    pub fn frequency(&self) -> Result<Frequency, ConfigError> {
        let q = self.dioph_q.unwrap_or(self.frequency.len() as f64 + 1.0);
        Frequency::new(self.frequency.clone(), self.dioph_p, q).map_err(|e| invalid("frequency", e.to_string()))
    }

    pub fn x0(&self) -> Result<Phase, ConfigError> {
        let coords = self.x0.clone().unwrap_or_else(|| vec![0.0; self.frequency.len()]);
        Phase::new(coords).map_err(|e| invalid("x0", e.to_string()))
    }

    pub fn interval(&self) -> (i64, i64) {
        match self.interval {
            Some([a, b]) => (a, b),
            None => (0, self.n as i64 - 1),
        }
    }

    /// The model the config refers to. Certification failures of the
    /// function itself are model violations, not config errors.
    pub fn load_model(&self) -> Result<Model, ConfigError> {
        match &self.model {
            Value::String(name) if name.ends_with(".json") => {
                let path = PathBuf::from(name);
                let raw = std::fs::read_to_string(&path).map_err(|e| ConfigError::Read {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                let value: Value = serde_json::from_str(&raw).map_err(|e| ConfigError::Syntax {
                    line: e.line(),
                    column: e.column(),
                    message: format!("{}: {e}", path.display()),
                })?;
                Model::from_value(&value, &format!("model({})", path.display()))
            }
            Value::String(name) => Model::builtin(name).ok_or_else(|| {
                invalid(
                    "model",
                    format!("unknown built-in model {name:?}; expected one of {}", BUILTIN_MODELS.join(", ")),
                )
            }),
            v @ Value::Object(_) => Model::from_value(v, "model"),
            _ => Err(invalid("model", "expected a built-in name, a .json path or an object")),
        }
    }
}

pub const BUILTIN_MODELS: [&str; 5] = ["zero", "constant-half", "hadamard", "quasi-periodic", "strong-coupling"];

/// Specifications of a model, certified lazily.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dim: usize,
    pub alpha: Option<AlphaSource>,
    pub coins: Option<CoinSource>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSource {
    Zero,
    Constant(f64),
    Strong,
    RealTrig(f64),
    Spec(TrigPolySpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoinSource {
    Identity,
    Hadamard,
    QuasiPeriodic,
    Strong,
    Spec(CoinSpec),
}

impl Model {
    fn builtin(name: &str) -> Option<Model> {
        let (alpha, coins) = match name {
            "zero" => (AlphaSource::Zero, CoinSource::Identity),
            "constant-half" => (AlphaSource::Constant(0.5), CoinSource::Identity),
            "hadamard" => (AlphaSource::Zero, CoinSource::Hadamard),
            "quasi-periodic" => (AlphaSource::RealTrig(0.5), CoinSource::QuasiPeriodic),
            "strong-coupling" => (AlphaSource::Strong, CoinSource::Strong),
            _ => return None,
        };
        Some(Model {
            dim: 2,
            alpha: Some(alpha),
            coins: Some(coins),
        })
    }

    fn from_value(value: &Value, path: &str) -> Result<Model, ConfigError> {
        let file: ModelFile = serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Invalid {
            path: format!("{path}.{}", e.path()),
            message: e.inner().to_string(),
        })?;
        if file.d == 0 {
            return Err(invalid(&format!("{path}.d"), "must be ≥ 1"));
        }
        Ok(Model {
            dim: file.d,
            alpha: file.alpha.map(AlphaSource::Spec),
            coins: file.coins.map(CoinSource::Spec),
        })
    }

    pub fn sampling_function(&self) -> cmvlab::Result<SamplingFunction> {
        let src = self
            .alpha
            .as_ref()
            .ok_or_else(|| cmvlab::Error::ModelViolation("the model has no Verblunsky function".into()))?;
        match src {
            AlphaSource::Zero => Ok(SamplingFunction::zero(self.dim)),
            AlphaSource::Constant(c) => SamplingFunction::constant(self.dim, Complex64::new(*c, 0.0)),
            AlphaSource::Strong => Ok(SamplingFunction::strong_coupling()),
            AlphaSource::RealTrig(l) => SamplingFunction::real_trig(*l),
            AlphaSource::Spec(spec) => SamplingFunction::from_spec(self.dim, spec),
        }
    }

    pub fn coin_field(&self) -> cmvlab::Result<CoinField> {
        let src = self
            .coins
            .as_ref()
            .ok_or_else(|| cmvlab::Error::ModelViolation("the model has no coin field".into()))?;
        let field = match src {
            CoinSource::Identity => CoinField::identity(self.dim),
            CoinSource::Hadamard => CoinField::hadamard(self.dim),
            CoinSource::QuasiPeriodic => CoinField::quasi_periodic_rotation(0.6, 0.3, 0.2),
            CoinSource::Strong => CoinField::strong_coupling(),
            CoinSource::Spec(spec) => CoinField::from_spec(self.dim, spec)?,
        };
        field.certify()?;
        Ok(field)
    }
}
