//! Scenario configuration files.
//!
//! TOML (or JSON, chosen by file extension) with a strict schema: unknown
//! keys are rejected and every section may be omitted to get the 32×32
//! benchmark setup.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::grid::GridShape;
use crate::model::builtin::{BuiltinModel, BuiltinParams};
use crate::model::params::{fhn_general_params, hr_derived_params, hr_general_params, GeneralParams};
use crate::model::reaction::{CouplingParams, ReactionModel};
use crate::model::state::{init_random, NetworkState};
use crate::solver::{CouplingSum, Scenario};
use crate::thresholds::{PsiInputs, PublishedConstants, ThresholdInputs, DEFAULT_C_STAR};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nx: 32,
            ny: 32,
            dx: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub record_every: usize,
    pub allow_unstable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checkpoint_steps: Vec<usize>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            dt: 0.00025,
            n_steps: 2000,
            record_every: 1,
            allow_unstable: false,
            checkpoint_steps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub m: usize,
    pub coupling: CouplingParams,
    pub coupling_sum: CouplingSum,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            m: 4,
            coupling: CouplingParams::default(),
            coupling_sum: CouplingSum::All,
        }
    }
}

/// Seeded uniform initial data, or a state file written by a previous run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitConfig {
    pub seed: u64,
    pub amplitude: f64,
    /// Takes precedence over `seed`/`amplitude` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            amplitude: 0.1,
            checkpoint: None,
        }
    }
}

/// Which structural-constant map backs the threshold computation for
/// built-in models.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    /// Published parameter table.
    #[default]
    Published,
    /// Term-by-term derivation (differs for Hindmarsh-Rose only).
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    #[serde(rename = "C_star")]
    pub c_star: f64,
    pub tail_fraction: f64,
    pub burn_in_fraction: f64,
    /// 0-based `[i, j]` cell whose point values are recorded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<[usize; 2]>,
    pub constants: ConstantsSource,
    /// Explicit structural constants; overrides `constants`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub general_params: Option<GeneralParams>,
    /// Shifted constants for the reversal-potential threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tilde_params: Option<GeneralParams>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            c_star: DEFAULT_C_STAR,
            tail_fraction: 0.1,
            burn_in_fraction: crate::diagnostics::DEFAULT_BURN_IN,
            probe: None,
            constants: ConstantsSource::Published,
            general_params: None,
            tilde_params: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub model: BuiltinParams,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub network: NetworkConfig,
    pub init: InitConfig,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

fn config_error<E: std::fmt::Display>(err: serde_path_to_error::Error<E>) -> Error {
    let path = err.path().to_string();
    Error::Config {
        path,
        message: err.into_inner().to_string(),
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, Error> {
        let de = toml::Deserializer::new(s);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(config_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(s: &str) -> Result<Self, Error> {
        let mut de = serde_json::Deserializer::from_str(s);
        let cfg: Self = serde_path_to_error::deserialize(&mut de).map_err(config_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses by extension: `.json` as JSON, anything else as TOML.
    pub fn parse(path: &Path, text: &str) -> Result<Self, Error> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(text),
            _ => Self::from_toml_str(text),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Semantic checks beyond the schema, each reported with its key path.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |path: &str, message: String| Error::Config {
            path: path.to_string(),
            message,
        };
        GridShape::new(self.grid.nx, self.grid.ny, self.grid.dx)
            .map_err(|e| bad("grid", e.to_string()))?;
        self.model.build().map_err(|e| bad("model", e.to_string()))?;
        if !(self.time.dt.is_finite() && self.time.dt > 0.0) {
            return Err(bad("time.dt", format!("must be positive, got {}", self.time.dt)));
        }
        if self.time.n_steps == 0 {
            return Err(bad("time.n_steps", "must be at least 1".into()));
        }
        if self.time.record_every == 0 {
            return Err(bad("time.record_every", "must be at least 1".into()));
        }
        if self.network.m < 2 {
            return Err(bad("network.m", format!("need at least 2 neurons, got {}", self.network.m)));
        }
        self.network
            .coupling
            .validate()
            .map_err(|e| bad("network.coupling", e.to_string()))?;
        if !(self.init.amplitude.is_finite() && self.init.amplitude >= 0.0) {
            return Err(bad("init.amplitude", format!("must be nonnegative, got {}", self.init.amplitude)));
        }
        let a = &self.analysis;
        if !(a.c_star.is_finite() && a.c_star > 0.0) {
            return Err(bad("analysis.C_star", format!("must be positive, got {}", a.c_star)));
        }
        if !(a.tail_fraction > 0.0 && a.tail_fraction <= 1.0) {
            return Err(bad("analysis.tail_fraction", format!("must lie in (0, 1], got {}", a.tail_fraction)));
        }
        if !(0.0..1.0).contains(&a.burn_in_fraction) {
            return Err(bad("analysis.burn_in_fraction", format!("must lie in [0, 1), got {}", a.burn_in_fraction)));
        }
        if let Some([i, j]) = a.probe {
            if i >= self.grid.nx || j >= self.grid.ny {
                return Err(bad("analysis.probe", format!("({i}, {j}) outside the grid")));
            }
        }
        if let Some(gp) = &a.general_params {
            gp.validate().map_err(|e| bad("analysis.general_params", e.to_string()))?;
        }
        if let Some(gp) = &a.tilde_params {
            gp.validate().map_err(|e| bad("analysis.tilde_params", e.to_string()))?;
        }
        Ok(())
    }

    pub fn shape(&self) -> Result<GridShape, Error> {
        GridShape::new(self.grid.nx, self.grid.ny, self.grid.dx)
    }

    pub fn build_model(&self) -> Result<BuiltinModel, Error> {
        self.model.build()
    }

    /// Seeded initial state described by `init`.
    pub fn initial_state(&self) -> Result<NetworkState, Error> {
        let model = self.build_model()?;
        init_random(
            self.shape()?,
            self.network.m,
            model.ell(),
            self.init.amplitude,
            self.init.seed,
        )
    }

    /// Scenario with the given initial state, or the seeded one.
    pub fn build_scenario(&self, initial: Option<NetworkState>) -> Result<Scenario<BuiltinModel>, Error> {
        let model = self.build_model()?;
        let initial = match initial {
            Some(s) => s,
            None => self.initial_state()?,
        };
        if initial.shape() != self.shape()? || initial.m() != self.network.m {
            return Err(Error::Config {
                path: "init.checkpoint".into(),
                message: format!(
                    "state has {} neurons on {}x{}, config expects {} on {}x{}",
                    initial.m(),
                    initial.shape().nx,
                    initial.shape().ny,
                    self.network.m,
                    self.grid.nx,
                    self.grid.ny
                ),
            });
        }
        let mut sc = Scenario::new(
            model,
            self.network.coupling,
            initial,
            self.time.dt,
            self.time.n_steps,
        );
        sc.record_every = self.time.record_every;
        sc.coupling_sum = self.network.coupling_sum;
        sc.allow_unstable = self.time.allow_unstable;
        sc.checkpoint_steps = self.time.checkpoint_steps.clone();
        sc.probe = self.analysis.probe.map(|[i, j]| (i, j));
        Ok(sc)
    }

    pub fn general_params(&self) -> GeneralParams {
        if let Some(gp) = self.analysis.general_params {
            return gp;
        }
        match (&self.model, self.analysis.constants) {
            (BuiltinParams::HindmarshRose(p), ConstantsSource::Published) => hr_general_params(p),
            (BuiltinParams::HindmarshRose(p), ConstantsSource::Derived) => hr_derived_params(p),
            (BuiltinParams::FitzhughNagumo(p), _) => fhn_general_params(p),
        }
    }

    pub fn threshold_inputs(&self) -> Result<ThresholdInputs, Error> {
        let model = self.build_model()?;
        Ok(ThresholdInputs {
            gp: self.general_params(),
            membrane: model.membrane(),
            m: self.network.m,
            area: self.shape()?.area(),
            c_star: self.analysis.c_star,
            r: self.network.coupling.r,
            v: self.network.coupling.v,
            p: Some(self.network.coupling.p),
        })
    }

    /// Inputs of the reversal-potential threshold, when `u_e` is set.
    pub fn psi_inputs(&self) -> Result<Option<PsiInputs>, Error> {
        let Some(u_e) = self.network.coupling.u_e else {
            return Ok(None);
        };
        let base = self.threshold_inputs()?;
        Ok(Some(PsiInputs {
            tilde: self.analysis.tilde_params.unwrap_or(base.gp),
            membrane: base.membrane,
            m: base.m,
            area: base.area,
            u_e,
            r: base.r,
            v: base.v,
            c_star: base.c_star,
        }))
    }

    /// Published constants, when this config is one of the benchmark setups.
    pub fn published(&self) -> Option<PublishedConstants> {
        let default_setup = self.grid == GridConfig::default()
            && self.network.m == 4
            && self.network.coupling.r == 0.1
            && self.network.coupling.v == 0.5
            && self.network.coupling.u_e.is_none()
            && self.analysis.c_star == DEFAULT_C_STAR
            && self.analysis.general_params.is_none()
            && self.analysis.constants == ConstantsSource::Published;
        if !default_setup {
            return None;
        }
        match self.model {
            BuiltinParams::HindmarshRose(p) if p == Default::default() => {
                Some(PublishedConstants::HINDMARSH_ROSE)
            }
            BuiltinParams::FitzhughNagumo(p) if p == Default::default() => {
                Some(PublishedConstants::FITZHUGH_NAGUMO)
            }
            _ => None,
        }
    }
}
