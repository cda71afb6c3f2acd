//! Library side of the `memsync` command: config loading, the three
//! subcommands and their reports. `main.rs` only parses arguments and maps
//! [`CliError`] to exit codes.

pub mod output;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use memsync::config::{ConstantsSource, ScenarioConfig};
use memsync::diagnostics::{fit_exponential_rate_after, BoundMode, Snapshot};
use memsync::model::{verify_assumptions, BuiltinParams, NetworkState, ReactionModel};
use memsync::solver::{run, Trajectory};
use memsync::Error;

pub use report::{PairRate, SimulationReport, ThresholdReport, VerifyReport};

/// Failure of a subcommand. Each variant has a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    VerifyFailed(String),
    #[error("{0}")]
    Config(String),
    #[error("numeric blow-up at step {step}: {message}")]
    BlowUp { step: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::BlowUp { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn config_err(e: Error) -> CliError {
    match e {
        Error::Config { path, message } => CliError::Config(format!("config error at `{path}`: {message}")),
        Error::Unstable { ratio } => CliError::Config(format!(
            "stability condition violated: 4*eta*dt/dx^2 = {ratio} > 1 (pass --allow-unstable to run anyway)"
        )),
        other => CliError::Config(format!("invalid scenario: {other}")),
    }
}

/// Reads, parses and validates a config. A relative `init.checkpoint` is
/// resolved against the config file's directory.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut cfg = ScenarioConfig::parse(path, &text).map_err(config_err)?;
    cfg.validate().map_err(config_err)?;
    if let (Some(cp), Some(dir)) = (&cfg.init.checkpoint, path.parent()) {
        if cp.is_relative() {
            cfg.init.checkpoint = Some(dir.join(cp));
        }
    }
    Ok(cfg)
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub allow_unstable: bool,
    /// 0-based cell, overrides `analysis.probe`.
    pub probe: Option<(usize, usize)>,
}

fn load_checkpoint(path: &Path) -> Result<NetworkState, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let state: NetworkState = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("checkpoint {}: {e}", path.display())))?;
    state.validate().map_err(config_err)?;
    Ok(state)
}

fn write_file(path: &Path, f: impl FnOnce(fs::File) -> std::io::Result<()>) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    f(file).map_err(io_err(path))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_file(path, |f| {
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), value).map_err(std::io::Error::from)
    })
}

fn write_series(dir: &Path, records: &[Snapshot]) -> Result<(), CliError> {
    write_file(&dir.join("norms.csv"), |f| output::write_norms(std::io::BufWriter::new(f), records))?;
    write_file(&dir.join("diffs.csv"), |f| output::write_diffs(std::io::BufWriter::new(f), records))?;
    if records.first().is_some_and(|r| r.probe.is_some()) {
        write_file(&dir.join("probe.csv"), |f| output::write_probe(std::io::BufWriter::new(f), records))?;
    }
    Ok(())
}

/// Runs the scenario and writes `norms.csv`, `diffs.csv`, `report.json`
/// (plus `probe.csv` and `checkpoint_<step>.json` when requested) into `out`.
/// On a numeric blow-up the series recorded so far are still written.
pub fn simulate(cfg: &ScenarioConfig, out: &Path, opts: &SimulateOptions) -> Result<SimulationReport, CliError> {
    let mut cfg = cfg.clone();
    cfg.time.allow_unstable |= opts.allow_unstable;
    if let Some((i, j)) = opts.probe {
        cfg.analysis.probe = Some([i, j]);
    }
    cfg.validate().map_err(config_err)?;
    let initial = cfg.init.checkpoint.as_deref().map(load_checkpoint).transpose()?;
    let scenario = cfg.build_scenario(initial).map_err(config_err)?;
    scenario.validate().map_err(config_err)?;
    let thresholds = ThresholdReport::from_config(&cfg).map_err(config_err)?;

    fs::create_dir_all(out).map_err(io_err(out))?;
    let (traj, failure) = match run(&scenario) {
        Ok((traj, _)) => (traj, None),
        Err(f) => match f.error.step() {
            Some(step) => (f.partial, Some((step, f.error.to_string()))),
            None => return Err(config_err(f.error)),
        },
    };
    write_series(out, &traj.records)?;
    for cp in &traj.checkpoints {
        write_json(&out.join(format!("checkpoint_{}.json", cp.step)), &cp.state)?;
    }
    let report = SimulationReport::build(&cfg, &traj, thresholds, failure.clone());
    write_json(&out.join("report.json"), &report)?;
    match failure {
        Some((step, message)) => Err(CliError::BlowUp { step, message }),
        None => Ok(report),
    }
}

/// Rate fit of every pairwise total difference norm, after burn-in.
pub fn pair_rates(traj: &Trajectory, burn_in: f64) -> Vec<PairRate> {
    let Some(first) = traj.records.first() else {
        return Vec::new();
    };
    first
        .diffs
        .iter()
        .enumerate()
        .map(|(p, d)| {
            let values: Vec<f64> = traj.records.iter().map(|r| r.diffs[p].total).collect();
            let fit = fit_exponential_rate_after(&traj.times, &values, burn_in);
            PairRate {
                i: d.i,
                j: d.j,
                initial: values[0],
                last: *values.last().unwrap(),
                fit: fit.as_ref().ok().copied(),
                fit_error: fit.err().map(|e| e.to_string()),
            }
        })
        .collect()
}

/// Bound-check mode used in simulation reports.
pub const BOUND_MODE: BoundMode = BoundMode::Eventually;

/// Threshold report for a config.
pub fn thresholds(cfg: &ScenarioConfig) -> Result<ThresholdReport, CliError> {
    ThresholdReport::from_config(cfg).map_err(config_err)
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub model: BuiltinParams,
    pub samples: usize,
    pub s_range: (f64, f64),
    pub sigma_range: (f64, f64),
    pub constants: ConstantsSource,
    /// `(name, value)` replacements of structural constants, applied in order.
    pub set: Vec<(String, f64)>,
    /// `(name, factor)` multipliers, applied after `set`.
    pub scale: Vec<(String, f64)>,
}

impl VerifyOptions {
    pub fn new(model: BuiltinParams) -> Self {
        Self {
            model,
            samples: 50,
            s_range: (-5.0, 5.0),
            sigma_range: (-5.0, 5.0),
            constants: ConstantsSource::Derived,
            set: Vec::new(),
            scale: Vec::new(),
        }
    }
}

/// Samples the assumptions for a built-in model. A report with failures is
/// still `Ok`; the caller decides the exit status.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let cfg = ScenarioConfig {
        model: opts.model,
        analysis: memsync::config::AnalysisConfig {
            constants: opts.constants,
            ..Default::default()
        },
        ..Default::default()
    };
    let model = cfg.build_model().map_err(config_err)?;
    let mut gp = cfg.general_params();
    for (name, v) in &opts.set {
        gp.set(name, *v).map_err(config_err)?;
    }
    for (name, factor) in &opts.scale {
        let current = gp
            .named()
            .iter()
            .find(|(n, _)| n == name)
            .map(|p| p.1)
            .ok_or_else(|| CliError::Config(format!("unknown structural constant `{name}`")))?;
        gp.set(name, current * factor).map_err(config_err)?;
    }
    let report = verify_assumptions(&model, &gp, opts.s_range, opts.sigma_range, opts.samples)
        .map_err(config_err)?;
    Ok(VerifyReport {
        model: model.name().to_string(),
        constants: opts.constants,
        general_params: gp,
        s_range: opts.s_range,
        sigma_range: opts.sigma_range,
        passed: report.all_passed(),
        report,
    })
}
