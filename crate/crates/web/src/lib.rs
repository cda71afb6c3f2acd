//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every export takes and returns JSON strings. The `*_json` functions hold
//! the logic and are plain Rust so they can be tested natively.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use memsync::config::ScenarioConfig;
use memsync::model::{verify_assumptions, BuiltinParams};
use memsync::solver::run;
use memsync::thresholds::{compare_published, compute_all, ComparisonRow, DerivedConstants};

fn parse_config(json: &str) -> Result<ScenarioConfig, String> {
    let cfg = if json.trim().is_empty() {
        ScenarioConfig::default()
    } else {
        ScenarioConfig::from_json_str(json).map_err(|e| e.to_string())?
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

#[derive(Serialize)]
struct ThresholdsOut {
    constants: DerivedConstants,
    above_threshold: bool,
    comparison: Option<Vec<ComparisonRow>>,
}

/// Threshold chain for a scenario config given as JSON (empty = defaults).
pub fn thresholds_json(config: &str) -> Result<String, String> {
    let cfg = parse_config(config)?;
    let d = compute_all(&cfg.threshold_inputs().map_err(|e| e.to_string())?);
    let out = ThresholdsOut {
        above_threshold: d.above_threshold() == Some(true),
        comparison: cfg.published().map(|p| compare_published(&d, &p)),
        constants: d,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PreviewOut {
    times: Vec<f64>,
    /// `(i, j)` of each curve.
    pairs: Vec<(usize, usize)>,
    /// `total[p][k]`: total difference norm of pair `p` at record `k`.
    total: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
}

/// Runs a scenario and returns the pairwise difference curves.
/// `max_steps` caps `time.n_steps` so the page stays responsive.
pub fn preview_json(config: &str, max_steps: usize) -> Result<String, String> {
    let mut cfg = parse_config(config)?;
    cfg.time.n_steps = cfg.time.n_steps.min(max_steps.max(1));
    let sc = cfg.build_scenario(None).map_err(|e| e.to_string())?;
    let (traj, _) = run(&sc).map_err(|f| f.to_string())?;
    let pairs: Vec<(usize, usize)> = traj.records[0].diffs.iter().map(|d| (d.i, d.j)).collect();
    let curve = |p: usize, pick: fn(&memsync::diagnostics::DiffRecord) -> f64| -> Vec<f64> {
        traj.records.iter().map(|r| pick(&r.diffs[p])).collect()
    };
    let out = PreviewOut {
        total: (0..pairs.len()).map(|p| curve(p, |d| d.total)).collect(),
        u: (0..pairs.len()).map(|p| curve(p, |d| d.u)).collect(),
        times: traj.times,
        pairs,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyIn {
    model: String,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_range")]
    range: (f64, f64),
    /// Multipliers applied to the structural constants.
    #[serde(default)]
    scale: Vec<(String, f64)>,
}

fn default_samples() -> usize {
    30
}

fn default_range() -> (f64, f64) {
    (-5.0, 5.0)
}

#[derive(Serialize)]
struct VerifyRow {
    label: &'static str,
    passed: bool,
    margin: f64,
    violations: usize,
    s: f64,
    sigma: Vec<f64>,
}

#[derive(Serialize)]
struct VerifyOut {
    passed: bool,
    points: usize,
    rows: Vec<VerifyRow>,
}

/// Assumption check for a built-in model on the term-by-term constants.
pub fn verify_json(request: &str) -> Result<String, String> {
    let req: VerifyIn = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let params = BuiltinParams::from_tag(&req.model).ok_or_else(|| format!("unknown model `{}`", req.model))?;
    let cfg = ScenarioConfig {
        model: params,
        analysis: memsync::config::AnalysisConfig {
            constants: memsync::config::ConstantsSource::Derived,
            ..Default::default()
        },
        ..Default::default()
    };
    let model = params.build().map_err(|e| e.to_string())?;
    let mut gp = cfg.general_params();
    for (name, factor) in &req.scale {
        let current = gp
            .named()
            .iter()
            .find(|(n, _)| n == name)
            .map(|p| p.1)
            .ok_or_else(|| format!("unknown constant `{name}`"))?;
        gp.set(name, current * factor).map_err(|e| e.to_string())?;
    }
    let rep = verify_assumptions(&model, &gp, req.range, req.range, req.samples.clamp(2, 60))
        .map_err(|e| e.to_string())?;
    let out = VerifyOut {
        passed: rep.all_passed(),
        points: rep.points,
        rows: rep
            .outcomes
            .iter()
            .map(|o| VerifyRow {
                label: o.inequality.label(),
                passed: o.passed,
                margin: o.margin,
                violations: o.violations,
                s: o.worst_point.s,
                sigma: o.worst_point.sigma.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn thresholds(config: &str) -> Result<String, JsValue> {
    thresholds_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn preview(config: &str, max_steps: usize) -> Result<String, JsValue> {
    preview_json(config, max_steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn verify(request: &str) -> Result<String, JsValue> {
    verify_json(request).map_err(|e| JsValue::from_str(&e))
}
