//! Serializable summaries and their plain-text rendering.

use std::fmt::Write as _;

use serde::Serialize;

use memsync::config::{ConstantsSource, ScenarioConfig};
use memsync::diagnostics::{
    asynchronous_degree_estimate, check_bound, fit_exponential_rate_after, tail_pair_maxima, BoundCheck,
    NeuronNorms, RateFit,
};
use memsync::model::{AssumptionReport, GeneralParams};
use memsync::solver::{stability_check, Trajectory};
use memsync::thresholds::{
    compare_published, compute_all, compute_psi, ComparisonRow, DerivedConstants, PsiConstants,
};
use memsync::Error;

use crate::{pair_rates, BOUND_MODE};

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub model: String,
    /// `explicit`, `published` or `derived`.
    pub constants_source: String,
    pub constants: DerivedConstants,
    /// `above threshold` or `below threshold`.
    pub verdict: String,
    /// Present for the two benchmark setups.
    pub comparison: Option<Vec<ComparisonRow>>,
    /// Reversal-potential threshold, when `u_e` is set.
    pub psi: Option<PsiConstants>,
}

impl ThresholdReport {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, Error> {
        let inputs = cfg.threshold_inputs()?;
        let constants = compute_all(&inputs);
        let source = match (cfg.analysis.general_params, cfg.analysis.constants) {
            (Some(_), _) => "explicit",
            (None, ConstantsSource::Published) => "published",
            (None, ConstantsSource::Derived) => "derived",
        };
        let verdict = if constants.above_threshold() == Some(true) {
            "above threshold"
        } else {
            "below threshold"
        };
        Ok(Self {
            model: cfg.model.tag().to_string(),
            constants_source: source.to_string(),
            comparison: cfg.published().map(|p| compare_published(&constants, &p)),
            psi: cfg.psi_inputs()?.map(|p| compute_psi(&p)),
            constants,
            verdict: verdict.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let d = &self.constants;
        let inp = &d.inputs;
        let mut s = String::new();
        let _ = writeln!(s, "model: {} (structural constants: {})", self.model, self.constants_source);
        for (name, v) in inp.gp.named() {
            let _ = writeln!(s, "  {name:<7} = {v}");
        }
        let _ = writeln!(
            s,
            "m = {}, |Omega| = {}, C* = {}, r = {}, V = {}",
            inp.m, inp.area, inp.c_star, inp.r, inp.v
        );
        let published = |name: &str| {
            self.comparison
                .as_ref()
                .and_then(|rows| rows.iter().find(|r| r.name == name))
        };
        let line = |s: &mut String, name: &str, v: f64| {
            let _ = match published(name) {
                Some(r) => writeln!(
                    s,
                    "{name:<12} = {v:<22} published {:<10} {}",
                    r.published,
                    if r.matches_published { "match" } else { "MISMATCH" }
                ),
                None => writeln!(s, "{name:<12} = {v}"),
            };
        };
        line(&mut s, "C1", d.c1);
        line(&mut s, "C2", d.c2);
        line(&mut s, "mu", d.mu);
        line(&mut s, "K", d.k);
        line(&mut s, "Q", d.q);
        line(&mut s, "G", d.g);
        line(&mut s, "kappa", d.kappa);
        line(&mut s, "P_threshold", d.p_threshold);
        if let Some(rows) = &self.comparison {
            for r in rows.iter().filter(|r| r.name.contains('@')) {
                line(&mut s, &r.name, r.computed);
            }
        }
        if let (Some(p), Some(delta), Some(margin)) = (inp.p, d.delta, d.rate_margin) {
            let _ = writeln!(s, "P = {p}: {}", self.verdict);
            let _ = writeln!(
                s,
                "delta = min{{b, gamma, 2(mP/(1+exp(r(G+|V|))) - kappa)}} = min{{{}, {}, {margin}}} = {delta}",
                inp.membrane.b, inp.gp.gamma
            );
        }
        if let Some(psi) = &self.psi {
            let _ = writeln!(
                s,
                "reversal potential: C3 = {}, C4 = {}, mu~ = {}, K* = {}, Q* = {}, G* = {}, kappa~ = {}, V~ = {}",
                psi.c3, psi.c4, psi.mu_tilde, psi.k_star, psi.q_star, psi.g_star, psi.kappa_tilde, psi.v_tilde
            );
            let _ = writeln!(s, "Psi = {}", psi.psi);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRate {
    pub i: usize,
    pub j: usize,
    pub initial: f64,
    pub last: f64,
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairTail {
    pub i: usize,
    pub j: usize,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsyncDegree {
    pub tail_fraction: f64,
    /// Largest pairwise tail maximum.
    pub estimate: f64,
    /// Sum of the pairwise tail maxima.
    pub sum: f64,
    pub pairs: Vec<PairTail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    /// `‖g‖²` against `K`.
    pub energy_vs_k: BoundCheck,
    /// `Σ‖uᵢ‖⁴_{L⁴}` against `Q`.
    pub l4_vs_q: BoundCheck,
    /// `max_x Σ|uᵢ|` against `G`.
    pub sup_vs_g: BoundCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub step: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub format: String,
    pub model: String,
    pub status: String,
    pub failure: Option<Failure>,
    pub dt: f64,
    pub n_steps: usize,
    pub recorded: usize,
    pub final_time: f64,
    pub stability_ratio: f64,
    pub probe: Option<[usize; 2]>,
    pub final_norms: Vec<NeuronNorms>,
    pub final_energy_sq: f64,
    pub burn_in_fraction: f64,
    pub energy_rate: Option<RateFit>,
    pub pair_rates: Vec<PairRate>,
    /// Smallest fitted pairwise rate.
    pub min_pair_rate: Option<f64>,
    pub asynchronous_degree: AsyncDegree,
    pub bounds: Bounds,
    pub thresholds: ThresholdReport,
}

impl SimulationReport {
    pub fn build(
        cfg: &ScenarioConfig,
        traj: &Trajectory,
        thresholds: ThresholdReport,
        failure: Option<(usize, String)>,
    ) -> Self {
        let burn_in = cfg.analysis.burn_in_fraction;
        let tail = cfg.analysis.tail_fraction;
        let last = traj.records.last();
        let rates = pair_rates(traj, burn_in);
        let min_pair_rate = rates
            .iter()
            .filter_map(|p| p.fit.map(|f| f.rate))
            .reduce(f64::min);
        let maxima = tail_pair_maxima(traj, tail);
        let pairs = rates
            .iter()
            .zip(&maxima)
            .map(|(p, &max)| PairTail { i: p.i, j: p.j, max })
            .collect();
        let series = |f: fn(&memsync::diagnostics::Snapshot) -> f64| -> Vec<(f64, f64)> {
            traj.records.iter().map(|r| (r.t, f(r))).collect()
        };
        let energy: Vec<f64> = traj.records.iter().map(|r| r.energy_sq).collect();
        let c = &thresholds.constants;
        let bounds = Bounds {
            energy_vs_k: check_bound(&series(|r| r.energy_sq), c.k, BOUND_MODE),
            l4_vs_q: check_bound(&series(|r| r.l4_sum), c.q, BOUND_MODE),
            sup_vs_g: check_bound(&series(|r| r.sup_sum), c.g, BOUND_MODE),
        };
        let eta = cfg.build_model().map(|m| memsync::model::ReactionModel::membrane(&m).eta).unwrap_or(f64::NAN);
        Self {
            format: "memsync report v1".into(),
            model: cfg.model.tag().into(),
            status: if failure.is_some() { "blow-up" } else { "ok" }.into(),
            failure: failure.map(|(step, message)| Failure { step, message }),
            dt: cfg.time.dt,
            n_steps: cfg.time.n_steps,
            recorded: traj.len(),
            final_time: traj.times.last().copied().unwrap_or(0.0),
            stability_ratio: stability_check(eta, cfg.grid.dx, cfg.time.dt).ratio,
            probe: cfg.analysis.probe,
            final_norms: last.map(|r| r.neurons.clone()).unwrap_or_default(),
            final_energy_sq: last.map_or(f64::NAN, |r| r.energy_sq),
            burn_in_fraction: burn_in,
            energy_rate: fit_exponential_rate_after(&traj.times, &energy, burn_in).ok(),
            pair_rates: rates,
            min_pair_rate,
            asynchronous_degree: AsyncDegree {
                tail_fraction: tail,
                estimate: asynchronous_degree_estimate(traj, tail),
                sum: maxima.iter().sum(),
                pairs,
            },
            bounds,
            thresholds,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub model: String,
    pub constants: ConstantsSource,
    pub general_params: GeneralParams,
    pub s_range: (f64, f64),
    pub sigma_range: (f64, f64),
    pub passed: bool,
    pub report: AssumptionReport,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "model: {}, {} points ({} per axis), s in [{}, {}], sigma in [{}, {}]",
            self.model,
            self.report.points,
            self.report.samples_per_axis,
            self.s_range.0,
            self.s_range.1,
            self.sigma_range.0,
            self.sigma_range.1
        );
        for o in &self.report.outcomes {
            let status = if o.passed { "pass" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{status} {:<40} margin {:>12.6e}  violations {}",
                o.inequality.label(),
                o.margin,
                o.violations
            );
            if !o.passed {
                let _ = writeln!(
                    s,
                    "     counterexample s = {}, sigma = {:?}: lhs = {}, rhs = {}",
                    o.worst_point.s, o.worst_point.sigma, o.lhs, o.rhs
                );
            }
            if let Some(p) = &o.non_finite_at {
                let _ = writeln!(s, "     non-finite model output at s = {}, sigma = {:?}", p.s, p.sigma);
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "all assumptions hold" } else { "assumptions violated" });
        s
    }
}
