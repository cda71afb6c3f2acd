//! Norms, synchronization metrics, decay-rate fits and ultimate-bound checks.
//!
//! All reductions run sequentially in fixed index order with Neumaier
//! compensated summation, so results do not depend on thread count.

use serde::{Deserialize, Serialize};

use crate::grid::FieldGrid;
use crate::model::state::{NetworkState, NeuronFields};
use crate::solver::Trajectory;
use crate::Error;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

fn sum_of(iter: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in iter {
        acc.add(v);
    }
    acc.total()
}

/// Discrete `L²` norm `sqrt(Σ v² · dx²)`.
pub fn l2_norm(field: &FieldGrid) -> f64 {
    l2_norm_sq(field).sqrt()
}

fn l2_norm_sq(field: &FieldGrid) -> f64 {
    sum_of(field.values().iter().map(|v| v * v)) * field.shape().cell_area()
}

fn l2_diff_sq(a: &FieldGrid, b: &FieldGrid) -> f64 {
    sum_of(a.values().iter().zip(b.values()).map(|(x, y)| {
        let d = x - y;
        d * d
    })) * a.shape().cell_area()
}

/// `‖u‖⁴_{L⁴} = Σ v⁴ · dx²`.
pub fn l4_norm4(field: &FieldGrid) -> f64 {
    sum_of(field.values().iter().map(|v| {
        let v2 = v * v;
        v2 * v2
    })) * field.shape().cell_area()
}

fn neuron_energy_sq(n: &NeuronFields) -> f64 {
    sum_of(n.components().map(l2_norm_sq))
}

/// `Σᵢ (‖uᵢ‖² + ‖zᵢ‖² + ‖ρᵢ‖²)`.
pub fn energy_norm_sq(state: &NetworkState) -> f64 {
    sum_of(state.neurons.iter().map(neuron_energy_sq))
}

/// `L²` norms of the differences between neurons `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffRecord {
    pub t: f64,
    pub i: usize,
    pub j: usize,
    /// `‖uᵢ − uⱼ‖`
    pub u: f64,
    /// `‖zᵢ − zⱼ‖` over all ionic components.
    pub z: f64,
    /// `‖ρᵢ − ρⱼ‖`
    pub rho: f64,
    /// Energy-norm difference `sqrt(u² + z² + ρ²)`.
    pub total: f64,
}

pub fn diff_record(state: &NetworkState, i: usize, j: usize) -> DiffRecord {
    let (a, b) = (&state.neurons[i], &state.neurons[j]);
    let u2 = l2_diff_sq(&a.u, &b.u);
    let z2 = sum_of(a.z.iter().zip(&b.z).map(|(x, y)| l2_diff_sq(x, y)));
    let r2 = l2_diff_sq(&a.rho, &b.rho);
    DiffRecord {
        t: state.t,
        i,
        j,
        u: u2.sqrt(),
        z: z2.sqrt(),
        rho: r2.sqrt(),
        total: (u2 + z2 + r2).sqrt(),
    }
}

/// All `m(m−1)/2` pairs `i < j`, in lexicographic order.
pub fn pairwise_diff_norms(state: &NetworkState) -> Vec<DiffRecord> {
    let m = state.m();
    let mut out = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            out.push(diff_record(state, i, j));
        }
    }
    out
}

/// `max_x Σᵢ |uᵢ(x)|`.
pub fn sup_potential_sum(state: &NetworkState) -> f64 {
    let len = state.shape().len();
    (0..len)
        .map(|cell| sum_of(state.neurons.iter().map(|n| n.u.values()[cell].abs())))
        .fold(0.0, f64::max)
}

/// Per-component norms of one neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronNorms {
    pub u: f64,
    pub z: Vec<f64>,
    pub rho: f64,
}

/// Point values of one neuron at the probe cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub u: f64,
    pub z: Vec<f64>,
    pub rho: f64,
}

/// Diagnostics of one recorded instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub neurons: Vec<NeuronNorms>,
    pub energy_sq: f64,
    /// `Σᵢ ‖uᵢ‖⁴_{L⁴}`
    pub l4_sum: f64,
    /// `max_x Σᵢ |uᵢ(x)|`
    pub sup_sum: f64,
    pub diffs: Vec<DiffRecord>,
    pub probe: Option<Vec<ProbeSample>>,
}

pub fn snapshot(state: &NetworkState, probe: Option<(usize, usize)>) -> Snapshot {
    Snapshot {
        t: state.t,
        neurons: state
            .neurons
            .iter()
            .map(|n| NeuronNorms {
                u: l2_norm(&n.u),
                z: n.z.iter().map(l2_norm).collect(),
                rho: l2_norm(&n.rho),
            })
            .collect(),
        energy_sq: energy_norm_sq(state),
        l4_sum: sum_of(state.neurons.iter().map(|n| l4_norm4(&n.u))),
        sup_sum: sup_potential_sum(state),
        diffs: pairwise_diff_norms(state),
        probe: probe.map(|(i, j)| {
            state
                .neurons
                .iter()
                .map(|n| ProbeSample {
                    u: n.u.get(i, j),
                    z: n.z.iter().map(|z| z.get(i, j)).collect(),
                    rho: n.rho.get(i, j),
                })
                .collect()
        }),
    }
}

/// Log-linear least-squares fit `value ≈ C·exp(−rate·t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub r_squared: f64,
    /// Samples used after trimming.
    pub samples: usize,
}

/// Fits the decay rate of a positive series.
///
/// The series is cut at its first non-positive (or non-finite) value.
pub fn fit_exponential_rate(times: &[f64], values: &[f64]) -> Result<RateFit, Error> {
    let n = times
        .iter()
        .zip(values)
        .take_while(|(t, v)| t.is_finite() && v.is_finite() && **v > 0.0)
        .count();
    if n < 3 {
        return Err(Error::InsufficientData { found: n });
    }
    let ts = &times[..n];
    let ys: Vec<f64> = values[..n].iter().map(|v| v.ln()).collect();
    let nf = n as f64;
    let t_mean = sum_of(ts.iter().copied()) / nf;
    let y_mean = sum_of(ys.iter().copied()) / nf;
    let sxx = sum_of(ts.iter().map(|t| (t - t_mean) * (t - t_mean)));
    let sxy = sum_of(ts.iter().zip(&ys).map(|(t, y)| (t - t_mean) * (y - y_mean)));
    if sxx == 0.0 {
        return Err(Error::InsufficientData { found: 1 });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let ss_tot = sum_of(ys.iter().map(|y| (y - y_mean) * (y - y_mean)));
    let ss_res = sum_of(ts.iter().zip(&ys).map(|(t, y)| {
        let r = y - (intercept + slope * t);
        r * r
    }));
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        rate: -slope,
        r_squared,
        samples: n,
    })
}

/// Default fraction of leading samples dropped as transient.
pub const DEFAULT_BURN_IN: f64 = 0.1;

/// [`fit_exponential_rate`] after dropping the leading `burn_in_fraction`
/// of the samples.
pub fn fit_exponential_rate_after(
    times: &[f64],
    values: &[f64],
    burn_in_fraction: f64,
) -> Result<RateFit, Error> {
    let skip = ((times.len() as f64) * burn_in_fraction.clamp(0.0, 1.0)).floor() as usize;
    let skip = skip.min(times.len());
    fit_exponential_rate(&times[skip..], &values[skip..])
}

fn tail_start(len: usize, tail_fraction: f64) -> usize {
    let keep = ((len as f64) * tail_fraction.clamp(0.0, 1.0)).ceil() as usize;
    len - keep.clamp(1, len)
}

/// Largest total difference norm of each pair over the trailing
/// `tail_fraction` of recorded instants, in record order.
pub fn tail_pair_maxima(traj: &Trajectory, tail_fraction: f64) -> Vec<f64> {
    if traj.is_empty() {
        return Vec::new();
    }
    let start = tail_start(traj.len(), tail_fraction);
    let pairs = traj.records[0].diffs.len();
    (0..pairs)
        .map(|p| {
            traj.records[start..]
                .iter()
                .map(|r| r.diffs[p].total)
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Finite-horizon surrogate of the asynchronous degree: the largest pairwise
/// total difference norm over the trailing `tail_fraction` of the record.
pub fn asynchronous_degree_estimate(traj: &Trajectory, tail_fraction: f64) -> f64 {
    tail_pair_maxima(traj, tail_fraction)
        .into_iter()
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// Value stays below the bound from some instant through the end.
    Eventually,
    /// Value is below the bound at every instant.
    Always,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub mode: BoundMode,
    pub bound: f64,
    pub passed: bool,
    /// First instant after which the series stays below the bound.
    pub entry_time: Option<f64>,
    pub max_value: f64,
    pub final_value: f64,
}

pub fn check_bound(series: &[(f64, f64)], bound: f64, mode: BoundMode) -> BoundCheck {
    let max_value = series.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let final_value = series.last().map_or(f64::NAN, |p| p.1);
    // index of the first sample of the trailing run below the bound
    let mut entry = series.len();
    while entry > 0 && series[entry - 1].1 < bound {
        entry -= 1;
    }
    let entry_time = (entry < series.len()).then(|| series[entry].0);
    let passed = match mode {
        BoundMode::Eventually => entry_time.is_some(),
        BoundMode::Always => !series.is_empty() && entry == 0,
    };
    BoundCheck {
        mode,
        bound,
        passed,
        entry_time,
        max_value,
        final_value,
    }
}
