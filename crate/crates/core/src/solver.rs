//! Explicit finite-difference integration of the network on a 2-D grid.
//!
//! Space: cell-centered 5-point Laplacian with mirror ghost cells (the
//! ghost across a boundary face equals the cell inside it), which gives a
//! zero-flux boundary and conserves `Σ u` under pure diffusion.
//! Time: forward Euler. State `n+1` reads only state `n`, so neurons may be
//! updated in parallel without affecting the result.

use serde::Serialize;

use crate::diagnostics::{snapshot, Snapshot};
use crate::grid::{FieldGrid, GridShape};
use crate::model::reaction::{gamma, CouplingParams, ReactionModel};
use crate::model::state::{NetworkState, NeuronFields};
use crate::{Error, Term};

/// 5-point Laplacian with homogeneous Neumann (mirror) boundaries.
pub fn laplacian_neumann(field: &FieldGrid) -> Result<FieldGrid, Error> {
    let shape = field.shape();
    if shape.nx < 3 || shape.ny < 3 {
        return Err(Error::GridTooSmall {
            nx: shape.nx,
            ny: shape.ny,
        });
    }
    let mut out = FieldGrid::zeros(shape);
    laplacian_into(field.values(), shape, out.values_mut());
    Ok(out)
}

// Written as a sum of face differences so constants map to exactly zero.
fn laplacian_into(f: &[f64], shape: GridShape, out: &mut [f64]) {
    let (nx, ny) = (shape.nx, shape.ny);
    let inv_dx2 = 1.0 / (shape.dx * shape.dx);
    for j in 0..ny {
        let row = j * nx;
        for i in 0..nx {
            let c = f[row + i];
            let w = if i > 0 { f[row + i - 1] } else { c };
            let e = if i + 1 < nx { f[row + i + 1] } else { c };
            let s = if j > 0 { f[row - nx + i] } else { c };
            let n = if j + 1 < ny { f[row + nx + i] } else { c };
            out[row + i] = (((w - c) + (e - c)) + ((s - c) + (n - c))) * inv_dx2;
        }
    }
}

/// Which neurons enter the coupling sum seen by neuron `i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSum {
    /// `Σ_{j=1..m} Γ(u_j)`, self-term included.
    #[default]
    All,
    /// `Σ_{j≠i} Γ(u_j)`.
    ExcludeSelf,
}

/// `S(x) = Σ_j Γ(u_j(x))` over all neurons.
pub fn coupling_field(state: &NetworkState, coupling: &CouplingParams) -> FieldGrid {
    let shape = state.shape();
    let mut out = FieldGrid::zeros(shape);
    for n in &state.neurons {
        for (acc, &u) in out.values_mut().iter_mut().zip(n.u.values()) {
            *acc += gamma(u, coupling.r, coupling.v);
        }
    }
    out
}

/// Time derivative of every neuron, ordered like `state.neurons`.
pub type Derivative = Vec<NeuronFields>;

pub fn rhs(
    state: &NetworkState,
    model: &dyn ReactionModel,
    coupling: &CouplingParams,
) -> Result<Derivative, Error> {
    rhs_with(state, model, coupling, CouplingSum::All)
}

pub fn rhs_with(
    state: &NetworkState,
    model: &dyn ReactionModel,
    coupling: &CouplingParams,
    sum: CouplingSum,
) -> Result<Derivative, Error> {
    check_ell(state, model)?;
    let s_field = coupling_field(state, coupling);
    map_neurons(&state.neurons, |idx, n| {
        neuron_rhs(idx, n, model, coupling, &s_field, sum)
    })
}

fn check_ell(state: &NetworkState, model: &dyn ReactionModel) -> Result<(), Error> {
    if state.ell() != model.ell() {
        return Err(Error::InconsistentState(format!(
            "state has {} ionic components, model `{}` expects {}",
            state.ell(),
            model.name(),
            model.ell()
        )));
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn map_neurons<F>(neurons: &[NeuronFields], f: F) -> Result<Vec<NeuronFields>, Error>
where
    F: Fn(usize, &NeuronFields) -> Result<NeuronFields, Error> + Sync,
{
    use rayon::prelude::*;
    neurons
        .par_iter()
        .enumerate()
        .map(|(i, n)| f(i, n))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_neurons<F>(neurons: &[NeuronFields], f: F) -> Result<Vec<NeuronFields>, Error>
where
    F: Fn(usize, &NeuronFields) -> Result<NeuronFields, Error>,
{
    neurons.iter().enumerate().map(|(i, n)| f(i, n)).collect()
}

fn neuron_rhs(
    idx: usize,
    n: &NeuronFields,
    model: &dyn ReactionModel,
    coupling: &CouplingParams,
    s_field: &FieldGrid,
    sum: CouplingSum,
) -> Result<NeuronFields, Error> {
    let shape = n.shape();
    let ell = n.ell();
    let mb = model.membrane();
    let u_e = coupling.reversal();

    let mut out = NeuronFields::zeros(shape, ell);
    laplacian_into(n.u.values(), shape, out.u.values_mut());

    let mut sigma = vec![0.0; ell];
    let mut lam = vec![0.0; ell];
    let mut hv = vec![0.0; ell];
    let fail = |cell: usize, term: Term| Error::NonFinite {
        neuron: idx,
        i: cell % shape.nx,
        j: cell / shape.nx,
        term,
    };

    for cell in 0..shape.len() {
        let u = n.u.values()[cell];
        let rho = n.rho.values()[cell];
        for (c, z) in n.z.iter().enumerate() {
            sigma[c] = z.values()[cell];
        }

        let diffusion = mb.eta * out.u.values()[cell];
        let reaction = model.f(u, &sigma);
        let memristor = mb.k * rho.tanh() * u;
        let s = match sum {
            CouplingSum::All => s_field.values()[cell],
            CouplingSum::ExcludeSelf => s_field.values()[cell] - gamma(u, coupling.r, coupling.v),
        };
        let coupled = coupling.p * (u - u_e) * s;
        let du = diffusion + reaction - memristor - coupled;
        if !du.is_finite() {
            let term = [
                (Term::Diffusion, diffusion),
                (Term::Reaction, reaction),
                (Term::Memristor, memristor),
                (Term::Coupling, coupled),
            ]
            .into_iter()
            .find(|(_, v)| !v.is_finite())
            .map_or(Term::Reaction, |(t, _)| t);
            return Err(fail(cell, term));
        }
        out.u.values_mut()[cell] = du;

        model.lambda_apply(&sigma, &mut lam);
        model.h(u, &sigma, &mut hv);
        for c in 0..ell {
            let dz = lam[c] + hv[c];
            if !dz.is_finite() {
                return Err(fail(cell, Term::Ionic));
            }
            out.z[c].values_mut()[cell] = dz;
        }

        let drho = mb.a * u - mb.b * rho;
        if !drho.is_finite() {
            return Err(fail(cell, Term::Memductance));
        }
        out.rho.values_mut()[cell] = drho;
    }
    Ok(out)
}

/// One forward-Euler step: `state + dt·rhs(state)`, `t += dt`.
pub fn step_euler(
    state: &NetworkState,
    model: &dyn ReactionModel,
    coupling: &CouplingParams,
    dt: f64,
) -> Result<NetworkState, Error> {
    step_euler_with(state, model, coupling, dt, CouplingSum::All)
}

pub fn step_euler_with(
    state: &NetworkState,
    model: &dyn ReactionModel,
    coupling: &CouplingParams,
    dt: f64,
    sum: CouplingSum,
) -> Result<NetworkState, Error> {
    check_ell(state, model)?;
    let s_field = coupling_field(state, coupling);
    let neurons = map_neurons(&state.neurons, |idx, n| {
        let d = neuron_rhs(idx, n, model, coupling, &s_field, sum)?;
        let mut next = n.clone();
        next.axpy(dt, &d);
        if let Some((c, cell)) = next
            .components()
            .enumerate()
            .find_map(|(c, f)| f.values().iter().position(|v| !v.is_finite()).map(|p| (c, p)))
        {
            let shape = n.shape();
            let term = match c {
                0 => Term::Reaction,
                c if c == n.ell() + 1 => Term::Memductance,
                _ => Term::Ionic,
            };
            return Err(Error::NonFinite {
                neuron: idx,
                i: cell % shape.nx,
                j: cell / shape.nx,
                term,
            });
        }
        Ok(next)
    })?;
    Ok(NetworkState {
        neurons,
        t: state.t + dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityCheck {
    /// `4·η·dt/dx²`
    pub ratio: f64,
    pub passed: bool,
}

/// Explicit 2-D diffusion bound `4·η·dt/dx² ≤ 1`.
pub fn stability_check(eta: f64, dx: f64, dt: f64) -> StabilityCheck {
    let ratio = 4.0 * eta * dt / (dx * dx);
    StabilityCheck {
        ratio,
        passed: ratio <= 1.0,
    }
}

/// A fully specified simulation.
#[derive(Debug, Clone)]
pub struct Scenario<M> {
    pub model: M,
    pub coupling: CouplingParams,
    pub dt: f64,
    pub n_steps: usize,
    /// Diagnostics cadence in steps; step 0 and the final step are always recorded.
    pub record_every: usize,
    pub initial: NetworkState,
    pub coupling_sum: CouplingSum,
    pub allow_unstable: bool,
    /// Steps at which the full state is stored.
    pub checkpoint_steps: Vec<usize>,
    /// 0-based cell `(i, j)` whose point values are recorded.
    pub probe: Option<(usize, usize)>,
}

impl<M: ReactionModel> Scenario<M> {
    pub fn new(model: M, coupling: CouplingParams, initial: NetworkState, dt: f64, n_steps: usize) -> Self {
        Self {
            model,
            coupling,
            dt,
            n_steps,
            record_every: 1,
            initial,
            coupling_sum: CouplingSum::All,
            allow_unstable: false,
            checkpoint_steps: Vec::new(),
            probe: None,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
            });
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                value: 0.0,
            });
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "record_every",
                value: 0.0,
            });
        }
        self.coupling.validate()?;
        self.initial.validate()?;
        check_ell(&self.initial, &self.model)?;
        if let Some((i, j)) = self.probe {
            let sh = self.initial.shape();
            if i >= sh.nx || j >= sh.ny {
                return Err(Error::InconsistentState(format!(
                    "probe ({i}, {j}) outside {}x{} grid",
                    sh.nx, sh.ny
                )));
            }
        }
        let st = stability_check(self.model.membrane().eta, self.initial.shape().dx, self.dt);
        if !st.passed && !self.allow_unstable {
            return Err(Error::Unstable { ratio: st.ratio });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Checkpoint {
    pub step: usize,
    pub state: NetworkState,
}

/// Diagnostics recorded during a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Trajectory {
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    pub records: Vec<Snapshot>,
    pub checkpoints: Vec<Checkpoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn push(&mut self, step: usize, state: &NetworkState, probe: Option<(usize, usize)>) {
        self.steps.push(step);
        self.times.push(state.t);
        self.records.push(snapshot(state, probe));
    }
}

/// A failed run together with everything recorded before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Trajectory,
    /// Last finite state.
    pub last_state: Option<NetworkState>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Integrates `n_steps` and returns the trajectory with the final state.
#[allow(clippy::result_large_err)]
pub fn run<M: ReactionModel>(scenario: &Scenario<M>) -> Result<(Trajectory, NetworkState), RunFailure> {
    let mut traj = Trajectory::default();
    if let Err(error) = scenario.validate() {
        return Err(RunFailure {
            error,
            partial: traj,
            last_state: None,
        });
    }
    let mut state = scenario.initial.clone();
    traj.push(0, &state, scenario.probe);
    if scenario.checkpoint_steps.contains(&0) {
        traj.checkpoints.push(Checkpoint {
            step: 0,
            state: state.clone(),
        });
    }
    for step in 1..=scenario.n_steps {
        match step_euler_with(
            &state,
            &scenario.model,
            &scenario.coupling,
            scenario.dt,
            scenario.coupling_sum,
        ) {
            Ok(next) => {
                state = next;
                // avoid drift from accumulating dt
                state.t = scenario.initial.t + step as f64 * scenario.dt;
            }
            Err(e) => {
                return Err(RunFailure {
                    error: Error::AtStep {
                        step,
                        source: Box::new(e),
                    },
                    partial: traj,
                    last_state: Some(state),
                })
            }
        }
        if step % scenario.record_every == 0 || step == scenario.n_steps {
            traj.push(step, &state, scenario.probe);
        }
        if scenario.checkpoint_steps.contains(&step) {
            traj.checkpoints.push(Checkpoint {
                step,
                state: state.clone(),
            });
        }
    }
    Ok((traj, state))
}
