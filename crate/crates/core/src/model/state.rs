use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{FieldGrid, GridShape};
use crate::Error;

/// Fields of one neuron: potential `u`, ionic components `z`, memductance `ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronFields {
    pub u: FieldGrid,
    pub z: Vec<FieldGrid>,
    pub rho: FieldGrid,
}

impl NeuronFields {
    pub fn zeros(shape: GridShape, ell: usize) -> Self {
        Self {
            u: FieldGrid::zeros(shape),
            z: (0..ell).map(|_| FieldGrid::zeros(shape)).collect(),
            rho: FieldGrid::zeros(shape),
        }
    }

    /// Spatially constant fields.
    pub fn uniform(shape: GridShape, u: f64, z: &[f64], rho: f64) -> Self {
        Self {
            u: FieldGrid::constant(shape, u),
            z: z.iter().map(|&c| FieldGrid::constant(shape, c)).collect(),
            rho: FieldGrid::constant(shape, rho),
        }
    }

    pub fn shape(&self) -> GridShape {
        self.u.shape()
    }

    pub fn ell(&self) -> usize {
        self.z.len()
    }

    /// All component fields in `u, z₁…zℓ, ρ` order.
    pub fn components(&self) -> impl Iterator<Item = &FieldGrid> {
        std::iter::once(&self.u)
            .chain(self.z.iter())
            .chain(std::iter::once(&self.rho))
    }

    fn components_mut(&mut self) -> impl Iterator<Item = &mut FieldGrid> {
        std::iter::once(&mut self.u)
            .chain(self.z.iter_mut())
            .chain(std::iter::once(&mut self.rho))
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &NeuronFields) {
        for (a, b) in self.components_mut().zip(other.components()) {
            a.axpy(c, b);
        }
    }
}

/// The `m`-neuron ensemble and its clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    pub neurons: Vec<NeuronFields>,
    pub t: f64,
}

impl NetworkState {
    pub fn new(neurons: Vec<NeuronFields>, t: f64) -> Result<Self, Error> {
        let s = Self { neurons, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.neurons.len() < 2 {
            return Err(Error::InconsistentState(format!(
                "need at least 2 neurons, found {}",
                self.neurons.len()
            )));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InconsistentState(format!("invalid time {}", self.t)));
        }
        let shape = self.shape();
        let ell = self.ell();
        if ell == 0 {
            return Err(Error::InconsistentState("ℓ must be at least 1".into()));
        }
        for (i, n) in self.neurons.iter().enumerate() {
            if n.ell() != ell {
                return Err(Error::InconsistentState(format!(
                    "neuron {i} has {} ionic components, expected {ell}",
                    n.ell()
                )));
            }
            if n.components().any(|f| f.shape() != shape) {
                return Err(Error::InconsistentState(format!(
                    "neuron {i} has a mismatched grid"
                )));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.neurons.len()
    }

    pub fn shape(&self) -> GridShape {
        self.neurons[0].shape()
    }

    pub fn ell(&self) -> usize {
        self.neurons[0].ell()
    }
}

/// Seeded initial data, every entry uniform on `[0, amplitude]`.
///
/// Values are drawn in neuron order, then `u, z₁…zℓ, ρ`, then row-major
/// cell order, so the result depends only on `(seed, shape, m, ell)`.
pub fn init_random(
    shape: GridShape,
    m: usize,
    ell: usize,
    amplitude: f64,
    seed: u64,
) -> Result<NetworkState, Error> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            value: amplitude,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let neurons = (0..m)
        .map(|_| {
            let mut n = NeuronFields::zeros(shape, ell);
            for field in n.components_mut() {
                for v in field.values_mut() {
                    *v = amplitude * rng.random::<f64>();
                }
            }
            n
        })
        .collect();
    NetworkState::new(neurons, 0.0)
}
