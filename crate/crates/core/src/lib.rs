//! Simulation and synchronization analysis of memristive reaction-diffusion
//! neural networks with sigmoidal interneuron coupling.
//!
//! Each neuron carries a diffusing membrane potential `u`, ODE ionic
//! currents `z` and a memductance `ρ`:
//!
//! ```text
//! ∂u/∂t = η Δu + f(u, z) − k tanh(ρ) u − P (u − u_e) Σⱼ Γ(uⱼ)
//! ∂z/∂t = Λ z + h(u, z)
//! ∂ρ/∂t = a u − b ρ
//! ```
//!
//! with zero-flux boundaries. [`thresholds`] evaluates the coupling
//! strength above which all neurons synchronize exponentially, [`solver`]
//! integrates the network on a 2-D grid, and [`diagnostics`] measures how
//! fast the neurons actually converge.

pub mod config;
pub mod diagnostics;
mod error;
pub mod grid;
pub mod model;
pub mod solver;
pub mod thresholds;

pub use error::{Error, Term};
pub use grid::{FieldGrid, GridShape};
