//! Network state, reaction kinetics and the structural assumptions they
//! must satisfy.

pub mod assumptions;
pub mod builtin;
pub mod params;
pub mod reaction;
pub mod state;

pub use assumptions::{verify_assumptions, AssumptionReport, Inequality, InequalityOutcome};
pub use builtin::{
    fhn_model, hr_model, BuiltinModel, BuiltinParams, FhnParams, FitzHughNagumo, HindmarshRose,
    HrParams,
};
pub use params::{fhn_general_params, hr_derived_params, hr_general_params, GeneralParams};
pub use reaction::{gamma, gamma_checked, CouplingParams, Membrane, ReactionModel};
pub use state::{init_random, NetworkState, NeuronFields};
