use thiserror::Error;

/// Field slot that produced a non-finite value during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Diffusion,
    Reaction,
    Memristor,
    Coupling,
    Ionic,
    Memductance,
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Term::Diffusion => "diffusion",
            Term::Reaction => "reaction f(u,z)",
            Term::Memristor => "memristor k*tanh(rho)*u",
            Term::Coupling => "sigmoidal coupling",
            Term::Ionic => "ionic Lambda*z + h(u,z)",
            Term::Memductance => "memductance a*u - b*rho",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must be at least 3x3, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("field length mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("non-finite input value at index {index}")]
    NonFiniteInput { index: usize },

    #[error("inconsistent network state: {0}")]
    InconsistentState(String),

    #[error("non-finite {term} term for neuron {neuron} at cell ({i}, {j})")]
    NonFinite {
        neuron: usize,
        i: usize,
        j: usize,
        term: Term,
    },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("explicit diffusion step unstable: 4*eta*dt/dx^2 = {ratio} > 1")]
    Unstable { ratio: f64 },

    #[error("need at least 3 positive samples, found {found}")]
    InsufficientData { found: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    /// Step index carried by a stepping failure, if any.
    pub fn step(&self) -> Option<usize> {
        match self {
            Error::AtStep { step, .. } => Some(*step),
            _ => None,
        }
    }
}
