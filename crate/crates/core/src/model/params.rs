//! Structural constants of the dissipativity assumptions and the maps that
//! produce them for the built-in models.

use serde::{Deserialize, Serialize};

use super::builtin::{FhnParams, HrParams};
use crate::Error;

/// Constants bounding the kinetics:
///
/// ```text
/// f(s,σ)·s                 ≤ −α|s|⁴ + λ|s||σ| + J
/// max{∂f/∂s, |∂f/∂σ|}      ≤ β
/// ⟨Λσ, σ⟩                  ≤ −γ|σ|²
/// h(s,σ)·σ                 ≤ q|s|²|σ| + L|σ|
/// |∂h/∂s|                  ≤ ξ(|s| + 1),   ∂h/∂σ = 0
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralParams {
    pub alpha: f64,
    pub lambda: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub beta: f64,
    pub gamma: f64,
    pub q: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub xi: f64,
}

impl GeneralParams {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, value) in self.named() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("alpha", self.alpha),
            ("lambda", self.lambda),
            ("J", self.j),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("q", self.q),
            ("L", self.l),
            ("xi", self.xi),
        ]
    }

    /// Overrides a single constant by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), Error> {
        let slot = match name {
            "alpha" => &mut self.alpha,
            "lambda" => &mut self.lambda,
            "J" | "j" => &mut self.j,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "q" => &mut self.q,
            "L" | "l" => &mut self.l,
            "xi" => &mut self.xi,
            _ => {
                return Err(Error::Config {
                    path: name.to_string(),
                    message: "unknown general parameter".into(),
                })
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Hindmarsh-Rose constants as recorded in the published parameter table.
///
/// These reproduce the published threshold constants (`C1 = 0.25`,
/// `μ = 4`), but `α = b1⁴/4` and `γ = max{1, r1}` are stronger than the
/// kinetics admit; see [`hr_derived_params`].
pub fn hr_general_params(p: &HrParams) -> GeneralParams {
    GeneralParams {
        alpha: p.b1.powi(4) / 4.0,
        lambda: std::f64::consts::SQRT_2,
        j: p.a1.powi(4) / (4.0 * p.b1.powi(3)),
        beta: (p.a1 * p.a1 / (2.0 * p.b1)).max(std::f64::consts::SQRT_2),
        gamma: 1.0f64.max(p.r1),
        q: p.beta1 + p.q1,
        l: p.alpha1 + p.q1,
        xi: (2.0 * p.beta1).max(p.q1),
    }
}

/// Hindmarsh-Rose constants from the term-by-term Young's-inequality
/// bounds: `α = b1/4` and `γ = min{1, r1}`, all others as in
/// [`hr_general_params`]. These satisfy the assumptions on every lattice.
pub fn hr_derived_params(p: &HrParams) -> GeneralParams {
    GeneralParams {
        alpha: p.b1 / 4.0,
        gamma: 1.0f64.min(p.r1),
        ..hr_general_params(p)
    }
}

/// FitzHugh-Nagumo constants.
pub fn fhn_general_params(p: &FhnParams) -> GeneralParams {
    let one_b = 1.0 + p.beta2;
    GeneralParams {
        alpha: p.alpha2 / 4.0,
        lambda: p.gamma2,
        j: p.alpha2 * one_b.powi(4) / 4.0,
        beta: (one_b * one_b).max(p.gamma2),
        gamma: p.b2,
        q: p.a2 / 4.0,
        l: p.a2 + p.c2,
        xi: p.a2,
    }
}
