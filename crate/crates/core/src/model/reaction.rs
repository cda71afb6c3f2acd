//! The pluggable reaction abstraction and the sigmoidal synaptic coupling.

use serde::{Deserialize, Serialize};

use crate::Error;

/// Diffusion and memristor coefficients `(η, k, a, b)` of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membrane {
    /// Diffusion coefficient of the potential.
    pub eta: f64,
    /// Memristor coupling gain in `-k·tanh(ρ)·u`.
    pub k: f64,
    /// Memductance drive in `∂ρ/∂t = a·u − b·ρ`.
    pub a: f64,
    /// Memductance decay.
    pub b: f64,
}

/// Local kinetics of one neuron: the potential nonlinearity `f`, the ionic
/// vector field `h` and the linear ionic operator `Λ`.
///
/// Implementations must be deterministic and total on finite inputs, and
/// `lambda_apply` must be linear.
pub trait ReactionModel: Send + Sync {
    /// Number of ionic components `ℓ`.
    fn ell(&self) -> usize;

    fn f(&self, s: f64, sigma: &[f64]) -> f64;

    /// Writes `h(s, σ)` into `out` (length `ℓ`).
    fn h(&self, s: f64, sigma: &[f64], out: &mut [f64]);

    /// Writes `Λσ` into `out` (length `ℓ`).
    fn lambda_apply(&self, sigma: &[f64], out: &mut [f64]);

    fn membrane(&self) -> Membrane;

    fn name(&self) -> &str {
        "custom"
    }
}

/// Sigmoid synaptic gate `1 / (1 + exp(−r(s − V)))`.
#[inline]
pub fn gamma(s: f64, r: f64, v: f64) -> f64 {
    1.0 / (1.0 + (-r * (s - v)).exp())
}

/// Checked form of [`gamma`].
pub fn gamma_checked(s: f64, r: f64, v: f64) -> Result<f64, Error> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter { name: "s", value: s });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    if !v.is_finite() {
        return Err(Error::InvalidParameter { name: "V", value: v });
    }
    Ok(gamma(s, r, v))
}

/// Synaptic coupling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    /// Coupling strength.
    #[serde(rename = "P")]
    pub p: f64,
    /// Sigmoid sharpness.
    #[serde(default = "default_r")]
    pub r: f64,
    /// Bursting threshold.
    #[serde(rename = "V", default = "default_v")]
    pub v: f64,
    /// Reversal potential; when present the coupling acts on `u − u_e`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_e: Option<f64>,
}

fn default_r() -> f64 {
    0.1
}

fn default_v() -> f64 {
    0.5
}

impl Default for CouplingParams {
    fn default() -> Self {
        Self {
            p: 19.60,
            r: default_r(),
            v: default_v(),
            u_e: None,
        }
    }
}

impl CouplingParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.p.is_finite() && self.p >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "P",
                value: self.p,
            });
        }
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.r,
            });
        }
        if !self.v.is_finite() {
            return Err(Error::InvalidParameter {
                name: "V",
                value: self.v,
            });
        }
        if let Some(ue) = self.u_e {
            if !ue.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "u_e",
                    value: ue,
                });
            }
        }
        Ok(())
    }

    /// Shift applied to the potential in the coupling term.
    #[inline]
    pub fn reversal(&self) -> f64 {
        self.u_e.unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_midpoint_is_half() {
        assert_eq!(gamma(0.5, 0.1, 0.5), 0.5);
        assert_eq!(gamma(-3.0, 7.0, -3.0), 0.5);
    }

    #[test]
    fn gamma_known_value() {
        let expected = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((gamma(10.5, 0.1, 0.5) - expected).abs() < 1e-15);
        assert!((gamma(10.5, 0.1, 0.5) - 0.731_058_578_630_004_9).abs() < 1e-12);
    }

    #[test]
    fn gamma_far_left_tail_is_tiny_but_positive() {
        let g = gamma(-100.0, 1.0, 0.0);
        assert!(g > 0.0 && g < 1e-43);
    }

    #[test]
    fn gamma_checked_rejects_non_finite() {
        assert!(gamma_checked(f64::NAN, 1.0, 0.0).is_err());
        assert!(gamma_checked(f64::INFINITY, 1.0, 0.0).is_err());
        assert!(gamma_checked(0.0, 0.0, 0.0).is_err());
        assert!(gamma_checked(0.0, 1.0, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn gamma_in_open_unit_interval(s in -30.0..30.0f64, r in 0.01..1.0f64, v in -5.0..5.0f64) {
            let g = gamma(s, r, v);
            prop_assert!(g > 0.0 && g < 1.0);
        }

        #[test]
        fn gamma_strictly_increasing(s in -20.0..20.0f64, ds in 0.01..5.0f64, r in 0.05..1.0f64, v in -2.0..2.0f64) {
            prop_assert!(gamma(s, r, v) < gamma(s + ds, r, v));
        }
    }
}
