//! Memristive Hindmarsh-Rose and FitzHugh-Nagumo kinetics.

use serde::{Deserialize, Serialize};

use super::reaction::{Membrane, ReactionModel};
use crate::Error;

fn require_positive(pairs: &[(&'static str, f64)]) -> Result<(), Error> {
    for &(name, value) in pairs {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter { name, value });
        }
    }
    Ok(())
}

/// Hindmarsh-Rose parameters. Defaults are the 32×32 benchmark setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HrParams {
    pub a1: f64,
    pub b1: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub q1: f64,
    pub r1: f64,
    /// Memductance drive.
    pub c1: f64,
    /// Memductance decay.
    pub delta1: f64,
    /// Diffusion coefficient.
    pub eta1: f64,
    /// Memristor gain.
    pub k1: f64,
}

impl Default for HrParams {
    fn default() -> Self {
        Self {
            a1: 1.0,
            b1: 2.0,
            alpha1: 0.4,
            beta1: 0.06,
            q1: 0.2,
            r1: 4.0,
            c1: 1.0,
            delta1: 7.0,
            eta1: 5.0,
            k1: 0.3,
        }
    }
}

impl HrParams {
    pub fn validate(&self) -> Result<(), Error> {
        require_positive(&[
            ("a1", self.a1),
            ("b1", self.b1),
            ("alpha1", self.alpha1),
            ("beta1", self.beta1),
            ("q1", self.q1),
            ("r1", self.r1),
            ("c1", self.c1),
            ("delta1", self.delta1),
            ("eta1", self.eta1),
            ("k1", self.k1),
        ])
    }
}

/// `z = (v, w)`:
///
/// ```text
/// f(s, σ) = a1·s² − b1·s³ + σv − σw
/// h(s, σ) = (α1 − β1·s², q1·s)
/// Λσ      = (−σv, −r1·σw)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HindmarshRose {
    p: HrParams,
}

impl HindmarshRose {
    pub fn new(p: HrParams) -> Result<Self, Error> {
        p.validate()?;
        Ok(Self { p })
    }

    pub fn params(&self) -> &HrParams {
        &self.p
    }
}

#[allow(clippy::too_many_arguments)]
pub fn hr_model(
    a1: f64,
    b1: f64,
    alpha1: f64,
    beta1: f64,
    q1: f64,
    r1: f64,
    c1: f64,
    delta1: f64,
    eta1: f64,
    k1: f64,
) -> Result<HindmarshRose, Error> {
    HindmarshRose::new(HrParams {
        a1,
        b1,
        alpha1,
        beta1,
        q1,
        r1,
        c1,
        delta1,
        eta1,
        k1,
    })
}

impl ReactionModel for HindmarshRose {
    fn ell(&self) -> usize {
        2
    }

    #[inline]
    fn f(&self, s: f64, sigma: &[f64]) -> f64 {
        let s2 = s * s;
        self.p.a1 * s2 - self.p.b1 * s2 * s + sigma[0] - sigma[1]
    }

    #[inline]
    fn h(&self, s: f64, _sigma: &[f64], out: &mut [f64]) {
        out[0] = self.p.alpha1 - self.p.beta1 * s * s;
        out[1] = self.p.q1 * s;
    }

    #[inline]
    fn lambda_apply(&self, sigma: &[f64], out: &mut [f64]) {
        out[0] = -sigma[0];
        out[1] = -self.p.r1 * sigma[1];
    }

    fn membrane(&self) -> Membrane {
        Membrane {
            eta: self.p.eta1,
            k: self.p.k1,
            a: self.p.c1,
            b: self.p.delta1,
        }
    }

    fn name(&self) -> &str {
        "hindmarsh_rose"
    }
}

/// FitzHugh-Nagumo parameters. Defaults are the 32×32 benchmark setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FhnParams {
    pub alpha2: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    /// Memductance drive.
    pub q2: f64,
    /// Memductance decay.
    pub r2: f64,
    pub eta2: f64,
    pub k2: f64,
}

impl Default for FhnParams {
    fn default() -> Self {
        Self {
            alpha2: 0.5,
            beta2: 0.1,
            gamma2: 0.05,
            a2: 0.3,
            b2: 3.0,
            c2: 1.0,
            q2: 0.2,
            r2: 10.0,
            eta2: 10.0,
            k2: 0.1,
        }
    }
}

impl FhnParams {
    pub fn validate(&self) -> Result<(), Error> {
        require_positive(&[
            ("alpha2", self.alpha2),
            ("beta2", self.beta2),
            ("gamma2", self.gamma2),
            ("a2", self.a2),
            ("b2", self.b2),
            ("c2", self.c2),
            ("q2", self.q2),
            ("r2", self.r2),
            ("eta2", self.eta2),
            ("k2", self.k2),
        ])
    }
}

/// Single recovery variable `w`:
///
/// ```text
/// f(s, σ) = α2·s·(s − β2)·(1 − s) − γ2·σ
/// h(s, σ) = a2·s + c2
/// Λσ      = −b2·σ
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitzHughNagumo {
    p: FhnParams,
}

impl FitzHughNagumo {
    pub fn new(p: FhnParams) -> Result<Self, Error> {
        p.validate()?;
        Ok(Self { p })
    }

    pub fn params(&self) -> &FhnParams {
        &self.p
    }
}

#[allow(clippy::too_many_arguments)]
pub fn fhn_model(
    alpha2: f64,
    beta2: f64,
    gamma2: f64,
    a2: f64,
    b2: f64,
    c2: f64,
    q2: f64,
    r2: f64,
    eta2: f64,
    k2: f64,
) -> Result<FitzHughNagumo, Error> {
    FitzHughNagumo::new(FhnParams {
        alpha2,
        beta2,
        gamma2,
        a2,
        b2,
        c2,
        q2,
        r2,
        eta2,
        k2,
    })
}

impl ReactionModel for FitzHughNagumo {
    fn ell(&self) -> usize {
        1
    }

    #[inline]
    fn f(&self, s: f64, sigma: &[f64]) -> f64 {
        self.p.alpha2 * s * (s - self.p.beta2) * (1.0 - s) - self.p.gamma2 * sigma[0]
    }

    #[inline]
    fn h(&self, s: f64, _sigma: &[f64], out: &mut [f64]) {
        out[0] = self.p.a2 * s + self.p.c2;
    }

    #[inline]
    fn lambda_apply(&self, sigma: &[f64], out: &mut [f64]) {
        out[0] = -self.p.b2 * sigma[0];
    }

    fn membrane(&self) -> Membrane {
        Membrane {
            eta: self.p.eta2,
            k: self.p.k2,
            a: self.p.q2,
            b: self.p.r2,
        }
    }

    fn name(&self) -> &str {
        "fitzhugh_nagumo"
    }
}

/// Either built-in model, selected by tag in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuiltinParams {
    HindmarshRose(HrParams),
    FitzhughNagumo(FhnParams),
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams::HindmarshRose(HrParams::default())
    }
}

impl BuiltinParams {
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "hindmarsh_rose" | "hr" => Some(Self::HindmarshRose(HrParams::default())),
            "fitzhugh_nagumo" | "fhn" => Some(Self::FitzhughNagumo(FhnParams::default())),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::HindmarshRose(_) => "hindmarsh_rose",
            Self::FitzhughNagumo(_) => "fitzhugh_nagumo",
        }
    }

    pub fn build(&self) -> Result<BuiltinModel, Error> {
        Ok(match self {
            Self::HindmarshRose(p) => BuiltinModel::HindmarshRose(HindmarshRose::new(*p)?),
            Self::FitzhughNagumo(p) => BuiltinModel::FitzHughNagumo(FitzHughNagumo::new(*p)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinModel {
    HindmarshRose(HindmarshRose),
    FitzHughNagumo(FitzHughNagumo),
}

impl ReactionModel for BuiltinModel {
    fn ell(&self) -> usize {
        match self {
            Self::HindmarshRose(m) => m.ell(),
            Self::FitzHughNagumo(m) => m.ell(),
        }
    }

    #[inline]
    fn f(&self, s: f64, sigma: &[f64]) -> f64 {
        match self {
            Self::HindmarshRose(m) => m.f(s, sigma),
            Self::FitzHughNagumo(m) => m.f(s, sigma),
        }
    }

    #[inline]
    fn h(&self, s: f64, sigma: &[f64], out: &mut [f64]) {
        match self {
            Self::HindmarshRose(m) => m.h(s, sigma, out),
            Self::FitzHughNagumo(m) => m.h(s, sigma, out),
        }
    }

    #[inline]
    fn lambda_apply(&self, sigma: &[f64], out: &mut [f64]) {
        match self {
            Self::HindmarshRose(m) => m.lambda_apply(sigma, out),
            Self::FitzHughNagumo(m) => m.lambda_apply(sigma, out),
        }
    }

    fn membrane(&self) -> Membrane {
        match self {
            Self::HindmarshRose(m) => m.membrane(),
            Self::FitzHughNagumo(m) => m.membrane(),
        }
    }

    fn name(&self) -> &str {
        match self {
            Self::HindmarshRose(m) => m.name(),
            Self::FitzHughNagumo(m) => m.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hr() -> HindmarshRose {
        HindmarshRose::new(HrParams::default()).unwrap()
    }

    fn fhn() -> FitzHughNagumo {
        FitzHughNagumo::new(FhnParams::default()).unwrap()
    }

    #[test]
    fn hr_reaction_values() {
        let m = hr();
        assert_eq!(m.f(0.0, &[0.0, 0.0]), 0.0);
        assert_eq!(m.f(1.0, &[0.0, 0.0]), -1.0);
        let mut out = [0.0; 2];
        m.h(2.0, &[9.0, -9.0], &mut out);
        assert!((out[0] - 0.16).abs() < 1e-15);
        assert!((out[1] - 0.4).abs() < 1e-15);
        m.lambda_apply(&[1.0, 1.0], &mut out);
        assert_eq!(out, [-1.0, -4.0]);
        let mb = m.membrane();
        assert_eq!((mb.eta, mb.k, mb.a, mb.b), (5.0, 0.3, 1.0, 7.0));
    }

    #[test]
    fn fhn_reaction_values() {
        let m = fhn();
        assert_eq!(m.f(0.0, &[0.0]), 0.0);
        assert_eq!(m.f(1.0, &[0.0]), 0.0);
        assert_eq!(m.f(0.1, &[0.0]), 0.0);
        let mut out = [0.0];
        m.h(1.0, &[5.0], &mut out);
        assert!((out[0] - 1.3).abs() < 1e-15);
        let b3 = fhn_model(0.5, 0.1, 0.05, 0.3, 3.0, 1.0, 0.2, 10.0, 10.0, 0.1).unwrap();
        b3.lambda_apply(&[2.0], &mut out);
        assert_eq!(out[0], -6.0);
        let mb = m.membrane();
        assert_eq!((mb.eta, mb.k, mb.a, mb.b), (10.0, 0.1, 0.2, 10.0));
    }

    #[test]
    fn nonpositive_parameters_rejected() {
        assert!(hr_model(1.0, 0.0, 0.4, 0.06, 0.2, 4.0, 1.0, 7.0, 5.0, 0.3).is_err());
        assert!(fhn_model(0.5, 0.1, 0.05, 0.3, -3.0, 1.0, 0.2, 10.0, 10.0, 0.1).is_err());
        let err = hr_model(1.0, 2.0, 0.4, 0.06, 0.2, 4.0, 1.0, 7.0, f64::NAN, 0.3).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "eta1", .. }));
    }

    #[test]
    fn builtin_tags_round_trip() {
        for tag in ["hindmarsh_rose", "fitzhugh_nagumo"] {
            let p = BuiltinParams::from_tag(tag).unwrap();
            assert_eq!(p.tag(), tag);
            assert_eq!(p.build().unwrap().name(), tag);
        }
        assert!(BuiltinParams::from_tag("morris_lecar").is_none());
    }

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }

    proptest! {
        #[test]
        fn lambda_is_linear(c in -10.0..10.0f64, x in prop::array::uniform2(-10.0..10.0f64), y in prop::array::uniform2(-10.0..10.0f64)) {
            for model in [BuiltinModel::HindmarshRose(hr()), BuiltinModel::FitzHughNagumo(fhn())] {
                let l = model.ell();
                let comb: Vec<f64> = (0..l).map(|q| c * x[q] + y[q]).collect();
                let mut lhs = vec![0.0; l];
                let mut lx = vec![0.0; l];
                let mut ly = vec![0.0; l];
                model.lambda_apply(&comb, &mut lhs);
                model.lambda_apply(&x[..l], &mut lx);
                model.lambda_apply(&y[..l], &mut ly);
                for q in 0..l {
                    prop_assert!(rel_close(lhs[q], c * lx[q] + ly[q]));
                }
            }
        }
    }
}
