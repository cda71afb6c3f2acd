//! Lattice-sampled check of the structural assumptions on `f`, `h` and `Λ`.
//!
//! Every inequality is evaluated at each point of a uniform lattice over
//! `s × σ₁ × … × σℓ`. Derivatives are central differences with relative
//! step `1e-6·max(1, |x|)`. An inequality `lhs ≤ rhs` passes at a point
//! when `(lhs − rhs) / (1 + |lhs| + |rhs|)` does not exceed the family's
//! tolerance, which absorbs rounding at points where the bound is tight.

use serde::Serialize;

use super::params::GeneralParams;
use super::reaction::ReactionModel;
use crate::Error;

/// Tolerance for inequalities evaluated directly.
pub const VALUE_TOL: f64 = 1e-9;
/// Tolerance for inequalities involving finite-difference derivatives.
pub const DERIVATIVE_TOL: f64 = 1e-6;

const FD_REL_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `f(s,σ)·s ≤ −α|s|⁴ + λ|s||σ| + J`
    FDissipation,
    /// `max{∂f/∂s, |∂f/∂σ|} ≤ β`
    FDerivative,
    /// `⟨Λσ,σ⟩ ≤ −γ|σ|²`
    LambdaDissipation,
    /// `h(s,σ)·σ ≤ q|s|²|σ| + L|σ|`
    HGrowth,
    /// `|∂h/∂s| ≤ ξ(|s| + 1)`
    HSDerivative,
    /// `∂h/∂σ = 0`
    HSigmaIndependence,
}

impl Inequality {
    pub const ALL: [Inequality; 6] = [
        Inequality::FDissipation,
        Inequality::FDerivative,
        Inequality::LambdaDissipation,
        Inequality::HGrowth,
        Inequality::HSDerivative,
        Inequality::HSigmaIndependence,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Inequality::FDissipation => "f(s,σ)·s ≤ −α|s|⁴ + λ|s||σ| + J",
            Inequality::FDerivative => "max{∂f/∂s, |∂f/∂σ|} ≤ β",
            Inequality::LambdaDissipation => "⟨Λσ,σ⟩ ≤ −γ|σ|²",
            Inequality::HGrowth => "h(s,σ)·σ ≤ q|s|²|σ| + L|σ|",
            Inequality::HSDerivative => "|∂h/∂s| ≤ ξ(|s|+1)",
            Inequality::HSigmaIndependence => "∂h/∂σ = 0",
        }
    }

    fn tolerance(&self) -> f64 {
        match self {
            Inequality::FDissipation | Inequality::LambdaDissipation | Inequality::HGrowth => {
                VALUE_TOL
            }
            _ => DERIVATIVE_TOL,
        }
    }

    fn index(&self) -> usize {
        Self::ALL.iter().position(|x| x == self).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePoint {
    pub s: f64,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityOutcome {
    pub inequality: Inequality,
    pub passed: bool,
    /// Point with the largest normalized excess `lhs − rhs`.
    pub worst_point: SamplePoint,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` at the worst point; negative means violated.
    pub margin: f64,
    pub normalized_excess: f64,
    /// Lattice points at which the inequality failed.
    pub violations: usize,
    /// First point where the model produced a non-finite value.
    pub non_finite_at: Option<SamplePoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub samples_per_axis: usize,
    pub points: usize,
    pub outcomes: Vec<InequalityOutcome>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, which: Inequality) -> &InequalityOutcome {
        &self.outcomes[which.index()]
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

struct Tracker {
    which: Inequality,
    worst: Option<(f64, SamplePoint, f64, f64)>,
    violations: usize,
    non_finite_at: Option<SamplePoint>,
}

impl Tracker {
    fn new(which: Inequality) -> Self {
        Self {
            which,
            worst: None,
            violations: 0,
            non_finite_at: None,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, s: f64, sigma: &[f64]) {
        if !(lhs.is_finite() && rhs.is_finite()) {
            if self.non_finite_at.is_none() {
                self.non_finite_at = Some(SamplePoint {
                    s,
                    sigma: sigma.to_vec(),
                });
            }
            return;
        }
        let excess = (lhs - rhs) / (1.0 + lhs.abs() + rhs.abs());
        if excess > self.which.tolerance() {
            self.violations += 1;
        }
        if self.worst.as_ref().is_none_or(|w| excess > w.0) {
            self.worst = Some((
                excess,
                SamplePoint {
                    s,
                    sigma: sigma.to_vec(),
                },
                lhs,
                rhs,
            ));
        }
    }

    fn finish(self) -> InequalityOutcome {
        let (excess, point, lhs, rhs) = self.worst.unwrap_or((
            f64::NAN,
            SamplePoint {
                s: f64::NAN,
                sigma: vec![],
            },
            f64::NAN,
            f64::NAN,
        ));
        InequalityOutcome {
            inequality: self.which,
            passed: self.violations == 0 && self.non_finite_at.is_none() && excess.is_finite(),
            worst_point: point,
            lhs,
            rhs,
            margin: rhs - lhs,
            normalized_excess: excess,
            violations: self.violations,
            non_finite_at: self.non_finite_at,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

#[inline]
fn fd_step(x: f64) -> f64 {
    FD_REL_STEP * x.abs().max(1.0)
}

#[inline]
fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Samples every inequality of the assumptions on an `n_samples`-per-axis
/// lattice over `s_range × sigma_range^ℓ`.
pub fn verify_assumptions(
    model: &dyn ReactionModel,
    gp: &GeneralParams,
    s_range: (f64, f64),
    sigma_range: (f64, f64),
    n_samples: usize,
) -> Result<AssumptionReport, Error> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: 0.0,
        });
    }
    for (name, v) in [
        ("s_range.lo", s_range.0),
        ("s_range.hi", s_range.1),
        ("sigma_range.lo", sigma_range.0),
        ("sigma_range.hi", sigma_range.1),
    ] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter { name, value: v });
        }
    }
    let ell = model.ell();
    let s_axis = linspace(s_range.0, s_range.1, n_samples);
    let sig_axis = linspace(sigma_range.0, sigma_range.1, n_samples);

    let mut t: Vec<Tracker> = Inequality::ALL.iter().map(|&w| Tracker::new(w)).collect();

    let mut sigma = vec![0.0; ell];
    let mut digits = vec![0usize; ell];
    let mut lam = vec![0.0; ell];
    let mut hv = vec![0.0; ell];
    let mut hp = vec![0.0; ell];
    let mut hm = vec![0.0; ell];
    let mut dh = vec![0.0; ell];
    let mut sp = vec![0.0; ell];
    let mut points = 0usize;

    loop {
        for (c, &d) in digits.iter().enumerate() {
            sigma[c] = sig_axis[d];
        }
        let sig_norm = norm(&sigma);

        model.lambda_apply(&sigma, &mut lam);
        t[2].record(dot(&lam, &sigma), -gp.gamma * sig_norm * sig_norm, f64::NAN, &sigma);

        for &s in &s_axis {
            points += 1;
            let fv = model.f(s, &sigma);
            let abs_s = s.abs();
            t[0].record(
                fv * s,
                -gp.alpha * abs_s.powi(4) + gp.lambda * abs_s * sig_norm + gp.j,
                s,
                &sigma,
            );

            let hs = fd_step(s);
            let df_ds = (model.f(s + hs, &sigma) - model.f(s - hs, &sigma)) / (2.0 * hs);
            let mut grad_sq = 0.0;
            let mut dh_dsigma_sq = 0.0;
            for c in 0..ell {
                let hc = fd_step(sigma[c]);
                sp.copy_from_slice(&sigma);
                sp[c] = sigma[c] + hc;
                let fp = model.f(s, &sp);
                model.h(s, &sp, &mut hp);
                sp[c] = sigma[c] - hc;
                let fm = model.f(s, &sp);
                model.h(s, &sp, &mut hm);
                let g = (fp - fm) / (2.0 * hc);
                grad_sq += g * g;
                for r in 0..ell {
                    let d = (hp[r] - hm[r]) / (2.0 * hc);
                    dh_dsigma_sq += d * d;
                }
            }
            t[1].record(df_ds.max(grad_sq.sqrt()), gp.beta, s, &sigma);

            model.h(s, &sigma, &mut hv);
            t[3].record(
                dot(&hv, &sigma),
                gp.q * s * s * sig_norm + gp.l * sig_norm,
                s,
                &sigma,
            );

            model.h(s + hs, &sigma, &mut hp);
            model.h(s - hs, &sigma, &mut hm);
            for r in 0..ell {
                dh[r] = (hp[r] - hm[r]) / (2.0 * hs);
            }
            t[4].record(norm(&dh), gp.xi * (abs_s + 1.0), s, &sigma);
            t[5].record(dh_dsigma_sq.sqrt(), 0.0, s, &sigma);
        }

        // odometer over the σ lattice
        let mut c = 0;
        loop {
            if c == ell {
                let outcomes = t.into_iter().map(Tracker::finish).collect();
                return Ok(AssumptionReport {
                    samples_per_axis: n_samples,
                    points,
                    outcomes,
                });
            }
            digits[c] += 1;
            if digits[c] < n_samples {
                break;
            }
            digits[c] = 0;
            c += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin::{FhnParams, FitzHughNagumo, HindmarshRose, HrParams};
    use crate::model::params::{fhn_general_params, hr_derived_params, hr_general_params};
    use crate::model::reaction::Membrane;

    #[test]
    fn lattice_has_expected_size() {
        let m = HindmarshRose::new(HrParams::default()).unwrap();
        let gp = hr_derived_params(m.params());
        let rep = verify_assumptions(&m, &gp, (-1.0, 1.0), (-1.0, 1.0), 7).unwrap();
        assert_eq!(rep.points, 7 * 7 * 7);
        assert_eq!(rep.outcomes.len(), 6);
    }

    #[test]
    fn derived_hr_constants_pass() {
        let m = HindmarshRose::new(HrParams::default()).unwrap();
        let gp = hr_derived_params(m.params());
        let rep = verify_assumptions(&m, &gp, (-5.0, 5.0), (-5.0, 5.0), 50).unwrap();
        assert!(rep.all_passed(), "{:#?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn printed_hr_constants_fail_alpha_and_gamma() {
        let m = HindmarshRose::new(HrParams::default()).unwrap();
        let gp = hr_general_params(m.params());
        let rep = verify_assumptions(&m, &gp, (-5.0, 5.0), (-5.0, 5.0), 50).unwrap();
        let failed: Vec<_> = rep.failures().map(|o| o.inequality).collect();
        assert_eq!(
            failed,
            vec![Inequality::FDissipation, Inequality::LambdaDissipation]
        );
    }

    #[test]
    fn fhn_constants_pass() {
        let m = FitzHughNagumo::new(FhnParams::default()).unwrap();
        let gp = fhn_general_params(m.params());
        let rep = verify_assumptions(&m, &gp, (-5.0, 5.0), (-5.0, 5.0), 50).unwrap();
        assert!(rep.all_passed(), "{:#?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn doubled_alpha_fails_with_location() {
        let m = HindmarshRose::new(HrParams::default()).unwrap();
        let mut gp = hr_derived_params(m.params());
        gp.alpha *= 2.0;
        let rep = verify_assumptions(&m, &gp, (-5.0, 5.0), (-5.0, 5.0), 50).unwrap();
        let o = rep.outcome(Inequality::FDissipation);
        assert!(!o.passed);
        assert!(o.margin < 0.0);
        assert!(o.worst_point.s.abs() > 0.0);
        assert_eq!(o.worst_point.sigma.len(), 2);
        // only the quartic bound is affected
        assert_eq!(rep.failures().count(), 1);
    }

    struct Exploding;
    impl ReactionModel for Exploding {
        fn ell(&self) -> usize {
            1
        }
        fn f(&self, s: f64, _: &[f64]) -> f64 {
            if s > 0.9 {
                f64::NAN
            } else {
                -s * s * s
            }
        }
        fn h(&self, _: f64, _: &[f64], out: &mut [f64]) {
            out[0] = 0.0;
        }
        fn lambda_apply(&self, sigma: &[f64], out: &mut [f64]) {
            out[0] = -sigma[0];
        }
        fn membrane(&self) -> Membrane {
            Membrane {
                eta: 1.0,
                k: 1.0,
                a: 1.0,
                b: 1.0,
            }
        }
    }

    #[test]
    fn non_finite_output_is_reported_with_location() {
        let gp = GeneralParams {
            alpha: 0.5,
            lambda: 1.0,
            j: 1.0,
            beta: 10.0,
            gamma: 1.0,
            q: 1.0,
            l: 1.0,
            xi: 1.0,
        };
        let rep = verify_assumptions(&Exploding, &gp, (-1.0, 1.0), (-1.0, 1.0), 5).unwrap();
        let o = rep.outcome(Inequality::FDissipation);
        assert!(!o.passed);
        assert_eq!(o.non_finite_at.as_ref().unwrap().s, 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = HindmarshRose::new(HrParams::default()).unwrap();
        let gp = hr_derived_params(m.params());
        assert!(verify_assumptions(&m, &gp, (-1.0, 1.0), (-1.0, 1.0), 0).is_err());
        assert!(verify_assumptions(&m, &gp, (f64::NAN, 1.0), (-1.0, 1.0), 3).is_err());
    }
}
