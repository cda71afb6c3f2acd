use approx::assert_relative_eq;

use memsync::config::ScenarioConfig;
use memsync::diagnostics::{fit_exponential_rate_after, l2_norm};
use memsync::model::{init_random, CouplingParams, HindmarshRose, HrParams, NetworkState};
use memsync::solver::{run, step_euler, Scenario};
use memsync::thresholds::{compute_p_threshold, rate_margin};
use memsync::GridShape;

fn hr() -> HindmarshRose {
    HindmarshRose::new(HrParams::default()).unwrap()
}

fn final_u_gaps(p: f64) -> Vec<f64> {
    let shape = GridShape::new(12, 12, 1.0).unwrap();
    let init = init_random(shape, 3, 2, 0.1, 9).unwrap();
    let coupling = CouplingParams {
        p,
        ..Default::default()
    };
    let mut sc = Scenario::new(hr(), coupling, init, 0.00025, 1500);
    sc.record_every = 1500;
    let (traj, _) = run(&sc).unwrap();
    traj.records.last().unwrap().diffs.iter().map(|d| d.u).collect()
}

#[test]
fn stronger_coupling_pulls_potentials_together() {
    let weak = final_u_gaps(0.0);
    let strong = final_u_gaps(50.0);
    for (w, s) in weak.iter().zip(&strong) {
        assert!(s < w, "P=50 gap {s} not below P=0 gap {w}");
    }
}

// Halving dt halves the gap to a fine-dt reference at fixed final time.
#[test]
fn euler_is_first_order_in_time() {
    let shape = GridShape::new(6, 6, 1.0).unwrap();
    let init = init_random(shape, 2, 2, 0.5, 3).unwrap();
    let model = hr();
    let coupling = CouplingParams::default();
    let t_end = 0.02;
    let integrate = |dt: f64| -> NetworkState {
        let n = (t_end / dt).round() as usize;
        let mut s = init.clone();
        for _ in 0..n {
            s = step_euler(&s, &model, &coupling, dt).unwrap();
        }
        s
    };
    let reference = integrate(0.0000625);
    let err = |dt: f64| l2_norm(&integrate(dt).neurons[0].u.sub(&reference.neurons[0].u));
    let e1 = err(0.002);
    let e2 = err(0.001);
    let e3 = err(0.0005);
    let o1 = (e1 / e2).log2();
    let o2 = (e2 / e3).log2();
    assert!((o1 - 1.0).abs() < 0.15 && (o2 - 1.0).abs() < 0.15, "orders {o1} {o2}");
}

#[test]
fn default_config_is_the_benchmark_run() {
    let cfg = ScenarioConfig::default();
    let sc = cfg.build_scenario(None).unwrap();
    assert_eq!(sc.n_steps, 2000);
    assert_relative_eq!(sc.dt, 0.00025);
    assert_eq!(sc.initial.m(), 4);
    assert_eq!(sc.initial.shape().len(), 32 * 32);
    assert_relative_eq!(sc.coupling.p, 19.60);
    let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn threshold_is_where_the_margin_vanishes() {
    let (kappa, g, r, v, m) = (16.69, 2.12, 0.1, 0.5, 4);
    let p_star = compute_p_threshold(kappa, g, r, v, m);
    assert_relative_eq!(rate_margin(p_star, kappa, g, r, v, m), 0.0, epsilon = 1e-12);
    assert!(rate_margin(p_star * 1.01, kappa, g, r, v, m) > 0.0);
    assert!(rate_margin(p_star * 0.99, kappa, g, r, v, m) < 0.0);
}

#[test]
fn burn_in_skips_the_transient() {
    let t: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
    // fast transient on top of a rate-0.5 tail
    let y: Vec<f64> = t.iter().map(|&t| 5.0 * (-0.5 * t).exp() + 40.0 * (-20.0 * t).exp()).collect();
    let fit = fit_exponential_rate_after(&t, &y, 0.2).unwrap();
    assert_relative_eq!(fit.rate, 0.5, max_relative = 1e-6);
}
