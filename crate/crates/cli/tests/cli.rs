use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn memsync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memsync"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn repo_config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn data_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# memsync "));
    lines.next().expect("header");
    lines.map(str::to_string).collect()
}

#[test]
fn hr_default_writes_2001_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = memsync(&["simulate", "--config", &repo_config("hr.toml"), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(data_rows(&out.join("norms.csv")).len(), 2001);
    assert_eq!(data_rows(&out.join("diffs.csv")).len(), 2001);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "ok");
    assert_eq!(report["recorded"], 2001);
    assert!(report["asynchronous_degree"]["estimate"].as_f64().unwrap() > 0.0);
    assert!(report["bounds"]["energy_vs_k"]["passed"].as_bool().unwrap());
    let rows = report["thresholds"]["comparison"].as_array().unwrap();
    let q = rows.iter().find(|r| r["name"] == "Q").unwrap();
    assert_eq!(q["matches_published"], false);
}

#[test]
fn stability_violation_exits_2_unless_overridden() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "unstable.toml", "[time]\ndt = 0.1\nn_steps = 3\n");
    let out = tmp.path().join("o");
    let o = memsync(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("stability"), "{}", stderr(&o));
    assert!(!out.exists());

    let o = memsync(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--allow-unstable",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn blow_up_exits_3_with_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "boom.toml",
        "[time]\ndt = 0.5\nn_steps = 200\nallow_unstable = true\n[init]\namplitude = 1.0\n",
    );
    let out = tmp.path().join("o");
    let o = memsync(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("at step"), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let step = report["failure"]["step"].as_u64().unwrap();
    assert!(step >= 1);
    assert_eq!(data_rows(&out.join("norms.csv")).len() as u64, step);
}

#[test]
fn identical_initial_data_gives_zero_diffs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "same.toml", "[time]\nn_steps = 50\n[init]\namplitude = 0.0\n");
    let out = tmp.path().join("o");
    let o = memsync(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for row in data_rows(&out.join("diffs.csv")) {
        assert!(row.split(',').skip(1).all(|v| v == "0"), "{row}");
    }
}

#[test]
fn config_errors_exit_2_with_key_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "[network.coupling]\nP = 1.0\nbogus = 2\n");
    let o = memsync(&["thresholds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("network.coupling"), "{}", stderr(&o));

    let cfg = write_config(tmp.path(), "neg.toml", "[time]\ndt = -1.0\n");
    let o = memsync(&["thresholds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("time.dt"), "{}", stderr(&o));
}

#[test]
fn io_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let o = memsync(&["thresholds", "--config", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 4);

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(tmp.path(), "short.toml", "[time]\nn_steps = 2\n");
    let o = memsync(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn probe_and_checkpoint_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cp.toml", "[time]\nn_steps = 20\ncheckpoint_steps = [10]\n");
    let first = tmp.path().join("first");
    let o = memsync(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        first.to_str().unwrap(),
        "--probe",
        "10,10",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(data_rows(&first.join("probe.csv")).len(), 21);
    assert!(first.join("checkpoint_10.json").exists());

    // restarting from step 10 for 10 more steps reproduces the final row
    let resumed = write_config(
        tmp.path(),
        "resume.toml",
        "[time]\nn_steps = 10\n[init]\ncheckpoint = \"first/checkpoint_10.json\"\n",
    );
    let second = tmp.path().join("second");
    let o = memsync(&["simulate", "--config", resumed.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a = data_rows(&first.join("norms.csv"));
    let b = data_rows(&second.join("norms.csv"));
    assert_eq!(a.last(), b.last());
}

#[test]
fn thresholds_reports() {
    let o = memsync(&["thresholds", "--config", &repo_config("hr.toml")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("C1           = 0.25105625"), "{text}");
    assert!(text.contains("above threshold"));

    let o = memsync(&["thresholds", "--config", &repo_config("fhn.toml"), "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let k = v["constants"]["K"].as_f64().unwrap();
    assert!((k - 94714.73).abs() < 1.0);
    assert!((v["constants"]["G"].as_f64().unwrap() - 9.67).abs() < 0.01);

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "p0.toml", "[network.coupling]\nP = 0.0\n");
    let o = memsync(&["thresholds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("below threshold"), "{text}");
    assert!(text.contains("min{7, 4, -"), "{text}");
    let o = memsync(&["thresholds", "--config", cfg.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "below threshold");
    assert!(v["constants"]["rate_margin"].as_f64().unwrap() < 0.0);

    let cfg = write_config(tmp.path(), "ue.toml", "[network.coupling]\nP = 19.6\nu_e = 0.2\n");
    let o = memsync(&["thresholds", "--config", cfg.to_str().unwrap()]);
    assert!(stdout(&o).contains("Psi = "), "{}", stdout(&o));
}

#[test]
fn verify_exit_codes() {
    let o = memsync(&["verify", "--model", "hindmarsh_rose"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = memsync(&["verify", "--model", "fitzhugh_nagumo"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = memsync(&["verify", "--model", "hr", "--scale", "alpha=2", "--samples", "30", "--range", "-5:5"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("counterexample s = "), "{text}");

    let o = memsync(&["verify", "--model", "hr", "--constants", "published"]);
    assert_eq!(code(&o), 1);

    let o = memsync(&["verify", "--model", "nope"]);
    assert_eq!(code(&o), 2);
}
