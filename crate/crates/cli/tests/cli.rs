use std::process::{Command, Output};

fn entps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entps")).args(args).env_remove("ENTPS_THREADS").output().expect("run entps")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap_or_else(|| panic!("no `{key}` in {text}"));
    line.split(" = ").nth(1).unwrap().parse().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&entps(&["--help"])), 0);
    assert_eq!(code(&entps(&["--version"])), 0);
    assert_eq!(code(&entps(&["wigner", "grid", "--help"])), 0);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&entps(&[])), 64);
    assert_eq!(code(&entps(&["params", "check"])), 64);
    assert_eq!(code(&entps(&["params", "check", "--alpha", "0.5", "--beta", "1", "--gamma", "0.5"])), 64);
    assert_eq!(code(&entps(&["params", "check", "--kappa", "1", "--alpha", "0.5", "--beta", "1", "--gamma", "0.5", "--delta", "-1"])), 64);
    assert_eq!(code(&entps(&["wigner", "grid", "--rho-re", "0:1"])), 64);
    assert_eq!(code(&entps(&["--threads", "0", "params", "check", "--kappa", "1"])), 64);
}

#[test]
fn husimi_kappa_two() {
    let o = entps(&["params", "check", "--kappa", "2"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("valid"));
    assert!((value(&s, "alpha") - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(value(&s, "beta"), 1.0);
    assert!((value(&s, "gamma") - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(value(&s, "delta"), -1.0);
    assert!((value(&s, "beta*gamma - alpha*delta") - 1.0).abs() < 1e-15);
    assert!(!s.contains("canonical coherent regime"));
}

#[test]
fn canonical_regime_is_flagged() {
    let o = entps(&["params", "check", "--alpha", "0.5", "--beta", "1", "--gamma", "0.5", "--delta", "-1"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("canonical coherent regime"));
    assert_eq!(value(&s, "beta*gamma + alpha*delta"), 0.0);
}

#[test]
fn invalid_parameters_exit_2() {
    let o = entps(&["params", "check", "--alpha", "1", "--beta", "1", "--gamma", "1", "--delta", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"));
    assert_eq!(code(&entps(&["params", "check", "--alpha", "0.5", "--beta", "1", "--gamma", "0.5", "--delta", "-3"])), 2);
    assert_eq!(code(&entps(&["params", "check", "--kappa", "-1"])), 2);
    assert_eq!(code(&entps(&["verify", "--only", "nope"])), 2);
}

fn grid_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["rho_re", "rho_im", "vsig_re", "vsig_im", "W_analytic", "W_numeric", "abs_err"]
    );
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn grid_smoke() {
    let o = entps(&["wigner", "grid", "--kappa", "2", "--rho-re", "-1:1:3", "--rho-im", "-1:1:3", "--vsig-re", "0:0:1", "--vsig-im", "0:0:1"]);
    assert_eq!(code(&o), 0);
    let rows = grid_rows(&stdout(&o));
    assert_eq!(rows.len(), 9);
    let peak = &rows[4];
    assert_eq!(peak[0].parse::<f64>().unwrap(), 0.0);
    let w: f64 = peak[4].parse().unwrap();
    assert!((w - 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
    assert!((w - 0.101321).abs() < 1e-6);
    assert!(rows.iter().all(|r| r[5].is_empty() && r[6].is_empty()));
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() <= w));
}

#[test]
fn grid_numeric_column_matches() {
    let o = entps(&[
        "wigner", "grid", "--kappa", "2", "--sigma", "0.2,-0.1", "--tau", "-0.3,0.1", "--rho-re", "-0.5:0.5:2", "--rho-im", "0:0:1",
        "--vsig-re", "0:0.4:2", "--vsig-im", "-0.2:0.2:2", "--numeric",
    ]);
    assert_eq!(code(&o), 0);
    let rows = grid_rows(&stdout(&o));
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let err: f64 = r[6].parse().unwrap();
        assert!(err < 1e-6, "{r:?}");
    }
}

#[test]
fn verify_only_filters_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = entps(&["verify", "--only", "params,weyl_symbol", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["params", "weyl_symbol"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&o));

    let o = entps(&["verify", "--only", "wigner", "--order2d", "4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let args = ["wigner", "grid", "--rho-re", "-1:1:2", "--rho-im", "0:0:1", "--vsig-re", "0:1:2", "--vsig-im", "0:0:1", "--numeric"];
    let one = entps(&[&["--threads", "1"][..], &args].concat());
    let four = entps(&[&["--threads", "4"][..], &args].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);

    let verify = ["verify", "--only", "wigner,squeeze", "--format", "json"];
    let one = entps(&[&["--threads", "1"][..], &verify].concat());
    let four = entps(&[&["--threads", "4"][..], &verify].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_entps"))
            .args(["params", "check", "--kappa", "1"])
            .env("ENTPS_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("0")), 64);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("coeffs.csv");
    std::fs::write(&cfg, format!(r#"{{"kappa": 1, "cutoff": 2, "output": {{"path": {:?}, "format": "csv"}}}}"#, out)).unwrap();
    let o = entps(&["--config", cfg.to_str().unwrap(), "state", "coeffs"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n1,n2,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 9);

    let o = entps(&["--config", cfg.to_str().unwrap(), "state", "coeffs", "--cutoff", "1", "--format", "json", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["cutoff"], 1);
}

#[test]
fn invalid_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"quadrature": {"order2d": -3}}"#).unwrap();
    let o = entps(&["--config", cfg.to_str().unwrap(), "params", "check", "--kappa", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("quadrature.order2d"), "{}", stderr(&o));

    std::fs::write(&cfg, r#"{"output": {"format": "json"}}"#).unwrap();
    let o = entps(&["--config", cfg.to_str().unwrap(), "wigner", "grid"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("output.format"));

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&entps(&["--config", missing.to_str().unwrap(), "params", "check", "--kappa", "1"])), 2);
}

#[test]
fn overlaps_agree_with_fock_values() {
    for args in [
        &["overlap", "coherent", "--kappa", "2", "--sigma", "0.3,-0.2", "--tau", "-0.4,0.25", "--z1", "0.2,0.1", "--z2", "-0.3,0", "--fock"][..],
        &["overlap", "gamma", "--kappa", "1", "--sigma2", "0.1,0.2", "--tau2", "0.3,-0.1", "--fock"][..],
        &["overlap", "eta", "--kappa", "2", "--eta", "0.3,0.1", "--fock"][..],
        &["overlap", "xi", "--kappa", "2", "--xi", "-0.2,0.4", "--fock"][..],
        &["overlap", "xi-eta", "--xi", "0.2,0.1", "--eta", "-0.1,0.3", "--fock"][..],
    ] {
        let o = entps(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["kind"], args[1]);
        assert!(v["abs_diff"].as_f64().unwrap() < 1e-7, "{args:?}: {v}");
    }
}

#[test]
fn moments_match_fock_expectations() {
    let o = entps(&["moments", "--kappa", "2", "--sigma", "0.2,0.1", "--tau", "-0.1,0.3", "--fock", "--cutoff", "30"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (k, c) in v["closed_form"].as_object().unwrap() {
        let f = v["fock"][k].as_f64().unwrap();
        assert!((f - c.as_f64().unwrap()).abs() < 1e-8, "{k}");
    }
    assert!(v["uncertainty_products"]["minus"].as_f64().unwrap() >= 0.25 - 1e-12);
}
