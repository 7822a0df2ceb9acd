use std::process::{Command, Output};

use serde_json::Value;

fn hm_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hm-lab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = hm_lab(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (out.status.code().unwrap(), v)
}

fn check_names(v: &Value) -> Vec<String> {
    v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect()
}

#[test]
fn verify_all_reference_member() {
    let (code, v) = json(&["verify-all", "--n", "3", "--ell", "1", "--a", "0", "--r0", "1"]);
    assert_eq!(code, 0, "{v:#}");
    let e = v["results"][0]["energy.e_hh"].as_f64().unwrap();
    assert!((e + 1.0 / 12.0).abs() < 1e-8, "{e}");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["params", "results", "checks"]);
    for c in v["checks"].as_array().unwrap() {
        let fields: Vec<&String> = c.as_object().unwrap().keys().collect();
        assert_eq!(fields, ["name", "value", "reference", "deviation", "pass"]);
        assert_eq!(c["pass"], true, "{c}");
    }
}

#[test]
fn one_check_per_module_invariant() {
    let expected: [(&str, &[&str]); 5] = [
        (
            "curvature",
            &[
                "geometry.scalar_closed",
                "geometry.scalar_numeric",
                "geometry.christoffel_grid",
                "geometry.ricci_diagonal",
                "geometry.theta_ricci_equal",
                "geometry.profile_consistency",
            ],
        ),
        (
            "regularity",
            &["soliton.horizon_root", "soliton.monotone_consistency", "soliton.beta_identity", "soliton.cone_ratio"],
        ),
        (
            "static-check",
            &["einstein.ads_residual", "einstein.ricci_fd", "einstein.scaling_covariance", "einstein.uniqueness_verdict"],
        ),
        (
            "complex",
            &[
                "complex.j_squared",
                "complex.compatibility",
                "complex.nijenhuis",
                "complex.d_omega",
                "complex.u_smooth",
                "complex.extension_rotation",
            ],
        ),
        (
            "energy",
            &[
                "energy.ehh_closed",
                "energy.a_cancellation",
                "energy.hamiltonian_closed",
                "energy.proportionality",
                "energy.ehh_negative",
                "energy.density_tail",
                "energy.falloff_audit",
            ],
        ),
    ];
    for (cmd, names) in expected {
        let (code, v) = json(&[cmd, "--n", "4", "--a", "-1.5"]);
        assert_eq!(code, 0, "{cmd}: {v:#}");
        assert_eq!(check_names(&v), names);
    }
}

#[test]
fn compare_sweep_is_unimodal_with_peak_at_zero() {
    let (code, v) = json(&["compare", "--sweep", "a=-5..5:41"]);
    assert_eq!(code, 0, "{v:#}");
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 41);
    let ratio: Vec<f64> = rows.iter().map(|r| r["ratio"].as_f64().unwrap()).collect();
    assert!(ratio.iter().all(|&x| x > 0.0 && x <= 1.0));
    assert!((ratio[20] - 1.0).abs() < 1e-10);
    assert!(ratio[..21].windows(2).all(|w| w[0] < w[1]));
    assert!(ratio[20..].windows(2).all(|w| w[0] > w[1]));
    assert!(check_names(&v).contains(&"compare.ratio_peak_at_a0".to_string()));
}

#[test]
fn csv_sweep_has_count_rows() {
    let out = hm_lab(&["regularity", "--n", "5", "--sweep", "a=-2..2:7", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 7);
    assert!(lines[0].starts_with("n,ell,a,r0,r_plus"));
    let a: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(a, ["-2.0", "-1.33333333333333", "-0.666666666666667", "0.0", "0.666666666666667", "1.33333333333333", "2.0"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["energy", "--sweep", "a=-3..3:9", "--format", "json"];
    let first = hm_lab(&args).stdout;
    for threads in ["1", "3"] {
        let again = Command::new(env!("CARGO_BIN_EXE_hm-lab"))
            .args(args)
            .env("HM_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(again.stdout, first);
    }
}

#[test]
fn json_round_trips_through_text() {
    let out = hm_lab(&["curvature", "--n", "5", "--a", "2.5", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again.as_bytes(), out.stdout.as_slice());
}

#[test]
fn out_file_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# member\nn = 5\na = 2\nr0 = 1.5\nformat = csv\n").unwrap();
    let out_path = dir.path().join("out.json");
    let out = hm_lab(&[
        "regularity",
        "--config",
        cfg.to_str().unwrap(),
        "--a",
        "-1",
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["params"]["n"], 5);
    assert_eq!(v["params"]["a"], -1.0);
    assert_eq!(v["params"]["r0"], 1.5);

    std::fs::write(&cfg, "n = 4\nspeed = 3\n").unwrap();
    let out = hm_lab(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| hm_lab(args).status.code().unwrap();
    assert_eq!(code(&["curvature", "--r", "0.5"]), 2);
    assert_eq!(code(&["complex", "--n", "5"]), 2);
    assert_eq!(code(&["compare", "--sweep", "b=0..1:3"]), 2);
    assert_eq!(code(&["compare", "--sweep", "a=0..1:0"]), 2);
    assert_eq!(code(&["compare", "--ell", "-1"]), 2);
    assert_eq!(code(&["static-check", "--cc", "1"]), 2);
    assert_eq!(code(&["energy", "--r0", "0", "--a", "1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["compare", "--out", "/nonexistent-dir/x.json"]), 4);
    // a member evaluated with a far too tight tolerance fails its check
    assert_eq!(code(&["curvature", "--tol-fd", "1e-15"]), 1);
}

#[test]
fn lambda_mismatch_is_a_passing_negative_verdict() {
    let (code, v) = json(&["static-check", "--cc", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["is_ads_soliton"], false);
    let (_, v) = json(&["static-check", "--a", "0.5"]);
    assert_eq!(v["results"][0]["is_ads_soliton"], false);
    let (_, v) = json(&["static-check"]);
    assert_eq!(v["results"][0]["is_ads_soliton"], true);
}
