use std::path::Path;
use std::process::{Command, Output};

fn aniso(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_aniso"));
    cmd.args(args).env_remove("ANISO_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("ANISO_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn dilation_passes_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = aniso(&["dilation", "--seed", "5", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("dilation_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["seed"], 5);
}

#[test]
fn environment_sets_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = aniso(&["dilation"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("dilation_summary.json").exists());
}

#[test]
fn non_expanding_matrix_exits_2_naming_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let o = aniso(&["quasinorm", "--matrix", "[[-1, 0], [0, 2]]", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("-1"), "{err}");
    assert!(!dir.path().join("quasinorm_summary.json").exists());
}

#[test]
fn schema_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"matrix": [[1, 0], [0, 2]], "unknown": 1}"#);
    let o = aniso(&["dilation", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown"));

    let ragged = write_config(dir.path(), "ragged.json", r#"{"matrix": [[1, 0], [0]]}"#);
    let o = aniso(&["dilation", "--config", &ragged], None);
    assert_eq!(o.status.code(), Some(2));

    let o = aniso(&["measures", "--beta", "1.5"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_1() {
    // a radial profile far above the top level leaves mass past m_max
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "trunc.json",
        r#"{"matrix": [[1, 0], [0, 2]],
            "kernel": {"omega": {"kind": "trig", "terms": [{"order": 1, "cos": 1.0, "sin": 0.0}]},
                       "h": {"kind": "constant", "value": 1e6}},
            "extrapolation": {"m_max": 1, "blocks": {"first": -2, "last": 2}}}"#,
    );
    let o = aniso(&["extrapolate", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn beta_preset_from_q_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "coarse.json",
        r#"{"matrix": [[1, 0], [0, 2]],
            "kernel": {"omega": {"kind": "trig", "terms": [{"order": 1, "cos": 1.0, "sin": 0.0}]},
                       "h": {"kind": "constant", "value": 1.0}},
            "measures": {"k": -1, "direction": [1, 0], "points_per_decade": 2, "subsamples": 1}}"#,
    );
    let out = dir.path().join("m");
    let o = aniso(
        &["measures", "--config", &cfg, "--beta-from-q", "1.5", "--out", out.to_str().unwrap()],
        None,
    );
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("measures_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["results"]["beta"], 8.0);
    assert_eq!(summary["config"]["beta"], 8.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["quasinorm", "extrapolate"] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        for out in [&a, &b] {
            let o = aniso(&[cmd, "--seed", "9", "--out", out.to_str().unwrap()], None);
            assert_eq!(o.status.code(), Some(0));
        }
        let name = format!("{cmd}_summary.json");
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
    }
}

#[test]
fn defaults_round_trip_through_config_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = aniso(&["defaults"], None);
    assert_eq!(o.status.code(), Some(0));
    let cfg = write_config(dir.path(), "defaults.json", &String::from_utf8(o.stdout).unwrap());
    let o = aniso(&["dilation", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
}
