use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_twistgeom"));
    c.env_remove("TWISTGEOM_FORMAT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not json ({e}): {}", stdout(o)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn strip_durations(v: &mut Value) {
    if let Some(es) = v["entries"].as_array_mut() {
        for e in es {
            e.as_object_mut().unwrap().remove("duration_ms");
        }
    }
}

#[test]
fn main_suite_as_json_passes() {
    let o = run(&["verify", "--model", "nc_torus", "--p", "1", "--q", "3", "--suite", "main", "--box", "2", "--samples", "20", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["suite"], "main");
    assert_eq!(v["summary"]["all_pass"], true);
    assert_eq!(v["summary"]["checks"], 3);
    assert_eq!(v["sample_spec"]["box"], 2);
}

#[test]
fn classical_torus_passes_everything() {
    let o = run(&["verify", "--model", "classical_torus", "--suite", "all", "--box", "1", "--samples", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn finite_cocycle_suite_is_exhaustive() {
    let o = run(&["verify", "--model", "finite_bicharacter", "--n", "3", "--suite", "cocycle", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let e = v["entries"].as_array().unwrap().iter().find(|e| e["check_id"] == "cocycle.equation").unwrap();
    assert!(e["sample_spec"].as_str().unwrap().contains("exhaustive"), "{e}");
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let args = ["verify", "--model", "nc_torus", "--suite", "hermitian", "--box", "2", "--samples", "15", "--seed", "7", "--format", "json"];
    let (mut a, mut b) = (json(&run(&args)), json(&run(&args)));
    strip_durations(&mut a);
    strip_durations(&mut b);
    assert_eq!(a, b);
}

#[test]
fn a_fault_fails_with_exit_1() {
    let o = run(&["verify", "--model", "nc_torus", "--suite", "cocycle", "--box", "2", "--samples", "10", "--fault", "cocycle_value"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn bad_parameters_exit_2() {
    for args in [
        &["verify", "--model", "nc_torus", "--q", "0"][..],
        &["verify", "--model", "donut"],
        &["verify", "--suite", "everything"],
        &["verify", "--model", "fun_group", "--group", "a5"],
        &["verify", "--model", "fun_group", "--fault", "sigma"],
        &["verify", "--format", "xml"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stdout(&o));
    }
    let o = bin().args(["verify", "--suite", "hopf"]).env("TWISTGEOM_FORMAT", "yaml").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let cfg = scratch("unknown_key.conf");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "verify"]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent/twistgeom.conf", "verify"]).status.code(), Some(2));
}

#[test]
fn config_file_and_environment() {
    let cfg = scratch("finite.conf");
    std::fs::write(&cfg, "# finite instrument\nmodel = finite_bicharacter\nn = 3\nsuite = hopf\nformat = json\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["model"]["name"], "finite_bicharacter");
    assert_eq!(v["suite"], "hopf");
    // a flag beats the config file
    let o = run(&["--config", cfg.to_str().unwrap(), "verify", "--format", "text"]);
    assert!(stdout(&o).starts_with("model=finite_bicharacter(3,skew)"), "{}", stdout(&o));
    // the environment supplies the format when nothing else does
    let o = bin().args(["verify", "--model", "finite_bicharacter", "--n", "3", "--suite", "hopf"]).env("TWISTGEOM_FORMAT", "json").output().unwrap();
    assert_eq!(json(&o)["summary"]["all_pass"], true);
}

#[test]
fn twist_emits_stable_tables() {
    let emit = |name: &str, level: &str| {
        let path = scratch(name);
        let o = run(&["twist", "--model", "nc_torus", "--p", "1", "--q", "3", "--box", "2", "--samples", "10", "--level", level, "--emit", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(&path).unwrap()
    };
    let twisted = emit("twisted.json", "twisted");
    let v: Value = serde_json::from_slice(&twisted).unwrap();
    assert_eq!(v["tables"]["product_gamma"]["y"]["x"]["coeff"], "zeta(3)^2");
    assert_eq!(v["tables"]["product_gamma"]["y"]["x"]["monomial"], "x*_g y");
    assert_eq!(twisted, emit("twisted_again.json", "twisted"));
    let base = emit("base.json", "base");
    assert_eq!(base, emit("roundtrip.json", "roundtrip"));
    assert_ne!(base, twisted);
}

#[test]
fn unwritable_emit_path_exits_2() {
    let o = run(&["twist", "--model", "classical_torus", "--box", "1", "--emit", "/nonexistent/dir/out.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn faults_are_listed() {
    let o = run(&["faults"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for f in ["cocycle_value", "sigma", "identity_n", "hermitian_scale"] {
        assert!(s.contains(f), "{s}");
    }
}
