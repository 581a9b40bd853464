use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CURVED: &str = r#"{"k":1,"r":2,"coords":{"y":["y1","y2"],"q":["q1","q2"]},
    "periods":{"y1":1,"y2":1,"q1":1,"q2":1},
    "omega":[["0","1"],["-1","0"]],
    "R":[["sin(2*pi*q1)*cos(2*pi*y2)/4","0"],["0","cos(2*pi*(y1+q2))/5"]],"params":{}}"#;

const OPEN_OMEGA: &str = r#"{"k":1,"r":2,"coords":{"y":["y1","y2"],"q":["q1","q2"]},
    "periods":{"y1":1,"y2":1,"q1":1,"q2":1},
    "omega":[["0","1+q1"],["-1-q1","0"]],"R":[["0","0"],["0","0"]],"params":{}}"#;

fn shla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shla")).args(args).env_remove("SHLA_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn reproduce_flat_torus_passes() {
    let o = shla(&["reproduce", "zambon"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("Kr profile max-error"));
    assert!(text.lines().all(|l| l.ends_with("PASS")), "{text}");
}

#[test]
fn reproduce_oscillator_passes() {
    let o = shla(&["reproduce", "oscillator"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.ends_with("PASS")).count(), 4);
}

#[test]
fn missing_chart_is_an_input_error() {
    let o = shla(&["chart", "validate", "/no/such/chart.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/chart.json"));
}

#[test]
fn q_dependent_omega_is_rejected() {
    let d = scratch("cli-open-omega");
    let chart = write(&d, "chart.json", OPEN_OMEGA);
    let o = shla(&["chart", "validate", &chart]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_one() {
    let o = shla(&["linfty-check", "builtin:flat-torus", "--arity", "2", "--trials", "2", "--tol=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let d = scratch("cli-threads");
    let chart = write(&d, "curved.json", CURVED);
    for args in [
        vec!["linfty-check", chart.as_str(), "--arity", "3", "--trials", "6", "--points", "16"],
        vec!["grassmann", "--n", "3", "--k", "1", "--samples", "300"],
    ] {
        let one = shla(&[args.as_slice(), &["--threads", "1"]].concat());
        let three = shla(&[args.as_slice(), &["--threads", "3"]].concat());
        assert!(one.status.success(), "{args:?}: {}", stdout(&one));
        assert_eq!(stdout(&one), stdout(&three), "{args:?}");
    }
}

#[test]
fn manifest_is_reproducible_apart_from_wall_time() {
    let d = scratch("cli-manifest");
    let g = write(&d, "g.json", r#"{"degree":1,"coeff":{"1":"sin(2*pi*y1)","2":"sin(2*pi*y2)"}}"#);
    let mut docs = Vec::new();
    for run in ["a", "b"] {
        let out = d.join(run);
        let o = shla(&["kuranishi", "builtin:flat-torus", "--gamma1", &g, "--grid", "8", "--out", out.to_str().unwrap(), "--emit-gnuplot"]);
        assert!(o.status.success());
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        let csv = std::fs::read_to_string(out.join("kuranishi.csv")).unwrap();
        assert!(out.join("kuranishi.dat").exists());
        let mut m = m.as_object().unwrap().clone();
        assert!(m.remove("wall_time_s").unwrap().as_f64().unwrap() >= 0.0);
        m.remove("command");
        docs.push((serde_json::Value::Object(m), csv));
    }
    assert_eq!(docs[0], docs[1]);
    assert_eq!(docs[0].0["seed"], 7);
    assert_eq!(docs[0].0["chart_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_shla"))
        .args(["grassmann", "--n", "2", "--k", "1", "--samples", "50"])
        .env("SHLA_SEED", "11")
        .output()
        .unwrap();
    let again = shla(&["grassmann", "--n", "2", "--k", "1", "--samples", "50", "--seed", "11"]);
    assert_eq!(stdout(&o), stdout(&again));
}

#[test]
fn mc_solve_reports_the_obstruction() {
    let d = scratch("cli-mc");
    let g = write(&d, "g.json", r#"{"degree":1,"coeff":{"1":"sin(2*pi*y1)","2":"sin(2*pi*y2)"}}"#);
    let o = shla(&["mc-solve", "builtin:flat-torus", "--gamma1", &g, "--trunc", "4"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["order"], 2);
    assert!((doc["norm"].as_f64().unwrap() - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9);
}

#[test]
fn curvature_checks_pass_on_a_curved_chart() {
    let d = scratch("cli-curv");
    let chart = write(&d, "curved.json", CURVED);
    for check in ["bianchi", "transform"] {
        let o = shla(&["curvature", &chart, "--check", check]);
        assert!(o.status.success(), "{check}: {}", stdout(&o));
    }
    let o = shla(&["curvature", &chart, "--at", "y1=0.1,y2=0.2,q1=0.3,q2=0.4"]);
    assert_eq!(stdout(&o).lines().count(), 3);
}
