use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffweil"))
        .args(args)
        .output()
        .expect("spawn cliffweil")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: stdout {:?} stderr {:?}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (out.status.code().unwrap(), v)
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Floats rounded to 1e-6 so residuals at rounding level compare equal.
fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = (n.as_f64().unwrap() * 1e6).round() / 1e6;
            *v = serde_json::json!(if x == 0.0 { 0.0 } else { x });
        }
        Value::Array(a) => a.iter_mut().for_each(normalize),
        Value::Object(m) => m.values_mut().for_each(normalize),
        _ => {}
    }
}

/// Compares with `tests/golden/<name>.json`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, mut actual: Value) {
    normalize(&mut actual);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
        return;
    }
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut expected: Value = serde_json::from_str(&text).unwrap();
    normalize(&mut expected);
    assert_eq!(actual, expected, "golden {name} differs");
}

const GL2_P3: [&str; 6] = ["--family", "GL", "--n", "2", "--p", "3"];

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn args(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn conditions_gl2_r3() {
    let a = with(&["conditions"], &GL2_P3);
    let a = with(&args(&a), &["--r", "3"]);
    let (code, v) = report(&args(&a));
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "cliffweil-report/1");
    assert_eq!(v["settings"]["seed"], 0x5eed);
    let r = &v["result"];
    assert_eq!(r["condition_i"]["nondegenerate"], true);
    assert_eq!(r["condition_ii"]["ok"], true);
    assert_eq!(r["condition_iii"]["ok"], true);
    golden("conditions_gl2_p3_r3", v);
}

#[test]
fn schur_sweep_gl2() {
    let a = with(&["schur", "--sweep"], &GL2_P3);
    let (code, v) = report(&args(&a));
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["orbits"], 12);
    assert_eq!(r["regular_orbits"], 9);
    let recs = r["records"].as_array().unwrap();
    assert_eq!(recs.len(), 81);
    assert!(recs.iter().all(|x| x["symmetric"] == true && x["trivial"] == true));
    golden("schur_sweep_gl2_p3", v);
}

#[test]
fn orbits_gl2() {
    let a = with(&["orbits"], &GL2_P3);
    let (code, v) = report(&args(&a));
    assert_eq!(code, 0);
    assert_eq!(v["result"]["orbits"].as_array().unwrap().len(), 12);
    golden("orbits_gl2_p3", v);
}

#[test]
fn parametrize_and_standalone_oracle() {
    let saved = scratch("gl2_r2_chars.json");
    let a = with(&["parametrize"], &GL2_P3);
    let a = with(
        &args(&a),
        &["--r", "2", "--beta", "0 1 1 1", "--save-characters", saved.to_str().unwrap()],
    );
    let (code, v) = report(&args(&a));
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["theta_count"], 8);
    assert_eq!(r["dims"], serde_json::json!(vec![6; 8]));
    assert_eq!(r["oracle"]["irreducible"], 8);
    assert_eq!(r["oracle"]["orthogonal"], true);
    assert_eq!(r["oracle"]["complete"], true);
    golden("parametrize_gl2_p3_r2_irreducible", v);

    let (code, v) = report(&["oracle", "--characters", saved.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["oracle"]["irreducible"], 8);
    assert_eq!(v["result"]["oracle"]["kernel_index"], 48);
}

#[test]
fn twist_and_central() {
    let a = with(&["twist-check"], &GL2_P3);
    let t = with(
        &args(&a),
        &["--r", "2", "--beta", "1 1 1 2", "--beta0", "0 1 1 1", "--lambda", "1", "--induced"],
    );
    let (code, v) = report(&args(&t));
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"]["mismatches"], 0);
    assert_eq!(v["result"]["verdict"]["induced_agree"], true);
    golden("twist_gl2_p3_lambda1", v);

    let c = with(&args(&a), &["--r", "2", "--beta", "1 0 0 1", "--central"]);
    let (code, v) = report(&args(&c));
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"]["terms"], 3888);
}

#[test]
fn sg_counts_gl2() {
    let a = with(&["sg-counts"], &GL2_P3);
    let a = with(&args(&a), &["--r", "2", "--beta", "0 1 1 1"]);
    let (code, v) = report(&args(&a));
    assert_eq!(code, 0);
    assert_eq!(v["result"]["torus_order"], 72);
    assert_eq!(v["result"]["theta_count_torus"], 8);
    golden("sg_counts_gl2_p3", v);
}

#[test]
fn malformed_beta_file_exits_2_with_line_number() {
    let path = scratch("bad_beta.txt");
    std::fs::write(&path, "# beta\n\n0 1 1 q\n").unwrap();
    let a = with(&["parametrize"], &GL2_P3);
    let a = with(&args(&a), &["--r", "2", "--beta-file", path.to_str().unwrap()]);
    let out = run(&args(&a));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn budget_overrun_exits_3() {
    let a = with(&["parametrize"], &GL2_P3);
    let a = with(&args(&a), &["--r", "3", "--beta", "0 1 1 1", "--budget", "1000"]);
    let (code, v) = report(&args(&a));
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "budget_exceeded");
}

#[test]
fn unmet_hypothesis_exits_1() {
    // Orbit 0 is central, so G_beta(O_r) is all of G(O_r).
    let a = with(&["parametrize"], &GL2_P3);
    let a = with(&args(&a), &["--r", "2", "--orbit", "0"]);
    let (code, v) = report(&args(&a));
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "precondition");
}

#[test]
fn config_file_with_flag_override() {
    let path = scratch("run.toml");
    std::fs::write(&path, "family = \"GL\"\nn = 2\np = 5\nr = 2\nseed = 11\n").unwrap();
    let (code, v) = report(&["conditions", "--config", path.to_str().unwrap(), "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["p"], 3);
    assert_eq!(v["settings"]["seed"], 11);

    std::fs::write(&path, "family = \"GL\"\nprime = 3\n").unwrap();
    let out = run(&["conditions", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_goes_to_out_path() {
    let path = scratch("orbits.json");
    let a = with(&["orbits"], &GL2_P3);
    let a = with(&args(&a), &["--out", path.to_str().unwrap()]);
    let out = run(&args(&a));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "orbits");
}
