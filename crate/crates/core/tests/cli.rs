use std::path::Path;
use weak_moments::cli::{run, EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_OK, EXIT_USAGE};
use weak_moments::ParametricModel;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["weakmom"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_sample(dir: &Path, name: &str, model: &ParametricModel, n: usize) -> String {
    let p = dir.join(name);
    std::fs::write(&p, model.sample(n, 1).to_text()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn estimate_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "x.txt", &ParametricModel::cauchy(2.0), 400);
    let (code, out, _) = call(&["estimate", &data]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("converged  true"));
    assert!(out.contains("se "));

    let json_path = dir.path().join("fit.json");
    let (code, out, _) = call(&["estimate", &data, "--method", "gmm-2s", "--j", "1,2", "--format", "json", "--out", json_path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["converged"], true);
    let mu = v["result"]["theta"][0].as_f64().unwrap();
    assert!((mu - 2.0).abs() < 0.5);
    assert_eq!(std::fs::read_to_string(json_path).unwrap().trim(), out.trim());
}

#[test]
fn estimate_t_and_bivariate() {
    let dir = tempfile::tempdir().unwrap();
    let t = write_sample(dir.path(), "t.txt", &ParametricModel::student_t(3.0, 0.0, 1.0).unwrap(), 500);
    let (code, out, err) = call(&["estimate", &t, "--family", "t", "--nu", "3", "--j", "1,2"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("\ns "));
    let b = write_sample(dir.path(), "b.txt", &ParametricModel::bivariate_cauchy([1.0, 1.0]), 500);
    let (code, _, err) = call(&["estimate", &b, "--family", "bivariate-cauchy", "--method", "spatial-median"]);
    assert_eq!(code, EXIT_OK, "{err}");
}

#[test]
fn estimate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(call(&["estimate", empty.to_str().unwrap()]).0, EXIT_INPUT);
    assert_eq!(call(&["estimate", "/nonexistent/file.txt"]).0, EXIT_INPUT);
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1.0\nabc\n").unwrap();
    assert_eq!(call(&["estimate", bad.to_str().unwrap()]).0, EXIT_INPUT);

    let data = write_sample(dir.path(), "x.txt", &ParametricModel::cauchy(0.0), 100);
    assert_eq!(call(&["estimate", &data, "--family", "gamma"]).0, EXIT_USAGE);
    assert_eq!(call(&["estimate", &data, "--method", "mode"]).0, EXIT_USAGE);
    assert_eq!(call(&["estimate", &data, "--weighting", "twostep", "--ridge", "-1"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);

    // A single iteration is not enough to reach the root from a far start.
    let (code, out, _) = call(&["estimate", &data, "--theta", "8", "--max-iter", "1"]);
    assert_eq!(code, EXIT_NONCONVERGENCE);
    assert!(out.contains("converged  false"));
}

#[test]
fn diagnose_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("if.csv");
    let (code, out, _) = call(&["diagnose", "--theta", "0", "--grid", "41", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("GES        3.02"));
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,if_mu");
    assert_eq!(lines.len(), 42);

    let (code, out, _) = call(&["diagnose", "--method", "median", "--theta", "0"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("1.570796"));

    let (code, out, err) = call(&["diagnose", "--family", "t", "--nu", "3", "--theta", "0,1", "--j", "1,2", "--weighting", "twostep"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("V "));
}

#[test]
fn reconstruct_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("h.csv");
    let (code, out, _) = call(&["reconstruct", "--synthetic", "normal", "--lambda", "1e-4", "--points", "1024", "--out", out_csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("error"));

    let (code, _, err) = call(&["reconstruct", "--input", out_csv.to_str().unwrap(), "--lambda", "1e-3"]);
    assert_eq!(code, EXIT_OK, "{err}");

    let data = write_sample(dir.path(), "x.txt", &ParametricModel::cauchy(0.0), 200);
    let (code, _, err) = call(&["reconstruct", "--data", &data, "--lambda", "1e-3", "--points", "512"]);
    assert_eq!(code, EXIT_OK, "{err}");

    assert_eq!(call(&["reconstruct", "--synthetic", "normal", "--lambda", "0"]).0, EXIT_USAGE);
    assert_eq!(call(&["reconstruct", "--synthetic", "normal", "--lambda", "-1e-3"]).0, EXIT_USAGE);
    assert_eq!(call(&["reconstruct", "--lambda", "1e-3"]).0, EXIT_USAGE);
    assert_eq!(call(&["reconstruct", "--input", "/nonexistent.csv", "--lambda", "1e-3"]).0, EXIT_INPUT);
}

#[test]
fn simulate_and_scenarios() {
    let (code, out, _) = call(&["scenarios"]);
    assert_eq!(code, EXIT_OK);
    for name in ["table1", "table2", "t3", "table3", "table4"] {
        assert!(out.contains(name));
    }
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("s.toml");
    let (code, toml, _) = call(&["scenarios", "--show", "table2"]);
    assert_eq!(code, EXIT_OK);
    std::fs::write(&toml_path, toml).unwrap();

    let (code, out, err) = call(&["simulate", toml_path.to_str().unwrap(), "--reps", "5", "--sizes", "50", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(err.contains("failed fits"));

    assert_eq!(call(&["simulate", "nope"]).0, EXIT_INPUT);
    assert_eq!(call(&["simulate", "table1", "--format", "xml"]).0, EXIT_USAGE);
    assert_eq!(call(&["scenarios", "--show", "nope"]).0, EXIT_USAGE);
}
