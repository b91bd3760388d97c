use std::path::Path;
use std::process::{Command, Output};

fn sinrtail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinrtail"))
        .args(args)
        .env_remove("SINRTAIL_WORKERS")
        .output()
        .expect("spawn sinrtail")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn edges_record() {
    let o = sinrtail(&["edges", "--alpha", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["a"].as_f64().unwrap() - 0.171_572_875_253_809_9).abs() < 1e-12);
    assert!((v["b"].as_f64().unwrap() - 5.828_427_124_746_19).abs() < 1e-12);
}

#[test]
fn edges_csv() {
    let o = sinrtail(&["edges", "--alpha", "1", "--format", "csv"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["a", "b"]);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 4.0);
}

#[test]
fn rate_grid_contains_ergodic_point() {
    let o = sinrtail(&["rate", "--alpha", "2", "--rho", "1", "--receiver", "mmse", "--z", "0.2:4.0:0.01"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv_rows(&stdout(&o));
    let (zc, ic, rc) = (column(&header, "z"), column(&header, "rate"), column(&header, "regime"));
    assert_eq!(rows.len(), 382);
    let erg = rows
        .iter()
        .find(|r| (r[zc].parse::<f64>().unwrap() - 2f64.sqrt()).abs() < 1e-10)
        .expect("z_erg row");
    assert_eq!(erg[ic].parse::<f64>().unwrap(), 0.0);
    assert_eq!(erg[rc], "inner");
    for r in &rows {
        assert!(r[ic].parse::<f64>().unwrap() >= 0.0);
    }
    assert_eq!(rows[0][rc], "outer_low");
    assert_eq!(rows.last().unwrap()[rc], "outer_high");
}

#[test]
fn rate_with_dimensions_has_logpdfs() {
    let o = sinrtail(&["rate", "--M", "6", "--N", "3", "--rho", "10", "--z", "0.5:3:0.5"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    let c = column(&header, "logpdf_analytic");
    assert!(rows.iter().all(|r| r[c].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn outage_median_of_exact_zf_law() {
    let args = ["outage", "--M", "6", "--N", "3", "--rho", "10", "--receiver", "zf", "--target", "12.240202496169654"];
    for method in ["analytic", "exact"] {
        let mut a = args.to_vec();
        a.extend(["--method", method]);
        let o = sinrtail(&a);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("ZF ignores rho"));
        let p = json(&o)["probability"].as_f64().unwrap();
        assert!((p - 0.5).abs() < 1e-6, "{method}: {p}");
    }
}

#[test]
fn outage_gaussian_degenerate_is_input_error() {
    let o = sinrtail(&["outage", "--M", "6", "--N", "6", "--receiver", "zf", "--target", "1", "--method", "gaussian"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Gaussian approximation"));
}

#[test]
fn pdf_curves_integrate_to_one() {
    let o = sinrtail(&["pdf", "--M", "8", "--N", "4", "--rho", "1"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    let (zc, pc) = (column(&header, "z"), column(&header, "pdf_analytic"));
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|r| (r[zc].parse().unwrap(), r[pc].parse().unwrap())).collect();
    let mass: f64 = pts.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    assert!((mass - 1.0).abs() < 1e-4, "{mass}");
}

#[test]
fn weights_profile_rows() {
    let o = sinrtail(&["weights", "--alpha", "2", "--receiver", "zf", "--z", "2.5,5", "--points", "8"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 16);
    let (rc, tc) = (column(&header, "regime"), column(&header, "detached_weight"));
    assert!(rows[..8].iter().all(|r| r[rc] == "inner" && r[tc].is_empty()));
    let t: f64 = rows[8][tc].parse().unwrap();
    assert!((t - 7.0 / 9.0).abs() < 1e-10);
}

#[test]
fn invalid_inputs_exit_two() {
    for args in [
        vec!["edges", "--alpha", "0.5"],
        vec!["rate", "--M", "6"],
        vec!["rate", "--alpha", "3", "--M", "6", "--N", "3"],
        vec!["rate", "--alpha", "2", "--z", "1:0:0.1"],
        vec!["mc", "--M", "6", "--N", "3", "--samples", "10"],
    ] {
        let o = sinrtail(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"));
    }
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edges.json");
    let o = sinrtail(&["edges", "--alpha", "4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["a"].as_f64().unwrap(), 1.0);
    assert_eq!(v["b"].as_f64().unwrap(), 9.0);
}

fn run_mc(dir: &Path, tag: &str, workers: &str) -> Output {
    sinrtail(&[
        "mc", "--M", "8", "--N", "4", "--rho", "10", "--receiver", "zf", "--samples", "5000", "--seed", "11",
        "--workers", workers, "--weights-z", "1.4:1.6", "--sampler", "zf-exact", "--out-dir",
        dir.to_str().unwrap(), "--tag", tag,
    ])
}

#[test]
fn mc_is_reproducible_and_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_mc(dir.path(), "a", "1").status.success());
    assert!(run_mc(dir.path(), "b", "3").status.success());
    for f in ["histogram.csv", "summary.json", "weights.csv"] {
        let a = std::fs::read(dir.path().join(format!("a_{f}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b_{f}"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["count"].as_u64(), Some(5000));
    let mean = summary["summary"]["mean"].as_f64().unwrap();
    assert!((mean - 5.0 / 4.0).abs() < 0.05, "{mean}");
    let (header, rows) = csv_rows(&std::fs::read_to_string(dir.path().join("a_histogram.csv")).unwrap());
    assert_eq!(header, ["z", "density", "se", "analytic", "gaussian", "gamma_fit"]);
    assert_eq!(rows.len(), 64);
}

#[test]
fn verify_default_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = sinrtail(&["verify", "--samples", "20", "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(!text.contains("BREACH"));
    assert!(text.contains("warning: ZF with alpha = 1"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["families"].as_array().unwrap().len(), 11);
}

#[test]
fn verify_degenerate_warns() {
    let o = sinrtail(&["verify", "--alpha", "1", "--receiver", "zf", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("zero ergodic variance"));
}

#[test]
fn verify_detects_injected_fault() {
    let o = sinrtail(&["verify", "--alpha", "2", "--rho", "1", "--self-test-fault", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["pass"], false);
    let saddle = v["families"].as_array().unwrap().iter().find(|f| f["name"] == "saddle_equations").unwrap();
    assert_eq!(saddle["pass"], false);
    assert!(stderr(&o).contains("saddle_equations"));
}
