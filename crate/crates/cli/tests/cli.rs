use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }

    fn error(&self) -> Value {
        serde_json::from_str(self.stderr.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", self.stderr))
    }
}

fn kpzlab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_kpzlab")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("UTF-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("UTF-8 stderr"),
    }
}

fn ok(args: &[&str]) -> Run {
    let run = kpzlab(args);
    assert_eq!(run.code, 0, "kpzlab {args:?} failed: {}", run.stderr);
    run
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"))
}

fn assert_valid(name: &str, instance: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{name} schema violations: {errors:#?}\n{instance:#}");
}

/// Validates a stdout document and the manifest embedded in it.
fn assert_document(name: &str, doc: &Value) {
    assert_valid(name, doc);
    assert_valid("manifest", &doc["manifest"]);
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn zeta_of_two_paths() {
    let doc = ok(&["exponents", "zeta", "--L", "2"]).json();
    assert_document("exponents", &doc);
    assert_eq!(doc["zeta"].as_f64(), Some(0.625));
    assert_eq!(doc["selector"], "zeta");
    assert_eq!(doc["manifest"]["seeds"], serde_json::json!([]));
}

#[test]
fn dims_reproduce_the_percolation_row() {
    let doc = ok(&["exponents", "dims", "--Q", "1"]).json();
    assert_document("exponents", &doc);
    assert!(close(doc["d_ep"].as_f64().unwrap(), 4.0 / 3.0));
    assert!(close(doc["d_hull"].as_f64().unwrap(), 7.0 / 4.0));
    assert!(close(doc["d_sc"].as_f64().unwrap(), 3.0 / 4.0));
    assert_eq!(doc["model"]["q_potts"].as_f64(), Some(1.0));
}

#[test]
fn winding_of_three_strands_with_one_pinch() {
    let doc = ok(&["exponents", "winding", "--kappa", "6", "--k", "3", "--j", "1"]).json();
    assert!(close(doc["winding"].as_f64().unwrap(), 0.375));
}

#[test]
fn every_selector_yields_a_valid_document() {
    let cases: [&[&str]; 13] = [
        &["zeta", "--L", "1.5", "--locus", "boundary"],
        &["packet", "--packets", "1,2"],
        &["copolymer", "--packets", "1:0,0:1", "--strands", "1"],
        &["perc", "--L", "3"],
        &["watermelon", "--kappa", "6", "--L", "2", "--frame", "qg"],
        &["dims", "--c", "0", "--phase", "dense"],
        &["sle-moment", "--kappa", "8", "--L", "2", "--n", "2"],
        &["disconnection", "--kappa", "6", "--L", "1", "--sides", "two"],
        &["double-sided", "--kappa", "2.6666666666666665", "--L", "1", "--n1", "1", "--n2", "2"],
        &["winding", "--g", "1", "--k", "1"],
        &["sde", "--kappa", "6", "--xa", "1", "--xb", "2", "--locus", "boundary"],
        &["kac", "--kappa", "6", "--p", "1", "--q", "3"],
        &["cpa", "--c", "0"],
    ];
    for case in cases {
        let mut argv = vec!["exponents"];
        argv.extend(case);
        let doc = ok(&argv).json();
        assert_document("exponents", &doc);
        assert_eq!(doc["selector"], case[0]);
    }
}

#[test]
fn exponent_values_match_closed_forms() {
    let value = |argv: &[&str], key: &str| ok(argv).json()[key].as_f64().unwrap();
    assert!(close(value(&["exponents", "perc", "--L", "2"], "x"), 0.25));
    assert!(close(value(&["exponents", "perc", "--L", "3", "--locus", "boundary"], "x"), 2.0));
    assert!(close(value(&["exponents", "zeta", "--L", "1", "--locus", "boundary"], "zeta"), 1.0));
    assert!(close(value(&["exponents", "cpa", "--c", "0"], "beta"), 11.0 / 16.0));
    assert!(close(value(&["exponents", "packet", "--packets", "1,1"], "zeta"), 0.625));
}

#[test]
fn exponent_csv_has_a_header() {
    let run = ok(&["exponents", "zeta", "--L", "2", "--format", "csv"]);
    let rows = csv_rows(&run.stdout);
    assert_eq!(rows[0], ["quantity", "value"]);
    assert_eq!(rows[1][0], "zeta");
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.625);
}

#[test]
fn single_dimension_value() {
    let run = ok(&["spectra", "D", "--c", "0", "--n", "2"]);
    let rows = csv_rows(&run.stdout);
    assert_eq!(rows[0], ["n", "D", "dD_dn"]);
    assert_eq!(rows.len(), 2);
    assert!(close(rows[1][1].parse().unwrap(), 11.0 / 12.0));
    let doc = ok(&["spectra", "D", "--c", "0", "--n", "2", "--format", "json"]).json();
    assert_document("spectra", &doc);
    assert!(close(doc["value"].as_f64().unwrap(), 11.0 / 12.0));
}

#[test]
fn brownian_spectrum_peaks_at_three() {
    let doc = ok(&["spectra", "f", "--c", "0", "--format", "json"]).json();
    assert_document("spectra", &doc);
    assert!(close(doc["max"]["x"].as_f64().unwrap(), 3.0));
    assert!(close(doc["max"]["y"].as_f64().unwrap(), 4.0 / 3.0));
    assert!(close(doc["supremum"].as_f64().unwrap(), 4.0 / 3.0));
}

#[test]
fn c_one_spectrum_is_left_sided() {
    let doc = ok(&["spectra", "f", "--c", "1", "--format", "json"]).json();
    assert!(close(doc["supremum"].as_f64().unwrap(), 1.5));
    let ys: Vec<f64> = doc["points"].as_array().unwrap().iter().map(|p| p["y"].as_f64().unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[0] < w[1]), "f(α) at c = 1 increases toward its supremum");
    assert!(ys.iter().all(|&y| y < 1.5));
}

#[test]
fn every_spectrum_kind_yields_a_valid_document() {
    let cases: [&[&str]; 7] = [
        &["tau", "--c", "-2"],
        &["D", "--kappa", "6"],
        &["f", "--c", "0.5", "--points", "20"],
        &["mixed", "--c", "0", "--lambda", "0.5"],
        &["wedge", "--c", "0", "--points", "50"],
        &["poly", "--c", "0", "--m", "2", "--poly-kind", "brownian-cut"],
        &["density", "--c", "0", "--ratio", "100", "--from", "0.6", "--to", "5", "--points", "10"],
    ];
    for case in cases {
        let mut argv = vec!["spectra"];
        argv.extend(case);
        argv.extend(["--format", "json"]);
        let doc = ok(&argv).json();
        assert_document("spectra", &doc);
        assert_eq!(doc["kind"], case[0]);
    }
}

#[test]
fn tau_derivative_column_is_alpha() {
    let rows = csv_rows(&ok(&["spectra", "tau", "--c", "0", "--n", "1"]).stdout);
    let alpha = kpzlab_core::spectra::mf_alpha(0.0, 1.0).unwrap();
    assert!((rows[1][2].parse::<f64>().unwrap() - alpha).abs() < 1e-8);
}

#[test]
fn domain_errors_name_the_parameter() {
    let run = kpzlab(&["spectra", "D", "--c", "0", "--n", "-1"]);
    assert_eq!(run.code, 2);
    let err = run.error();
    assert_valid("error", &err);
    assert_eq!(err["error"]["kind"], "domain");
    assert_eq!(err["error"]["parameter"]["name"], "n");
    assert_eq!(err["error"]["parameter"]["value"].as_f64(), Some(-1.0));
}

#[test]
fn usage_errors_exit_one() {
    for argv in [
        &["exponents", "bogus"][..],
        &["exponents", "zeta"],
        &["exponents", "dims", "--c", "0", "--kappa", "2"],
        &["spectra", "f", "--c", "0", "--n", "2"],
        &["sim", "sle"],
        &["verify", "exact", "--threads", "0"],
    ] {
        let run = kpzlab(argv);
        assert_eq!(run.code, 1, "{argv:?}: {}", run.stderr);
        let err = run.error();
        assert_valid("error", &err);
        assert_eq!(err["error"]["kind"], "usage");
    }
    let listed = kpzlab(&["exponents", "bogus"]).error()["error"]["message"].as_str().unwrap().to_string();
    assert!(listed.contains("sle-moment") && listed.contains("cpa"));
}

#[test]
fn ambiguous_central_charge_is_a_domain_error() {
    let run = kpzlab(&["exponents", "dims", "--c", "0"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.error()["error"]["kind"], "domain");
}

#[test]
fn help_exits_zero() {
    let run = ok(&["--help"]);
    assert!(run.stdout.contains("exponents"));
}

#[test]
fn out_prefix_writes_artifacts_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("zeta");
    let run = ok(&["exponents", "zeta", "--L", "3", "--out", prefix.to_str().unwrap()]);
    assert!(run.stdout.is_empty());
    let read = |suffix: &str| std::fs::read_to_string(dir.path().join(format!("zeta{suffix}"))).unwrap();
    let doc: Value = serde_json::from_str(&read(".json")).unwrap();
    assert_valid("exponents", &doc);
    assert!(doc.get("manifest").is_none());
    let manifest: Value = serde_json::from_str(&read(".manifest.json")).unwrap();
    assert_valid("manifest", &manifest);
    assert_eq!(manifest["artifacts"].as_array().unwrap().len(), 2);
    for artifact in manifest["artifacts"].as_array().unwrap() {
        assert!(Path::new(artifact.as_str().unwrap()).exists());
    }
    assert!(read(".csv").starts_with("quantity,value\n"));
}

#[test]
fn reruns_reproduce_outputs_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let outputs = |tag: &str, argv: &[&str]| {
        let prefix = dir.path().join(tag);
        let mut full = argv.to_vec();
        full.extend(["--out", prefix.to_str().unwrap()]);
        ok(&full);
        let read = |suffix: &str| std::fs::read(dir.path().join(format!("{tag}{suffix}"))).unwrap();
        (read(".json"), read(".csv"))
    };
    let walk = ["sim", "walk", "--tmax", "256", "--samples", "3000", "--seed", "9"];
    assert_eq!(outputs("a", &walk), outputs("b", &walk));
    let spectrum = ["spectra", "mixed", "--c", "-2", "--lambda", "0.3"];
    assert_eq!(outputs("c", &spectrum), outputs("d", &spectrum));
    let mut other = walk;
    other[7] = "10";
    assert_ne!(outputs("e", &other).1, outputs("a", &walk).1);
}

#[test]
fn walk_campaign_targets_zeta_two() {
    let doc = ok(&["sim", "walk", "--packets", "1,1", "--tmax", "4096", "--samples", "20000"]).json();
    assert_document("sim", &doc);
    assert_eq!(doc["theory"]["survival"]["theory"].as_f64(), Some(0.625));
    let measured = doc["fits"]["survival"]["exponent"].as_f64().unwrap();
    assert!((measured - 0.625).abs() < 0.1, "ζ₂ fit {measured}");
    assert_eq!(doc["manifest"]["seeds"], serde_json::json!([42]));
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walk.json");
    std::fs::write(&path, r#"{"tmax": 512, "samples": 1000, "geometry": "half-plane"}"#).unwrap();
    let doc = ok(&["sim", "walk", "--config", path.to_str().unwrap(), "--samples", "2000"]).json();
    assert_eq!(doc["parameters"]["tmax"], 512);
    assert_eq!(doc["parameters"]["samples"], 2000);
    assert_eq!(doc["parameters"]["geometry"], "half-plane");
    assert!(close(doc["theory"]["survival"]["theory"].as_f64().unwrap(), 5.0 / 3.0));

    std::fs::write(&path, r#"{"walkerz": 3}"#).unwrap();
    let run = kpzlab(&["sim", "walk", "--config", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.error()["error"]["kind"], "config");
}

#[test]
fn sle_campaign_reports_both_fits() {
    let run = ok(&["sim", "sle", "--kappa", "6", "--traces", "30", "--steps", "2048", "--threads", "1"]);
    let doc = run.json();
    assert_document("sim", &doc);
    assert_eq!(doc["theory"]["winding"]["theory"].as_f64(), Some(6.0));
    assert_eq!(doc["theory"]["dimension"]["theory"].as_f64(), Some(1.75));
    assert_eq!(doc["manifest"]["threads"], 1);
    let csv = ok(&["sim", "sle", "--kappa", "6", "--traces", "30", "--steps", "2048", "--format", "csv"]).stdout;
    assert_eq!(csv_rows(&csv)[0], ["scale", "mean_angle", "angle_variance"]);
}

#[test]
fn perc_campaign_fits_hull_and_perimeter() {
    let doc = ok(&["sim", "perc", "--side", "512", "--samples", "4"]).json();
    assert_document("sim", &doc);
    assert_eq!(doc["theory"]["hull"]["theory"].as_f64(), Some(1.75));
    assert!(close(doc["theory"]["accessible_perimeter"]["theory"].as_f64().unwrap(), 4.0 / 3.0));
    assert_eq!(doc["clusters"], 4);
}

#[test]
fn harmonic_campaign_reports_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("hm");
    ok(&["sim", "harmonic", "--side", "128", "--fields", "2", "--walkers", "5000", "--out", prefix.to_str().unwrap()]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("hm.json")).unwrap()).unwrap();
    assert_valid("sim", &doc);
    let fits = doc["fits"].as_array().unwrap();
    let two = fits.iter().find(|f| f["order"] == 2.0).unwrap();
    assert!(close(two["theory_dimension"].as_f64().unwrap(), 11.0 / 12.0));
    let residual = two["residual"].as_f64().unwrap();
    assert!(close(residual, two["dimension"].as_f64().unwrap() - 11.0 / 12.0));
    let csv = std::fs::read_to_string(dir.path().join("hm.csv")).unwrap();
    let rows = csv_rows(&csv);
    assert_eq!(rows[0], ["r", "n", "Z_n"]);
    assert_eq!(rows.len(), 1 + 5 * 11);
}

#[test]
fn verify_exact_passes() {
    let run = ok(&["verify", "exact"]);
    assert_eq!(run.stdout.lines().filter(|l| l.contains(" PASS ")).count(), 8);
    let doc = ok(&["verify", "exact", "--format", "json"]).json();
    assert_document("verify", &doc);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["report"]["criteria"].as_array().unwrap().len(), 8);
    let csv = ok(&["verify", "exact", "--format", "csv"]).stdout;
    let rows = csv_rows(&csv);
    assert_eq!(rows[0][0], "criterion");
    assert!(rows[1..].iter().all(|r| r[6] == "true"));
}

#[test]
fn verify_mc_fast_exit_code_matches_report() {
    let run = kpzlab(&["verify", "mc", "--budget", "fast", "--format", "json"]);
    let doc = run.json();
    assert_document("verify", &doc);
    assert_eq!(doc["report"]["criteria"].as_array().unwrap().len(), 7);
    let expected = if doc["passed"] == true { 0 } else { 3 };
    assert_eq!(run.code, expected);
}
