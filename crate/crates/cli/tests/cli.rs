//! End-to-end tests of the binary: exit codes, output files, determinism.

use std::path::Path;
use std::process::{Command, Output};

use attraudit::baseline::Baseline;

fn attraudit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attraudit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn linear_model_json() -> &'static str {
    r#"{"kind":"additive","components":[
        {"kind":"pwl1d","breakpoints":[0.0],"values":[0.0],"left_slope":2.0,"right_slope":2.0},
        {"kind":"pwl1d","breakpoints":[0.0],"values":[0.0],"left_slope":3.0,"right_slope":3.0}]}"#
}

#[test]
fn attribute_linear_model_prints_weighted_difference() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", linear_model_json());
    let baseline = write(
        dir.path(),
        "baseline.json",
        r#"{"variant":"pointmass","point":[0.5,0.0]}"#,
    );
    let out = attraudit(
        &[
            "--out",
            "o",
            "attribute",
            "--model",
            &model,
            "--baseline",
            &baseline,
            "--x",
            "1,1",
            "--method",
            "shap",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    // w · (x − x̄) = (2·0.5, 3·1.0).
    assert!(stdout.contains("feature 0: 1"), "{stdout}");
    assert!(stdout.contains("feature 1: 3"), "{stdout}");
    assert!(dir.path().join("o/attribution.csv").exists());
    assert!(dir.path().join("o/run.json").exists());
}

#[test]
fn gradient_ignores_the_baseline_flag() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.json", linear_model_json());
    let baseline = write(
        dir.path(),
        "baseline.json",
        r#"{"variant":"pointmass","point":[9.0,9.0]}"#,
    );
    let with = attraudit(
        &[
            "--out",
            "a",
            "attribute",
            "--model",
            &model,
            "--baseline",
            &baseline,
            "--x",
            "1,1",
            "--method",
            "gradient",
        ],
        dir.path(),
    );
    let without = attraudit(
        &[
            "--out",
            "b",
            "attribute",
            "--model",
            &model,
            "--x",
            "1,1",
            "--method",
            "gradient",
        ],
        dir.path(),
    );
    assert!(with.status.success() && without.status.success());
    let scores_only = |out: &[u8]| -> Vec<String> {
        String::from_utf8_lossy(out)
            .lines()
            .filter(|l| l.starts_with("feature"))
            .map(str::to_string)
            .collect()
    };
    assert_eq!(scores_only(&with.stdout), scores_only(&without.stdout));
    assert_eq!(
        std::fs::read(dir.path().join("a/attribution.csv")).unwrap(),
        std::fs::read(dir.path().join("b/attribution.csv")).unwrap()
    );
}

#[test]
fn malformed_model_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "broken.json", "{not json");
    let out = attraudit(
        &[
            "attribute",
            "--model",
            &model,
            "--x",
            "1",
            "--method",
            "gradient",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

fn empirical_uniform_baseline(dir: &Path) -> String {
    let continuous = Baseline::UniformBox {
        lo: vec![-1.0],
        hi: vec![1.0],
    };
    let empirical = Baseline::Empirical {
        samples: continuous.sample(77, 4000),
    };
    write(
        dir,
        "empirical.json",
        &serde_json::to_string(&empirical.to_json()).unwrap(),
    )
}

#[test]
fn forge_targets_round_trip_through_attribute() {
    let dir = tempfile::tempdir().unwrap();
    let baseline = empirical_uniform_baseline(dir.path());
    let g = r#"{"breakpoints":[-0.1,0.1,0.3],"values":[0.15,0.0,0.2],"left_slope":-1.0,"right_slope":1.0}"#;
    for (label, phi) in [("zero", "0"), ("one", "1")] {
        let out_dir = dir.path().join(label);
        let out = attraudit(
            &[
                "--out",
                out_dir.to_str().unwrap(),
                "forge",
                "--g-spec",
                g,
                "--x",
                "0.1",
                "--delta",
                "0.2",
                "--phi",
                phi,
                "--baseline",
                &baseline,
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let model_path = out_dir.join("forged.json");
        let attr = attraudit(
            &[
                "--out",
                out_dir.to_str().unwrap(),
                "attribute",
                "--model",
                model_path.to_str().unwrap(),
                "--baseline",
                &baseline,
                "--x",
                "0.1",
                "--method",
                "shap",
            ],
            dir.path(),
        );
        assert!(attr.status.success());
        let stdout = String::from_utf8(attr.stdout).unwrap();
        let score: f64 = stdout
            .lines()
            .find(|l| l.starts_with("feature 0:"))
            .and_then(|l| l.split(':').nth(1))
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        let target: f64 = phi.parse().unwrap();
        assert!((score - target).abs() < 1e-6, "phi {phi}: scored {score}");
    }
}

#[test]
fn forge_pair_reports_equal_shap_and_opposite_recourse() {
    let dir = tempfile::tempdir().unwrap();
    let baseline = empirical_uniform_baseline(dir.path());
    let g0 = r#"{"breakpoints":[0.1],"values":[0.0],"left_slope":1.0,"right_slope":1.0}"#;
    let g1 = r#"{"breakpoints":[0.1],"values":[0.0],"left_slope":-1.0,"right_slope":-1.0}"#;
    let out = attraudit(
        &[
            "--out",
            "pair",
            "forge",
            "--pair",
            "--g-spec",
            g0,
            "--g-spec1",
            g1,
            "--x",
            "0.1",
            "--delta",
            "0.2",
            "--phi",
            "0",
            "--baseline",
            &baseline,
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("recourse ground truth: 1"), "{stdout}");
    assert!(stdout.contains("recourse ground truth: 0"), "{stdout}");
    let delta_line = stdout.lines().find(|l| l.contains("|Δ|")).unwrap();
    assert!(dir.path().join("pair/forged_0.json").exists());
    assert!(dir.path().join("pair/forged_1.json").exists());
    // The reported SHAP gap is tiny.
    let gap: f64 = delta_line
        .split("|Δ| = ")
        .nth(1)
        .unwrap()
        .trim_end_matches(')')
        .parse()
        .unwrap();
    assert!(gap <= 2e-6, "{delta_line}");
}

#[test]
fn forge_with_pointmass_inside_neighbourhood_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let baseline = write(
        dir.path(),
        "pm.json",
        r#"{"variant":"pointmass","point":[0.15]}"#,
    );
    let g = r#"{"breakpoints":[0.1],"values":[0.0],"left_slope":0.0,"right_slope":0.0}"#;
    let out = attraudit(
        &[
            "forge",
            "--g-spec",
            g,
            "--x",
            "0.1",
            "--delta",
            "0.2",
            "--phi",
            "1",
            "--baseline",
            &baseline,
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("Assumption 1"), "{stderr}");
}

#[test]
fn query_test_preset_and_theoretical_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = attraudit(
        &[
            "--out",
            "q",
            "query-test",
            "--preset",
            "sec5",
            "--trials",
            "0",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("sens 0.90"), "{stdout}");
    assert!(!stdout.contains("empirical"));
    let csv = std::fs::read_to_string(dir.path().join("q/query_rates.csv")).unwrap();
    assert!(csv.lines().count() == 2);

    let bad = attraudit(&["query-test", "--epsilon", "0.9"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn prop4_estimate_in_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = attraudit(
        &[
            "--out",
            "p",
            "--format",
            "json",
            "prop4",
            "--mc-samples",
            "200000",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p/prop4.json")).unwrap())
            .unwrap();
    let estimate = value["estimate"].as_f64().unwrap();
    assert!(estimate > 0.25 && estimate < 0.5, "{estimate}");
}

#[test]
fn verify_suites_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = attraudit(&["verify", "roc"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("[PASS]"));
    let unknown = attraudit(&["verify", "nonsense"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn roc_sweep_is_deterministic_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "config.json",
        r#"{"experiment": {"n_models": 2, "n_examples": 2, "calibration_examples": 10,
             "methods": ["gradient", "lime"],
             "settings": {"ig_steps": 20, "shap_baseline_samples": 10, "shap_subset_samples": 20,
                          "smoothgrad_sigma": 0.1, "smoothgrad_samples": 10, "lime_lambda": 1.0,
                          "lime_sigma": 0.1, "lime_samples": 10, "rng_seed": 0}},
            "train": {"hidden_sizes": [4], "epochs": 3, "learning_rate": 0.05,
                      "batch_size": 16, "seed": 0, "loss": "squared_error"}}"#,
    );
    for out_dir in ["r1", "r2"] {
        let out = attraudit(
            &[
                "--out",
                out_dir,
                "--seed",
                "9",
                "roc-sweep",
                "--synthetic",
                "additive",
                "--rows",
                "80",
                "--dims",
                "2",
                "--config",
                &config,
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in [
        "synthetic_additive_gradient_recourse.csv",
        "synthetic_additive_gradient_spurious.csv",
        "synthetic_additive_lime_recourse.csv",
        "synthetic_additive_lime_spurious.csv",
    ] {
        let a = std::fs::read(dir.path().join("r1").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("r2").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    assert!(dir
        .path()
        .join("r1/synthetic_additive_recourse.svg")
        .exists());
}
