//! End-to-end tests of the binary: exit codes, file outputs, and
//! byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn propsel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propsel"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, methods: &[&str], seed: u64) -> std::path::PathBuf {
    let methods_json: Vec<String> = methods
        .iter()
        .map(|m| format!(r#"{{"name": "{m}"}}"#))
        .collect();
    let config = format!(
        r#"{{
  "dataset": {{"synthetic": {{"kind": "prop1", "questions": 3000}}}},
  "oracle": {{"behavior": "bayes_prop1"}},
  "split": {{"labeled_fraction": 0.5, "train_fraction": 0.75}},
  "methods": [{}],
  "k": 2,
  "seed": {seed},
  "repeats": 2
}}"#,
        methods_json.join(", ")
    );
    let path = dir.join("config.json");
    std::fs::write(&path, config).unwrap();
    path
}

#[test]
fn select_evaluate_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &["top_accuracy", "standard_greedy", "truth_prediction_greedy"],
        7,
    );

    let out = propsel(
        &["--config", cfg.to_str().unwrap(), "--out", "run", "select"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for m in ["top_accuracy", "standard_greedy", "truth_prediction_greedy"] {
        assert!(dir.path().join("run").join(format!("{m}.selection.json")).exists());
    }

    // greedy under the keyed oracle rediscovers the key pair; the
    // accuracy ranking picks the individually strong pair instead
    let greedy: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run/standard_greedy.selection.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(greedy["selected"], serde_json::json!([0, 1]));
    let top: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("run/top_accuracy.selection.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(top["selected"], serde_json::json!([2, 3]));

    let out = propsel(
        &["--config", cfg.to_str().unwrap(), "--out", "run", "evaluate"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("run/evaluation.json").exists());

    let out = propsel(
        &[
            "--out",
            "run",
            "--format",
            "csv",
            "report",
            "run/evaluation.json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("run/report.csv")).unwrap();
    assert!(report.starts_with("method,setting,accuracy,queries"));
    assert!(report.contains("standard_greedy"));
}

#[test]
fn select_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &["standard_greedy", "oracle_surrogate_greedy"], 3);
    for out_dir in ["a", "b"] {
        let out = propsel(
            &["--config", cfg.to_str().unwrap(), "--out", out_dir, "select"],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for m in ["standard_greedy", "oracle_surrogate_greedy"] {
        let a = std::fs::read(dir.path().join("a").join(format!("{m}.selection.json"))).unwrap();
        let b = std::fs::read(dir.path().join("b").join(format!("{m}.selection.json"))).unwrap();
        assert_eq!(a, b, "output for {m} differs between identical runs");
    }
}

#[test]
fn unknown_method_fails_with_its_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &["quantum_annealing"], 0);
    let out = propsel(
        &["--config", cfg.to_str().unwrap(), "select"],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("quantum_annealing"), "stderr: {stderr}");
}

#[test]
fn invalid_field_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(
        &path,
        r#"{
  "dataset": {"synthetic": {"kind": "prop1", "questions": 100}},
  "methods": [{"name": "top_accuracy"}],
  "split": {"labeled_fraction": 1.5, "train_fraction": 0.75}
}"#,
    )
    .unwrap();
    let out = propsel(&["--config", path.to_str().unwrap(), "select"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("labeled_fraction"), "stderr: {stderr}");
}

#[test]
fn missing_selection_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &["top_accuracy"], 0);
    let out = propsel(
        &["--config", cfg.to_str().unwrap(), "--out", "empty", "evaluate"],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing selection file"), "stderr: {stderr}");
}

#[test]
fn prop1_table_prints_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = propsel(&["prop1"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("{1,2}      1.000000     0.000000       0.100000"), "{stdout}");
    assert!(stdout.contains("{3,4}      0.800000"), "{stdout}");
    assert!(stdout.contains("accuracy_first      -> {3,4}"), "{stdout}");
    assert!(stdout.contains("mutual_information  -> {3,4}"), "{stdout}");
    // the exact max-disagreement argmax is a mixed pair on this joint
    assert!(stdout.contains("max_disagreement    -> {1,3}"), "{stdout}");
}

#[test]
fn complexity_table_matches_the_reference_scale() {
    let dir = tempfile::tempdir().unwrap();
    let out = propsel(
        &[
            "complexity",
            "--n-llm",
            "8",
            "--n-prompt",
            "5",
            "--k",
            "5",
            "--m",
            "400",
            "--z",
            "40",
            "--t-h",
            "20",
            "--t-surrogate",
            "200",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("approx_shapley             64000"), "{stdout}");
    assert!(stdout.contains("truth_prediction_greedy    0"), "{stdout}");
    assert!(stdout.contains("oracle_surrogate_greedy    1200"), "{stdout}");
    assert!(stdout.contains("model_first_greedy         16000"), "{stdout}");
}

#[test]
fn gen_writes_loadable_dataset_with_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = propsel(
        &[
            "--out",
            "data",
            "gen",
            "--kind",
            "prop1",
            "--questions",
            "200",
            "--name",
            "pool.jsonl",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let base = dir.path().join("data");
    assert!(base.join("pool.jsonl").exists());
    assert!(base.join("pool.zf.jsonl").exists());
    assert!(base.join("pool.manifest.json").exists());
    let ds = propsel::load_dataset(&base.join("pool.jsonl"), propsel::FileFormat::Jsonl).unwrap();
    assert_eq!(ds.n_proposers(), 4);
    assert_eq!(ds.n_questions(), 200);
    assert!(ds.has_key_signal());
}
