//! Command-line behavior: frozen fixtures, exit codes, output schemas.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_judgekit")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("spawn judgekit")
}

#[test]
fn compare_reproduces_frozen_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let records = fixture("pointwise20/records.jsonl");
    let status = run(&[
        "compare",
        "--setting",
        "pointwise-score",
        "--k",
        "9",
        "--input",
        records.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let produced = std::fs::read(out.join("predictions.jsonl")).unwrap();
    let golden = std::fs::read(fixture("pointwise20/predictions.golden.jsonl")).unwrap();
    assert_eq!(produced, golden, "predictions diverge from the frozen fixture");
}

#[test]
fn evaluate_gives_identical_accuracy_when_all_methods_agree() {
    // Point-mass distributions make every method produce the same sign,
    // so every accuracy must match.
    use judgekit_core::extract::{LogprobRecord, Setting, TokenPosition};
    use judgekit_core::record::LabelRow;

    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let cmp = dir.path().join("cmp");
    let eval = dir.path().join("eval");
    std::fs::create_dir_all(&sim).unwrap();

    let mut records = Vec::new();
    let mut labels = Vec::new();
    for i in 0..30usize {
        let a = (i * 3) % 9 + 1;
        let b = (i * 5) % 9 + 1;
        let instance = format!("i{i:03}");
        for (slot, score) in [(1u32, a), (2u32, b)] {
            records.push(LogprobRecord {
                id: format!("{instance}#r{slot}"),
                instance: Some(instance.clone()),
                setting: Setting::PointwiseScore,
                positions: vec![TokenPosition::new(vec![(score.to_string(), 0.0)])],
                text: score.to_string(),
                order: None,
                response: Some(slot),
                pair_order: None,
            });
        }
        labels.push(LabelRow {
            id: instance,
            label: Some(if a >= b { 1.0 } else { 0.0 }),
            human_judgments: None,
        });
    }
    judgekit_core::record::write_jsonl(sim.join("records.jsonl"), &records).unwrap();
    judgekit_core::record::write_jsonl(sim.join("labels.jsonl"), &labels).unwrap();

    assert!(run(&[
        "compare",
        "--setting",
        "pointwise-score",
        "--k",
        "9",
        "--input",
        sim.join("records.jsonl").to_str().unwrap(),
        "--output",
        cmp.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(run(&[
        "evaluate",
        "--predictions",
        cmp.join("predictions.jsonl").to_str().unwrap(),
        "--labels",
        sim.join("labels.jsonl").to_str().unwrap(),
        "--output",
        eval.to_str().unwrap(),
    ])
    .status
    .success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval.join("report.json")).unwrap()).unwrap();
    let methods = report["methods"].as_object().unwrap();
    assert_eq!(methods.len(), 8);
    let accuracies: Vec<f64> = methods
        .values()
        .map(|m| m["accuracy"].as_f64().unwrap())
        .collect();
    for accuracy in &accuracies {
        assert_eq!(
            *accuracy, accuracies[0],
            "methods disagree on near-deterministic distributions: {accuracies:?}"
        );
    }
}

#[test]
fn diagnose_zero_bias_position_mae_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let diag = dir.path().join("diag");
    assert!(run(&[
        "simulate",
        "--setting",
        "pairwise-rank",
        "--likert",
        "3",
        "-n",
        "1000",
        "--seed",
        "11",
        "--position-bias",
        "0.0",
        "--order-noise",
        "0.05",
        "--output",
        sim.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(run(&[
        "diagnose",
        "--setting",
        "pairwise-rank",
        "--likert",
        "3",
        "--input",
        sim.join("records.jsonl").to_str().unwrap(),
        "--output",
        diag.to_str().unwrap(),
    ])
    .status
    .success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(diag.join("diagnostics.json")).unwrap())
            .unwrap();
    let mae = report["position_bias_pair"]["mae"].as_f64().unwrap();
    assert!(mae < 0.02, "zero-bias MAE {mae} not small");
    assert_eq!(report["position_bias_pair"]["n"].as_u64(), Some(1000));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    // Config error: unknown setting.
    let bad_setting = run(&[
        "compare",
        "--setting",
        "sideways",
        "--input",
        "nowhere.jsonl",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad_setting.status.code(), Some(2));

    // Config error: invalid likert size.
    let records = fixture("pointwise20/records.jsonl");
    let bad_likert = run(&[
        "simulate",
        "--setting",
        "pairwise-rank",
        "--likert",
        "4",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(bad_likert.status.code(), Some(2));

    // Input error: missing file.
    let missing = run(&[
        "compare",
        "--setting",
        "pointwise-score",
        "--input",
        "no-such-file.jsonl",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(3));

    // Schema error: malformed records.
    let broken = dir.path().join("broken.jsonl");
    std::fs::write(&broken, "{\"id\": \"x\"}\n").unwrap();
    let schema = run(&[
        "compare",
        "--setting",
        "pointwise-score",
        "--input",
        broken.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(schema.status.code(), Some(4));

    // Schema error: records from the wrong setting.
    let wrong_setting = run(&[
        "compare",
        "--setting",
        "pairwise-rank",
        "--input",
        records.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(wrong_setting.status.code(), Some(4));

    // Usage errors from the argument parser also exit 2.
    let usage = run(&["compare"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn manifests_record_config_and_input_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let records = fixture("pointwise20/records.jsonl");
    assert!(run(&[
        "compare",
        "--setting",
        "pointwise-score",
        "--k",
        "9",
        "--input",
        records.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ])
    .status
    .success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "compare");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    let hashes = manifest["input_hashes"].as_object().unwrap();
    assert_eq!(hashes.len(), 1);
    for value in hashes.values() {
        assert_eq!(value.as_str().unwrap().len(), 64);
    }
}

#[test]
fn record_jsonl_schema_is_locked() {
    // The documented wire schema: candidates as [token, logprob] arrays.
    let line = r#"{"id":"r1","setting":"pointwise-score","positions":[{"candidates":[["5",-0.1],["6",-2.4]]}],"text":"5"}"#;
    let record: judgekit_core::LogprobRecord = serde_json::from_str(line).unwrap();
    assert_eq!(serde_json::to_string(&record).unwrap(), line);

    let labels = r#"{"id":"i0","label":1.0,"human_judgments":[1.0,0.0,1.0]}"#;
    let label: judgekit_core::record::LabelRow = serde_json::from_str(labels).unwrap();
    assert_eq!(label.resolved_label(), Some(1.0));

    let prediction = r#"{"id":"i0","method":"ram","value":-0.25}"#;
    let row: judgekit_core::record::PredictionRow = serde_json::from_str(prediction).unwrap();
    assert_eq!(row.method, judgekit_core::MethodId::RiskAverseMean);
    assert_eq!(serde_json::to_string(&row).unwrap(), prediction);
}

#[test]
fn diagnose_report_schema_sections() {
    // Pointwise with labels, annotators, and a K=99 partner run: the
    // report carries multimodality, granularity, flip rate, alignment, and
    // disagreement sections.
    let dir = tempfile::tempdir().unwrap();
    let sim9 = dir.path().join("sim9");
    let sim99 = dir.path().join("sim99");
    let cmp9 = dir.path().join("cmp9");
    let cmp99 = dir.path().join("cmp99");
    let diag = dir.path().join("diag");
    for (k, out) in [("9", &sim9), ("99", &sim99)] {
        assert!(run(&[
            "simulate",
            "--setting",
            "pointwise-score",
            "--k",
            k,
            "-n",
            "80",
            "--seed",
            "5",
            "--annotators",
            "4",
            "--output",
            out.to_str().unwrap(),
        ])
        .status
        .success());
    }
    for (k, sim, out) in [("9", &sim9, &cmp9), ("99", &sim99, &cmp99)] {
        assert!(run(&[
            "compare",
            "--setting",
            "pointwise-score",
            "--k",
            k,
            "--input",
            sim.join("records.jsonl").to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .status
        .success());
    }
    assert!(run(&[
        "diagnose",
        "--setting",
        "pointwise-score",
        "--k",
        "9",
        "--input",
        sim9.join("records.jsonl").to_str().unwrap(),
        "--labels",
        sim9.join("labels.jsonl").to_str().unwrap(),
        "--alt-records",
        sim99.join("records.jsonl").to_str().unwrap(),
        "--alt-k",
        "99",
        "--predictions",
        cmp9.join("predictions.jsonl").to_str().unwrap(),
        "--alt-predictions",
        cmp99.join("predictions.jsonl").to_str().unwrap(),
        "--output",
        diag.to_str().unwrap(),
    ])
    .status
    .success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(diag.join("diagnostics.json")).unwrap())
            .unwrap();
    assert_eq!(report["setting"], "pointwise-score");
    assert!(report["multimodality"]["mean"].is_f64());
    assert!(report["multimodality"]["mean_matched_mass"].is_f64());
    assert!(report["granularity_sensitivity"]["mean_w1"].is_f64());
    let flip = report["flip_rate"]["per_method"].as_object().unwrap();
    assert_eq!(flip.len(), 8);
    for value in flip.values() {
        let rate = value.as_f64().unwrap();
        assert!((0.0..=1.0).contains(&rate));
    }
    assert!(report["alignment"]["distributional"]["w1"].is_f64());
    assert!(report["alignment"]["baselines"]["mode"]["w2"].is_f64());
    assert!(report["disagreement_correlation"]["rho"].is_f64());
    // Listwise-only sections stay absent for pointwise runs.
    assert!(report.get("position_bias_list").is_none());
}

#[test]
fn pairwise_score_pipeline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let cmp_pre = dir.path().join("pre");
    let cmp_post = dir.path().join("post");
    assert!(run(&[
        "simulate",
        "--setting",
        "pairwise-score",
        "--k",
        "9",
        "-n",
        "40",
        "--seed",
        "17",
        "--output",
        sim.to_str().unwrap(),
    ])
    .status
    .success());
    for (agg, out) in [("pre", &cmp_pre), ("post", &cmp_post)] {
        assert!(run(&[
            "compare",
            "--setting",
            "pairwise-score",
            "--k",
            "9",
            "--agg",
            agg,
            "--input",
            sim.join("records.jsonl").to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ])
        .status
        .success());
    }
    let pre = std::fs::read_to_string(cmp_pre.join("predictions.jsonl")).unwrap();
    let post = std::fs::read_to_string(cmp_post.join("predictions.jsonl")).unwrap();
    assert!(pre.contains("\"agg_mean\""));
    assert!(post.contains("\"mean_agg\""));
    assert_eq!(pre.lines().count(), 120);
    assert_eq!(post.lines().count(), 120);
}
