//! `evaluate`: accuracy, MSE, and tie analysis per method, shaped as one
//! report table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use judgekit_core::metrics::{self, EvalInstance};
use judgekit_core::preference::Preference;
use judgekit_core::record::{read_jsonl, LabelRow, PredictionRow};
use judgekit_core::MethodId;

use crate::errors::{CliError, CliResult};
use crate::manifest::{ensure_out_dir, write_manifest};

#[derive(Debug, Clone, Serialize)]
pub struct EvaluateConfig {
    pub predictions: PathBuf,
    pub labels: PathBuf,
    pub reference: String,
    pub output: PathBuf,
}

#[derive(Debug, Serialize)]
struct MethodReport {
    /// Mean points on the binary-label subset, absent when empty.
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<f64>,
    accuracy_n: usize,
    /// Brier-style MSE over all labeled instances.
    #[serde(skip_serializing_if = "Option::is_none")]
    mse: Option<f64>,
    mse_n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tie_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_accuracy_on_ties: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    non_tie_accuracy_delta: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EvaluateReport {
    n_labels: usize,
    n_predictions: usize,
    reference_method: String,
    methods: BTreeMap<String, MethodReport>,
}

fn is_binary(label: f64) -> bool {
    label == 0.0 || label == 1.0
}

pub fn run(config: &EvaluateConfig) -> CliResult<()> {
    let predictions: Vec<PredictionRow> = read_jsonl(&config.predictions)?;
    let labels: Vec<LabelRow> = read_jsonl(&config.labels)?;
    if predictions.is_empty() {
        return Err(CliError::Input("no predictions to evaluate".into()));
    }
    let label_by_id: BTreeMap<&str, f64> = labels
        .iter()
        .filter_map(|row| row.resolved_label().map(|l| (row.id.as_str(), l)))
        .collect();

    // Per method, instances ordered by id so tie analysis can align.
    let mut per_method: BTreeMap<MethodId, Vec<EvalInstance>> = BTreeMap::new();
    let mut matched = 0usize;
    let mut sorted: Vec<&PredictionRow> = predictions.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.method.name().cmp(b.method.name())));
    for row in sorted {
        let Some(label) = label_by_id.get(row.id.as_str()) else {
            continue;
        };
        matched += 1;
        let instance = EvalInstance::new(
            row.id.clone(),
            Preference::new(row.method, row.value),
            *label,
        )?;
        per_method.entry(row.method).or_default().push(instance);
    }
    if matched == 0 {
        return Err(CliError::Input(
            "no prediction ids matched the label file".into(),
        ));
    }

    let reference_method = MethodId::parse(&config.reference).ok_or_else(|| {
        CliError::Config(format!("unknown reference method {:?}", config.reference))
    })?;
    let reference_binary: Option<Vec<EvalInstance>> = per_method.get(&reference_method).map(
        |instances| {
            instances
                .iter()
                .filter(|inst| is_binary(inst.label))
                .cloned()
                .collect()
        },
    );

    let mut methods = BTreeMap::new();
    for (method, instances) in &per_method {
        let binary: Vec<EvalInstance> = instances
            .iter()
            .filter(|inst| is_binary(inst.label))
            .cloned()
            .collect();
        let accuracy = if binary.is_empty() {
            None
        } else {
            Some(metrics::accuracy(&binary)?)
        };
        let mse = if instances.is_empty() {
            None
        } else {
            Some(metrics::mse(instances)?)
        };
        let (tie_rate, reference_accuracy_on_ties, non_tie_accuracy_delta) =
            match (&reference_binary, binary.is_empty()) {
                (Some(reference), false) if reference.len() == binary.len() => {
                    let analysis = metrics::tie_analysis(&binary, reference)?;
                    (
                        Some(analysis.tie_rate),
                        analysis.reference_accuracy_on_ties,
                        analysis.non_tie_accuracy_delta,
                    )
                }
                _ => (None, None, None),
            };
        methods.insert(
            method.name().to_string(),
            MethodReport {
                accuracy,
                accuracy_n: binary.len(),
                mse,
                mse_n: instances.len(),
                tie_rate,
                reference_accuracy_on_ties,
                non_tie_accuracy_delta,
            },
        );
    }

    let report = EvaluateReport {
        n_labels: labels.len(),
        n_predictions: predictions.len(),
        reference_method: reference_method.name().to_string(),
        methods,
    };
    ensure_out_dir(&config.output)?;
    let text = serde_json::to_string_pretty(&report)
        .map_err(|err| CliError::Schema(format!("report serialization: {err}")))?;
    std::fs::write(config.output.join("report.json"), text)
        .map_err(|err| CliError::Input(format!("writing report: {err}")))?;
    write_manifest(
        &config.output,
        "evaluate",
        config,
        &[Path::new(&config.predictions), Path::new(&config.labels)],
    )?;
    Ok(())
}
