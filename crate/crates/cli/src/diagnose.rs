//! `diagnose`: distributional diagnostics over a run, one report section
//! per analysis. Sections appear when their inputs are available.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use judgekit_core::diagnostics::{
    self, central_tendency_baseline, CentralTendency, Correlation,
};
use judgekit_core::extract::{self, LogprobRecord, Setting};
use judgekit_core::listwise;
use judgekit_core::pairwise::agg_mean;
use judgekit_core::record::{read_jsonl, LabelRow, PredictionRow};
use judgekit_core::{JudgmentDistribution, JudgmentSpace, MethodId};

use crate::errors::{CliError, CliResult};
use crate::manifest::{ensure_out_dir, write_manifest};
use crate::pipeline;

#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseConfig {
    pub setting: String,
    pub k: usize,
    pub likert: usize,
    pub input: PathBuf,
    pub labels: Option<PathBuf>,
    /// Same run at the other score granularity, for the coarsified
    /// Wasserstein sensitivity.
    pub alt_records: Option<PathBuf>,
    pub alt_k: usize,
    /// Prediction files at two granularities, for the sign flip rate.
    pub predictions: Option<PathBuf>,
    pub alt_predictions: Option<PathBuf>,
    pub alpha: f64,
    pub output: PathBuf,
}

#[derive(Debug, Serialize)]
struct MultimodalitySection {
    mean: f64,
    max: f64,
    n: usize,
    /// Average pre-normalization mass matched to judgment tokens; low
    /// values flag top-k truncation loss.
    mean_matched_mass: f64,
}

#[derive(Debug, Serialize)]
struct PositionBiasPairSection {
    mae: f64,
    mse: f64,
    n: usize,
}

#[derive(Debug, Serialize)]
struct PositionBiasListSection {
    rho_abs: f64,
    rho_signed: f64,
    n_pairs: usize,
}

#[derive(Debug, Serialize)]
struct FlipRateSection {
    per_method: BTreeMap<String, f64>,
    n: usize,
}

#[derive(Debug, Serialize)]
struct GranularitySection {
    mean_w1: f64,
    n: usize,
}

#[derive(Debug, Serialize)]
struct IntransitivitySection {
    per_method: BTreeMap<String, f64>,
    n_triples: usize,
}

#[derive(Debug, Serialize)]
struct AlignmentPair {
    w1: f64,
    w2: f64,
}

#[derive(Debug, Serialize)]
struct AlignmentSection {
    distributional: AlignmentPair,
    baselines: BTreeMap<String, AlignmentPair>,
    n: usize,
}

#[derive(Debug, Serialize)]
struct DisagreementSection {
    rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    significant: Option<bool>,
    alpha: f64,
    n: usize,
}

#[derive(Debug, Serialize)]
struct DiagnoseReport {
    setting: String,
    n_records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    multimodality: Option<MultimodalitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position_bias_pair: Option<PositionBiasPairSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position_bias_list: Option<PositionBiasListSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flip_rate: Option<FlipRateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    granularity_sensitivity: Option<GranularitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intransitivity: Option<IntransitivitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alignment: Option<AlignmentSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disagreement_correlation: Option<DisagreementSection>,
}

/// Judgment distributions carried by one record, with matched-mass
/// diagnostics.
fn record_dists(
    record: &LogprobRecord,
    setting: Setting,
    granularity: usize,
) -> CliResult<Vec<extract::Extraction>> {
    match setting {
        Setting::PointwiseScore | Setting::PairwiseRank => {
            let spec = pipeline::extraction_spec(setting, granularity)?;
            Ok(vec![extract::extract(record, &spec)?])
        }
        Setting::PairwiseScore => {
            let spec_a = pipeline::extraction_spec(setting, granularity)?
                .with_anchor(pipeline::RATING_A_ANCHOR);
            let spec_b = pipeline::extraction_spec(setting, granularity)?
                .with_anchor(pipeline::RATING_B_ANCHOR);
            Ok(vec![
                extract::extract(record, &spec_a)?,
                extract::extract(record, &spec_b)?,
            ])
        }
        Setting::Listwise => Ok(Vec::new()),
    }
}

fn multimodality_section(
    records: &[LogprobRecord],
    setting: Setting,
    granularity: usize,
) -> CliResult<Option<MultimodalitySection>> {
    let mut values = Vec::new();
    let mut matched = Vec::new();
    for record in records {
        for extraction in record_dists(record, setting, granularity)? {
            values.push(diagnostics::multimodality(&extraction.dist));
            matched.push(extraction.matched_mass);
        }
    }
    if values.is_empty() {
        return Ok(None);
    }
    let n = values.len();
    Ok(Some(MultimodalitySection {
        mean: values.iter().sum::<f64>() / n as f64,
        max: values.iter().cloned().fold(0.0, f64::max),
        n,
        mean_matched_mass: matched.iter().sum::<f64>() / n as f64,
    }))
}

/// Win/tie/loss distribution on `[0, 1]` values `(0, 0.5, 1)` for one
/// instance, comparable against averaged human verdicts.
fn outcome_distribution(
    group: &[&LogprobRecord],
    setting: Setting,
    granularity: usize,
) -> CliResult<Option<JudgmentDistribution>> {
    let (win, tie, loss) = match setting {
        Setting::PointwiseScore => {
            let spec = pipeline::extraction_spec(setting, granularity)?;
            let dists = pipeline::pointwise_dists(group, &spec)?;
            if dists.len() != 2 {
                return Ok(None);
            }
            let (d1, d2) = (&dists[0].1, &dists[1].1);
            let mut win = 0.0;
            let mut tie = 0.0;
            let mut loss = 0.0;
            for (a, pa) in d1.space().values().iter().zip(d1.probs()) {
                for (b, pb) in d2.space().values().iter().zip(d2.probs()) {
                    let m = pa * pb;
                    if a > b {
                        win += m;
                    } else if a < b {
                        loss += m;
                    } else {
                        tie += m;
                    }
                }
            }
            (win, tie, loss)
        }
        Setting::PairwiseScore | Setting::PairwiseRank => {
            let (first, second) = pipeline::pairwise_judgments(group, setting, granularity)?;
            let mixed = judgekit_core::pairwise::pre_aggregate(&first, &second)?;
            let mut win = 0.0;
            let mut tie = 0.0;
            let mut loss = 0.0;
            for (v, p) in mixed.values().iter().zip(mixed.probs()) {
                if *v > 0.0 {
                    win += p;
                } else if *v < 0.0 {
                    loss += p;
                } else {
                    tie += p;
                }
            }
            (win, tie, loss)
        }
        Setting::Listwise => return Ok(None),
    };
    let space = JudgmentSpace::new(vec![0.0, 0.5, 1.0]).map_err(CliError::from)?;
    Ok(Some(
        JudgmentDistribution::new(space, vec![loss, tie, win]).map_err(CliError::from)?,
    ))
}

fn human_distribution(votes: &[f64]) -> CliResult<Option<JudgmentDistribution>> {
    if votes.is_empty() {
        return Ok(None);
    }
    let mut probs = [0.0f64; 3];
    for vote in votes {
        let slot = if *vote == 0.0 {
            0
        } else if *vote == 1.0 {
            2
        } else if *vote == 0.5 {
            1
        } else {
            return Ok(None);
        };
        probs[slot] += 1.0 / votes.len() as f64;
    }
    let space = JudgmentSpace::new(vec![0.0, 0.5, 1.0]).map_err(CliError::from)?;
    Ok(Some(
        JudgmentDistribution::new(space, probs.to_vec()).map_err(CliError::from)?,
    ))
}

fn vector_std(votes: &[f64]) -> f64 {
    let n = votes.len() as f64;
    let mean = votes.iter().sum::<f64>() / n;
    (votes.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

fn flip_rate_section(
    coarse_path: &Path,
    fine_path: &Path,
) -> CliResult<Option<FlipRateSection>> {
    let coarse: Vec<PredictionRow> = read_jsonl(coarse_path)?;
    let fine: Vec<PredictionRow> = read_jsonl(fine_path)?;
    let mut fine_by_key: BTreeMap<(String, MethodId), f64> = BTreeMap::new();
    for row in &fine {
        fine_by_key.insert((row.id.clone(), row.method), row.value);
    }
    let mut per_method: BTreeMap<MethodId, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in &coarse {
        if let Some(fine_value) = fine_by_key.get(&(row.id.clone(), row.method)) {
            let entry = per_method.entry(row.method).or_default();
            entry.0.push(row.value);
            entry.1.push(*fine_value);
        }
    }
    if per_method.is_empty() {
        return Ok(None);
    }
    let mut rates = BTreeMap::new();
    let mut n = 0;
    for (method, (coarse_vals, fine_vals)) in &per_method {
        n = n.max(coarse_vals.len());
        rates.insert(
            method.name().to_string(),
            diagnostics::flip_rate(coarse_vals, fine_vals)?,
        );
    }
    Ok(Some(FlipRateSection { per_method: rates, n }))
}

fn granularity_section(
    records: &[LogprobRecord],
    alt_records: &[LogprobRecord],
    k: usize,
    alt_k: usize,
) -> CliResult<Option<GranularitySection>> {
    // Orient so coarse is K = 9 and fine is K = 99.
    let ((coarse, coarse_k), (fine, fine_k)) = if k <= alt_k {
        ((records, k), (alt_records, alt_k))
    } else {
        ((alt_records, alt_k), (records, k))
    };
    if coarse_k != 9 || fine_k != 99 {
        return Err(CliError::Config(format!(
            "granularity sensitivity needs K = 9 and K = 99 runs, got {coarse_k} and {fine_k}"
        )));
    }
    let key = |r: &LogprobRecord| (r.instance.clone(), r.response);
    let coarse_spec = pipeline::extraction_spec(Setting::PointwiseScore, 9)?;
    let fine_spec = pipeline::extraction_spec(Setting::PointwiseScore, 99)?;
    let mut fine_by_key = BTreeMap::new();
    for record in fine {
        fine_by_key.insert(key(record), record);
    }
    let mut total = 0.0;
    let mut n = 0usize;
    for record in coarse {
        let Some(partner) = fine_by_key.get(&key(record)) else {
            continue;
        };
        let d9 = extract::to_distribution(record, &coarse_spec)?;
        let d99 = extract::to_distribution(partner, &fine_spec)?;
        total += diagnostics::granularity_sensitivity(&d9, &d99)?;
        n += 1;
    }
    if n == 0 {
        return Ok(None);
    }
    Ok(Some(GranularitySection {
        mean_w1: total / n as f64,
        n,
    }))
}

pub fn run(config: &DiagnoseConfig) -> CliResult<()> {
    let setting = pipeline::parse_setting(&config.setting)?;
    let granularity = pipeline::resolve_granularity(setting, config.k, config.likert);
    let records: Vec<LogprobRecord> = read_jsonl(&config.input)?;
    if records.is_empty() {
        return Err(CliError::Input(format!(
            "no records in {}",
            config.input.display()
        )));
    }
    pipeline::validate_records(&records, setting)?;
    let groups = pipeline::group_by_instance(&records);

    let multimodality = multimodality_section(&records, setting, granularity)?;

    let mut position_bias_pair = None;
    let mut position_bias_list = None;
    let mut intransitivity = None;

    match setting {
        Setting::PairwiseScore | Setting::PairwiseRank => {
            let mut per_order = Vec::new();
            for group in groups.values() {
                let (first, second) = pipeline::pairwise_judgments(group, setting, granularity)?;
                per_order.push((agg_mean(&first.delta).value, agg_mean(&second.delta).value));
            }
            if !per_order.is_empty() {
                let bias = diagnostics::position_bias_pair(&per_order)?;
                position_bias_pair = Some(PositionBiasPairSection {
                    mae: bias.mae,
                    mse: bias.mse,
                    n: per_order.len(),
                });
            }
        }
        Setting::Listwise => {
            let mut pairs = Vec::new();
            let mut triples = Vec::new();
            for group in groups.values() {
                let record = group.first().expect("nonempty group");
                let n = pipeline::listwise_n(record)?;
                let (ranks, _) = pipeline::parse_listwise(record, n)?;
                let mut value = vec![vec![0.0; n]; n];
                for (i, row) in value.iter_mut().enumerate() {
                    for (j, cell) in row.iter_mut().enumerate() {
                        if i != j {
                            *cell = listwise::list_mean(&ranks, i, j)?.value;
                        }
                    }
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        pairs.push((i as f64 - j as f64, value[i][j]));
                        for k in (j + 1)..n {
                            triples.push([value[i][j], value[j][k], value[i][k]]);
                        }
                    }
                }
            }
            if pairs.len() >= 2 {
                let signed = diagnostics::position_bias_list_signed(&pairs)?;
                if let Some(rho) = signed {
                    position_bias_list = Some(PositionBiasListSection {
                        rho_abs: rho.abs(),
                        rho_signed: rho,
                        n_pairs: pairs.len(),
                    });
                }
            }
            if !triples.is_empty() {
                let mut per_method = BTreeMap::new();
                per_method.insert(
                    MethodId::ListMean.name().to_string(),
                    diagnostics::intransitivity_rate(&triples)?,
                );
                intransitivity = Some(IntransitivitySection {
                    per_method,
                    n_triples: triples.len(),
                });
            }
        }
        Setting::PointwiseScore => {
            // Triplets exist when instances carry three or more responses.
            let spec = pipeline::extraction_spec(setting, granularity)?;
            let mut triplets = Vec::new();
            for group in groups.values() {
                let dists = pipeline::pointwise_dists(group, &spec)?;
                for a in 0..dists.len() {
                    for b in (a + 1)..dists.len() {
                        for c in (b + 1)..dists.len() {
                            triplets.push((
                                dists[a].1.clone(),
                                dists[b].1.clone(),
                                dists[c].1.clone(),
                            ));
                        }
                    }
                }
            }
            if !triplets.is_empty() {
                let mut per_method = BTreeMap::new();
                for method in [MethodId::Mean, MethodId::ProbOfSuperiority] {
                    per_method.insert(
                        method.name().to_string(),
                        diagnostics::intransitivity_rate_method(method, &triplets)?,
                    );
                }
                intransitivity = Some(IntransitivitySection {
                    per_method,
                    n_triples: triplets.len(),
                });
            }
        }
    }

    let mut alignment = None;
    let mut disagreement = None;
    if let Some(labels_path) = &config.labels {
        let labels: Vec<LabelRow> = read_jsonl(labels_path)?;
        let votes_by_id: BTreeMap<&str, &Vec<f64>> = labels
            .iter()
            .filter_map(|row| row.human_judgments.as_ref().map(|v| (row.id.as_str(), v)))
            .collect();
        let mut w1_model = Vec::new();
        let mut w2_model = Vec::new();
        let mut baseline_errors: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        let mut human_stds = Vec::new();
        let mut model_stds = Vec::new();
        for (instance, group) in &groups {
            let Some(votes) = votes_by_id.get(instance.as_str()) else {
                continue;
            };
            let Some(human) = human_distribution(votes)? else {
                continue;
            };
            let Some(model) = outcome_distribution(group, setting, granularity)? else {
                continue;
            };
            w1_model.push(diagnostics::pluralistic_error(&model, &human, 1)?);
            w2_model.push(diagnostics::pluralistic_error(&model, &human, 2)?);
            for (name, which) in [
                ("mode", CentralTendency::Mode),
                ("mean", CentralTendency::Mean),
            ] {
                let baseline = central_tendency_baseline(&model, which)?;
                let entry = baseline_errors.entry(name).or_default();
                entry.0.push(diagnostics::pluralistic_error(&baseline, &human, 1)?);
                entry.1.push(diagnostics::pluralistic_error(&baseline, &human, 2)?);
            }
            human_stds.push(vector_std(votes));
            model_stds.push(model.std());
        }
        if !w1_model.is_empty() {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let baselines = baseline_errors
                .into_iter()
                .map(|(name, (w1, w2))| {
                    (
                        name.to_string(),
                        AlignmentPair {
                            w1: mean(&w1),
                            w2: mean(&w2),
                        },
                    )
                })
                .collect();
            alignment = Some(AlignmentSection {
                distributional: AlignmentPair {
                    w1: mean(&w1_model),
                    w2: mean(&w2_model),
                },
                baselines,
                n: w1_model.len(),
            });
        }
        if human_stds.len() >= 2 {
            if let Some(Correlation {
                rho,
                p_value,
                significant,
                n,
            }) = diagnostics::disagreement_correlation(&human_stds, &model_stds, config.alpha)?
            {
                disagreement = Some(DisagreementSection {
                    rho,
                    p_value,
                    significant,
                    alpha: config.alpha,
                    n,
                });
            }
        }
    }

    let flip_rate = match (&config.predictions, &config.alt_predictions) {
        (Some(coarse), Some(fine)) => flip_rate_section(coarse, fine)?,
        _ => None,
    };
    let granularity_sensitivity = match &config.alt_records {
        Some(alt_path) if setting == Setting::PointwiseScore => {
            let alt: Vec<LogprobRecord> = read_jsonl(alt_path)?;
            granularity_section(&records, &alt, granularity, config.alt_k)?
        }
        _ => None,
    };

    let report = DiagnoseReport {
        setting: setting.name().to_string(),
        n_records: records.len(),
        multimodality,
        position_bias_pair,
        position_bias_list,
        flip_rate,
        granularity_sensitivity,
        intransitivity,
        alignment,
        disagreement_correlation: disagreement,
    };
    ensure_out_dir(&config.output)?;
    let text = serde_json::to_string_pretty(&report)
        .map_err(|err| CliError::Schema(format!("report serialization: {err}")))?;
    std::fs::write(config.output.join("diagnostics.json"), text)
        .map_err(|err| CliError::Input(format!("writing diagnostics: {err}")))?;

    let mut inputs: Vec<&Path> = vec![&config.input];
    if let Some(p) = &config.labels {
        inputs.push(p);
    }
    if let Some(p) = &config.alt_records {
        inputs.push(p);
    }
    if let Some(p) = &config.predictions {
        inputs.push(p);
    }
    if let Some(p) = &config.alt_predictions {
        inputs.push(p);
    }
    write_manifest(&config.output, "diagnose", config, &inputs)?;
    Ok(())
}
