//! `compare`: records to per-method preference predictions.

use std::path::{Path, PathBuf};

use serde::Serialize;

use judgekit_core::extract::{LogprobRecord, Setting};
use judgekit_core::listwise::{self, identifier_letter};
use judgekit_core::pairwise::{aggregate_post, aggregate_pre};
use judgekit_core::record::{write_jsonl, PredictionRow};
use judgekit_core::{parallel, pointwise, MethodId};

use crate::errors::{CliError, CliResult};
use crate::manifest::{ensure_out_dir, write_manifest};
use crate::pipeline;

#[derive(Debug, Clone, Serialize)]
pub struct CompareConfig {
    pub setting: String,
    pub methods: Vec<String>,
    pub k: usize,
    pub likert: usize,
    pub agg: String,
    pub input: PathBuf,
    pub output: PathBuf,
    pub n: Option<usize>,
}

pub fn run(config: &CompareConfig) -> CliResult<()> {
    let setting = pipeline::parse_setting(&config.setting)?;
    if config.methods.is_empty() {
        return Err(CliError::Config("method list must be nonempty".into()));
    }
    let pre = match config.agg.as_str() {
        "pre" => true,
        "post" => false,
        other => {
            return Err(CliError::Config(format!(
                "unknown aggregation timing {other:?}; expected pre or post"
            )))
        }
    };
    let granularity = pipeline::resolve_granularity(setting, config.k, config.likert);

    let records: Vec<LogprobRecord> = judgekit_core::record::read_jsonl(&config.input)?;
    if records.is_empty() {
        return Err(CliError::Input(format!(
            "no records in {}",
            config.input.display()
        )));
    }
    pipeline::validate_records(&records, setting)?;
    let groups: Vec<(String, Vec<&LogprobRecord>)> =
        pipeline::group_by_instance(&records).into_iter().collect();

    let rows_per_group: Vec<CliResult<Vec<PredictionRow>>> = match setting {
        Setting::PointwiseScore => {
            let methods: Vec<MethodId> = config
                .methods
                .iter()
                .map(|m| pipeline::pointwise_method(m))
                .collect::<CliResult<_>>()?;
            let spec = pipeline::extraction_spec(setting, granularity)?;
            parallel::map(&groups, |(instance, group)| {
                let dists = pipeline::pointwise_dists(group, &spec)?;
                if dists.len() < 2 {
                    return Err(CliError::Schema(format!(
                        "instance {instance} has {} pointwise responses, need at least 2",
                        dists.len()
                    )));
                }
                let mut rows = Vec::new();
                for a in 0..dists.len() {
                    for b in (a + 1)..dists.len() {
                        let id = pipeline::pair_id(instance, dists.len(), &dists[a].0, &dists[b].0);
                        for method in &methods {
                            let pref = pointwise::compare(*method, &dists[a].1, &dists[b].1)?;
                            rows.push(PredictionRow {
                                id: id.clone(),
                                method: *method,
                                value: pref.value,
                            });
                        }
                    }
                }
                Ok(rows)
            })
        }
        Setting::PairwiseScore | Setting::PairwiseRank => {
            let methods: Vec<MethodId> = config
                .methods
                .iter()
                .map(|m| pipeline::pairwise_method(m, pre))
                .collect::<CliResult<_>>()?;
            parallel::map(&groups, |(instance, group)| {
                let (first, second) = pipeline::pairwise_judgments(group, setting, granularity)?;
                let mut rows = Vec::new();
                for method in &methods {
                    let pref = if pre {
                        aggregate_pre(*method, &first, &second)?
                    } else {
                        aggregate_post(*method, &first, &second)?
                    };
                    rows.push(PredictionRow {
                        id: instance.clone(),
                        method: *method,
                        value: pref.value,
                    });
                }
                Ok(rows)
            })
        }
        Setting::Listwise => {
            let methods: Vec<MethodId> = config
                .methods
                .iter()
                .map(|m| pipeline::listwise_method(m))
                .collect::<CliResult<_>>()?;
            let forced_n = config.n;
            parallel::map(&groups, |(instance, group)| {
                let record = group.first().expect("nonempty group");
                let n = match forced_n {
                    Some(n) => n,
                    None => pipeline::listwise_n(record)?,
                };
                let (ranks, interm) = pipeline::parse_listwise(record, n)?;
                let mut rows = Vec::new();
                for a in 0..n {
                    for b in (a + 1)..n {
                        let id = format!(
                            "{instance}:{}:{}",
                            identifier_letter(a),
                            identifier_letter(b)
                        );
                        for method in &methods {
                            let pref = match method {
                                MethodId::ListMode => listwise::list_mode(&ranks, a, b)?,
                                MethodId::ListMean => listwise::list_mean(&ranks, a, b)?,
                                MethodId::IntermMode | MethodId::IntermMean => {
                                    let ip = interm.as_ref().ok_or_else(|| {
                                        CliError::Schema(format!(
                                            "record {} has no pair_order for intermediate methods",
                                            record.id
                                        ))
                                    })?;
                                    if *method == MethodId::IntermMode {
                                        listwise::interm_preference_mode(ip, a, b)?
                                    } else {
                                        listwise::interm_preference_mean(ip, a, b)?
                                    }
                                }
                                _ => unreachable!("validated listwise method"),
                            };
                            rows.push(PredictionRow {
                                id: id.clone(),
                                method: *method,
                                value: pref.value,
                            });
                        }
                    }
                }
                Ok(rows)
            })
        }
    };

    let mut rows: Vec<PredictionRow> = Vec::new();
    for group_rows in rows_per_group {
        rows.extend(group_rows?);
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.method.name().cmp(b.method.name())));

    ensure_out_dir(&config.output)?;
    write_jsonl(config.output.join("predictions.jsonl"), &rows)?;
    write_manifest(
        &config.output,
        "compare",
        config,
        &[Path::new(&config.input)],
    )?;
    Ok(())
}
