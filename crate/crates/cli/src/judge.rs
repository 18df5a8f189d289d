//! `judge`: run the prompt templates against a live endpoint and record
//! logprobs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use judgekit_client::{EndpointConfig, JudgeClient, JudgeRequest, TemplateId};
use judgekit_core::extract::Setting;
use judgekit_core::listwise::identifier_letter;
use judgekit_core::pairwise::PresentationOrder;
use judgekit_core::record::write_jsonl;
use judgekit_core::sim::sub_rng;
use rand::Rng;

use crate::errors::{CliError, CliResult};
use crate::manifest::{ensure_out_dir, write_manifest};
use crate::pipeline;

#[derive(Debug, Clone, Serialize)]
pub struct JudgeConfig {
    pub setting: String,
    pub k: usize,
    pub likert: usize,
    pub cot: bool,
    pub model: String,
    pub input: PathBuf,
    pub output: PathBuf,
    pub endpoint_env: String,
    pub key_env: String,
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
    pub listwise_interm: bool,
    pub max_tokens: u32,
    pub top_logprobs: u32,
    pub assume_prefix_support: bool,
    pub forced_prefix: Option<String>,
}

/// One evaluation instance to judge.
#[derive(Debug, Clone, Deserialize)]
struct InstanceRow {
    id: String,
    prompt: String,
    responses: Vec<String>,
}

fn build_requests(config: &JudgeConfig, rows: &[InstanceRow]) -> CliResult<Vec<JudgeRequest>> {
    let setting = pipeline::parse_setting(&config.setting)?;
    let granularity = pipeline::resolve_granularity(setting, config.k, config.likert);
    let mut requests = Vec::new();
    for (index, row) in rows.iter().enumerate() {
        match setting {
            Setting::PointwiseScore => {
                for (r, response) in row.responses.iter().enumerate() {
                    let mut req = JudgeRequest::new(
                        format!("{}#r{}", row.id, r + 1),
                        TemplateId::PointwiseScore { cot: config.cot },
                        &config.model,
                    )
                    .field("k_max", granularity.to_string())
                    .field("user_prompt", &row.prompt)
                    .field("answer", response);
                    req.instance = Some(row.id.clone());
                    req.response = Some(r as u32 + 1);
                    requests.push(req);
                }
            }
            Setting::PairwiseScore | Setting::PairwiseRank => {
                if row.responses.len() != 2 {
                    return Err(CliError::Schema(format!(
                        "instance {} has {} responses, pairwise needs 2",
                        row.id,
                        row.responses.len()
                    )));
                }
                let template = if setting == Setting::PairwiseScore {
                    TemplateId::PairwiseScore { cot: config.cot }
                } else {
                    TemplateId::PairwiseRank {
                        likert: granularity,
                        cot: config.cot,
                    }
                };
                for order in [PresentationOrder::FirstSecond, PresentationOrder::SecondFirst] {
                    let (a, b) = match order {
                        PresentationOrder::FirstSecond => (0, 1),
                        PresentationOrder::SecondFirst => (1, 0),
                    };
                    let tag = match order {
                        PresentationOrder::FirstSecond => "12",
                        PresentationOrder::SecondFirst => "21",
                    };
                    let mut req = JudgeRequest::new(
                        format!("{}#o{}", row.id, tag),
                        template,
                        &config.model,
                    )
                    .field("user_prompt", &row.prompt)
                    .field("answer_a", &row.responses[a])
                    .field("answer_b", &row.responses[b]);
                    if setting == Setting::PairwiseScore {
                        req.fields
                            .insert("k_max".into(), granularity.to_string());
                    }
                    req.instance = Some(row.id.clone());
                    req.order = Some(order);
                    requests.push(req);
                }
            }
            Setting::Listwise => {
                let n = row.responses.len();
                if !(2..=26).contains(&n) {
                    return Err(CliError::Schema(format!(
                        "instance {} has {} responses, listwise needs 2..=26",
                        row.id, n
                    )));
                }
                let mut req = JudgeRequest::new(
                    row.id.clone(),
                    TemplateId::Listwise {
                        interm: config.listwise_interm,
                    },
                    &config.model,
                )
                .field("n", n.to_string())
                .field("conversation", &row.prompt);
                for (r, response) in row.responses.iter().enumerate() {
                    let letter = identifier_letter(r);
                    req.fields
                        .insert(format!("response_{}", letter.to_lowercase()), response.clone());
                }
                if config.listwise_interm {
                    let mut pairs: Vec<(usize, usize)> = (0..n)
                        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
                        .collect();
                    let mut rng = sub_rng(config.seed, index as u64);
                    for i in (1..pairs.len()).rev() {
                        let j = rng.random_range(0..=i);
                        pairs.swap(i, j);
                    }
                    for pair in &mut pairs {
                        if rng.random::<bool>() {
                            *pair = (pair.1, pair.0);
                        }
                    }
                    let rendered = pairs
                        .iter()
                        .map(|(a, b)| {
                            format!("({}, {})", identifier_letter(*a), identifier_letter(*b))
                        })
                        .collect::<Vec<_>>()
                        .join(", ");
                    req.fields
                        .insert("pairwise_order".into(), format!("[{rendered}]"));
                    req.pair_order = Some(
                        pairs
                            .iter()
                            .map(|(a, b)| (identifier_letter(*a), identifier_letter(*b)))
                            .collect(),
                    );
                }
                req.instance = Some(row.id.clone());
                requests.push(req);
            }
        }
    }
    for req in &mut requests {
        req.max_tokens = config.max_tokens;
        req.top_logprobs = config.top_logprobs;
        req.forced_prefix = config.forced_prefix.clone();
    }
    Ok(requests)
}

pub fn run(config: &JudgeConfig) -> CliResult<()> {
    let rows: Vec<InstanceRow> = {
        let raw: Vec<serde_json::Value> = judgekit_core::record::read_jsonl(&config.input)?;
        raw.into_iter()
            .enumerate()
            .map(|(line, value)| {
                serde_json::from_value(value).map_err(|err| {
                    CliError::Schema(format!("instance row {}: {err}", line + 1))
                })
            })
            .collect::<CliResult<_>>()?
    };
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "no instances in {}",
            config.input.display()
        )));
    }

    let mut endpoint = EndpointConfig::from_env(&config.endpoint_env, &config.key_env)
        .map_err(|err| CliError::Config(err.to_string()))?;
    endpoint.cache_dir = config.cache_dir.clone();
    endpoint.concurrency = config.workers.max(1);
    endpoint.supports_assistant_prefix = config.assume_prefix_support;

    let requests = build_requests(config, &rows)?;
    let client = JudgeClient::new(endpoint);
    let outcomes = client.fetch_many(&requests);

    let mut records = Vec::with_capacity(outcomes.len());
    for (req, outcome) in requests.iter().zip(outcomes) {
        match outcome {
            Ok(outcome) => records.push(outcome.record),
            Err(err) => {
                return Err(CliError::Input(format!(
                    "judge request {} failed: {err}",
                    req.id
                )))
            }
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));

    ensure_out_dir(&config.output)?;
    write_jsonl(config.output.join("records.jsonl"), &records)?;
    write_manifest(&config.output, "judge", config, &[config.input.as_path()])?;
    Ok(())
}
