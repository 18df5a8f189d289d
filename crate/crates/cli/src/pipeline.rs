//! Shared plumbing between the compare and diagnose commands: extraction
//! spec resolution, record grouping, and per-setting ordered judgments.

use std::collections::BTreeMap;

use judgekit_core::extract::{self, ExtractionSpec, LogprobRecord, Setting};
use judgekit_core::listwise::{self, IntermPreferences, RankDistributions};
use judgekit_core::pairwise::{rank_delta, score_delta, OrderedJudgment, PresentationOrder};
use judgekit_core::sim::pair_label_id;
use judgekit_core::{JudgmentDistribution, MethodId};

use crate::errors::{CliError, CliResult};

pub const RATING_A_ANCHOR: &str = "Rating A:";
pub const RATING_B_ANCHOR: &str = "Rating B:";

pub fn parse_setting(name: &str) -> CliResult<Setting> {
    match name {
        "pointwise-score" => Ok(Setting::PointwiseScore),
        "pairwise-score" => Ok(Setting::PairwiseScore),
        "pairwise-rank" => Ok(Setting::PairwiseRank),
        "listwise" => Ok(Setting::Listwise),
        other => Err(CliError::Config(format!(
            "unknown setting {other:?}; expected pointwise-score, pairwise-score, pairwise-rank, or listwise"
        ))),
    }
}

/// Granularity for the setting: `k` for scoring, `likert` for ranking.
pub fn resolve_granularity(setting: Setting, k: usize, likert: usize) -> usize {
    match setting {
        Setting::PairwiseRank => likert,
        _ => k,
    }
}

pub fn extraction_spec(setting: Setting, granularity: usize) -> CliResult<ExtractionSpec> {
    ExtractionSpec::new(setting, granularity).map_err(CliError::from)
}

/// Groups records by instance id, falling back to the record id when no
/// instance is set. Insertion order within a group is preserved.
pub fn group_by_instance(records: &[LogprobRecord]) -> BTreeMap<String, Vec<&LogprobRecord>> {
    let mut groups: BTreeMap<String, Vec<&LogprobRecord>> = BTreeMap::new();
    for record in records {
        let key = record.instance.clone().unwrap_or_else(|| record.id.clone());
        groups.entry(key).or_default().push(record);
    }
    groups
}

pub fn validate_records(records: &[LogprobRecord], setting: Setting) -> CliResult<()> {
    for record in records {
        record.validate()?;
        if record.setting != setting {
            return Err(CliError::Schema(format!(
                "record {} has setting {}, expected {}",
                record.id, record.setting, setting
            )));
        }
    }
    Ok(())
}

/// Pointwise response distributions for one instance, ordered by response
/// index.
pub fn pointwise_dists(
    group: &[&LogprobRecord],
    spec: &ExtractionSpec,
) -> CliResult<Vec<(String, JudgmentDistribution)>> {
    let mut entries: Vec<(u32, String, JudgmentDistribution)> = Vec::with_capacity(group.len());
    for record in group {
        let response = record.response.ok_or_else(|| {
            CliError::Schema(format!("pointwise record {} lacks a response index", record.id))
        })?;
        let dist = extract::to_distribution(record, spec)?;
        entries.push((response, format!("r{response}"), dist));
    }
    entries.sort_by_key(|(r, _, _)| *r);
    Ok(entries.into_iter().map(|(_, tag, d)| (tag, d)).collect())
}

/// The two ordered judgments of a pairwise instance, `(1,2)` first.
pub fn pairwise_judgments(
    group: &[&LogprobRecord],
    setting: Setting,
    granularity: usize,
) -> CliResult<(OrderedJudgment, OrderedJudgment)> {
    let mut first = None;
    let mut second = None;
    for record in group {
        let order = record.order.ok_or_else(|| {
            CliError::Schema(format!("pairwise record {} lacks an order tag", record.id))
        })?;
        let judgment = ordered_judgment(record, setting, granularity, order)?;
        match order {
            PresentationOrder::FirstSecond => first = Some(judgment),
            PresentationOrder::SecondFirst => second = Some(judgment),
        }
    }
    match (first, second) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(CliError::Schema(
            "pairwise instance needs one record per presentation order".into(),
        )),
    }
}

fn ordered_judgment(
    record: &LogprobRecord,
    setting: Setting,
    granularity: usize,
    order: PresentationOrder,
) -> CliResult<OrderedJudgment> {
    match setting {
        Setting::PairwiseScore => {
            let spec_a = extraction_spec(setting, granularity)?.with_anchor(RATING_A_ANCHOR);
            let spec_b = extraction_spec(setting, granularity)?.with_anchor(RATING_B_ANCHOR);
            let first_score = extract::decoded_judgment(record, &spec_a);
            let cond_second = extract::to_distribution(record, &spec_b)?;
            Ok(score_delta(first_score, &cond_second, order)?)
        }
        Setting::PairwiseRank => {
            let spec = extraction_spec(setting, granularity)?;
            let likert = extract::to_distribution(record, &spec)?;
            Ok(rank_delta(&likert, order)?)
        }
        other => Err(CliError::Config(format!(
            "ordered judgments are only defined for pairwise settings, got {other}"
        ))),
    }
}

/// Number of ranked texts, inferred from the final bracketed list.
pub fn listwise_n(record: &LogprobRecord) -> CliResult<usize> {
    let close = record.text.rfind("]]").ok_or_else(|| {
        CliError::Schema(format!("record {} has no [[...]] list block", record.id))
    })?;
    let open = record.text[..close].rfind("[[").ok_or_else(|| {
        CliError::Schema(format!("record {} has no [[...]] list block", record.id))
    })?;
    Ok(record.text[open + 2..close].split(',').count())
}

pub fn parse_listwise(
    record: &LogprobRecord,
    n: usize,
) -> CliResult<(RankDistributions, Option<IntermPreferences>)> {
    let ranks = listwise::parse_list_output(record, n)?;
    let interm = match &record.pair_order {
        Some(pairs) => {
            let indices: Vec<(usize, usize)> = pairs
                .iter()
                .map(|(a, b)| {
                    let to_index = |s: &str| -> CliResult<usize> {
                        let byte = s.trim().as_bytes().first().copied().ok_or_else(|| {
                            CliError::Schema(format!("empty identifier in pair order of {}", record.id))
                        })?;
                        let idx = byte.wrapping_sub(b'A') as usize;
                        if idx >= n {
                            return Err(CliError::Schema(format!(
                                "pair-order identifier {s:?} outside the {n}-text list in {}",
                                record.id
                            )));
                        }
                        Ok(idx)
                    };
                    Ok((to_index(a)?, to_index(b)?))
                })
                .collect::<CliResult<_>>()?;
            Some(listwise::parse_interm_output(record, &indices)?)
        }
        None => None,
    };
    Ok((ranks, interm))
}

/// Maps a pairwise central-tendency token and aggregation timing onto the
/// method id.
pub fn pairwise_method(center: &str, pre: bool) -> CliResult<MethodId> {
    let id = match (center, pre) {
        ("mode", true) => MethodId::AggMode,
        ("medi", true) => MethodId::AggMedian,
        ("mean", true) => MethodId::AggMean,
        ("mode", false) => MethodId::ModeAgg,
        ("medi", false) => MethodId::MedianAgg,
        ("mean", false) => MethodId::MeanAgg,
        _ => {
            return Err(CliError::Config(format!(
                "unknown pairwise method {center:?}; expected mode, medi, or mean"
            )))
        }
    };
    Ok(id)
}

pub fn pointwise_method(token: &str) -> CliResult<MethodId> {
    match MethodId::parse(token) {
        Some(id)
            if matches!(
                id,
                MethodId::Mode
                    | MethodId::Mean
                    | MethodId::RoundedMean
                    | MethodId::Median
                    | MethodId::FirstPercentile
                    | MethodId::RiskAverseMean
                    | MethodId::Quantiles
                    | MethodId::ProbOfSuperiority
            ) =>
        {
            Ok(id)
        }
        _ => Err(CliError::Config(format!(
            "unknown pointwise method {token:?}; expected mode, mean, rmean, medi, 1p, ram, qt, or ps"
        ))),
    }
}

pub fn listwise_method(token: &str) -> CliResult<MethodId> {
    match MethodId::parse(token) {
        Some(id)
            if matches!(
                id,
                MethodId::IntermMode
                    | MethodId::IntermMean
                    | MethodId::ListMode
                    | MethodId::ListMean
            ) =>
        {
            Ok(id)
        }
        _ => Err(CliError::Config(format!(
            "unknown listwise method {token:?}; expected interm_mode, interm_mean, list_mode, or list_mean"
        ))),
    }
}

pub fn pair_id(instance: &str, total: usize, a: &str, b: &str) -> String {
    pair_label_id(instance, total, a, b)
}
