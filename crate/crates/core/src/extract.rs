//! Judgment extraction from raw judge logprob records.
//!
//! A [`LogprobRecord`] holds the per-position candidate tokens returned by a
//! judge run together with the greedily decoded text. Extraction locates
//! the token position carrying the judgment (a format anchor when given,
//! otherwise the latest position with more than 0.5 total probability on
//! judgment tokens), softmaxes the matched candidates at temperature 1, and
//! renormalizes over the matched set. Probability mass falling outside the
//! candidate list is discarded; the pre-normalization matched mass is kept
//! as a diagnostic so lossy truncation is visible.
//!
//! When no position qualifies, scoring settings fall back to a point mass
//! at the minimum score and ranking settings to a tie. Likert-2 has no tie
//! option, so its tie fallback is the uniform distribution over both
//! options.
//!
//! Two-digit scores split across tokens (K = 99) are assembled from up to
//! two positions: the greedy first digit conditions the second-digit
//! distribution, other complete in-range candidates at the first position
//! keep their own mass.

use serde::{Deserialize, Serialize};

use crate::dist::{JudgmentDistribution, JudgmentSpace};
use crate::error::{Error, Result};
use crate::pairwise::PresentationOrder;

/// Probability threshold for the positional judgment-token mass rule.
pub const POSITION_MASS_THRESHOLD: f64 = 0.5;

/// Judge run settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    PointwiseScore,
    PairwiseScore,
    PairwiseRank,
    Listwise,
}

impl Setting {
    pub fn is_scoring(self) -> bool {
        matches!(self, Setting::PointwiseScore | Setting::PairwiseScore)
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::PointwiseScore => "pointwise-score",
            Setting::PairwiseScore => "pairwise-score",
            Setting::PairwiseRank => "pairwise-rank",
            Setting::Listwise => "listwise",
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Candidate tokens with log-probabilities at one output position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenPosition {
    pub candidates: Vec<(String, f64)>,
}

impl TokenPosition {
    pub fn new(candidates: Vec<(String, f64)>) -> Self {
        Self { candidates }
    }

    /// Highest-logprob candidate.
    pub fn greedy(&self) -> Option<&(String, f64)> {
        self.candidates
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite logprobs"))
    }
}

/// One judge run: per-position candidates plus the decoded text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogprobRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub setting: Setting,
    pub positions: Vec<TokenPosition>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<PresentationOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_order: Option<Vec<(String, String)>>,
}

impl LogprobRecord {
    /// Schema invariants: nonempty candidate lists with logprobs <= 0.
    pub fn validate(&self) -> Result<()> {
        for position in &self.positions {
            if position.candidates.is_empty() {
                return Err(Error::BadExtractionSpec {
                    reason: format!("record {}: empty candidate list", self.id),
                });
            }
            for (token, lp) in &position.candidates {
                if !lp.is_finite() || *lp > 0.0 {
                    return Err(Error::BadExtractionSpec {
                        reason: format!(
                            "record {}: logprob {lp} for token {token:?} is not <= 0",
                            self.id
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Byte spans of the greedy tokens, concatenated in position order.
    pub(crate) fn greedy_spans(&self) -> (String, Vec<(usize, usize)>) {
        let mut concat = String::new();
        let mut spans = Vec::with_capacity(self.positions.len());
        for position in &self.positions {
            let token = position.greedy().map(|(t, _)| t.as_str()).unwrap_or("");
            let start = concat.len();
            concat.push_str(token);
            spans.push((start, concat.len()));
        }
        (concat, spans)
    }
}

/// How to read a judgment out of a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionSpec {
    pub setting: Setting,
    /// Granularity: score count for scoring, Likert size for ranking,
    /// list length for listwise.
    pub k: usize,
    /// Text pattern marking the judgment position, e.g. `"Rating A:"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_anchor: Option<String>,
    /// Override for the Likert symbols, outermost first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likert_symbols: Option<Vec<String>>,
}

impl ExtractionSpec {
    pub fn new(setting: Setting, k: usize) -> Result<Self> {
        let spec = Self {
            setting,
            k,
            format_anchor: None,
            likert_symbols: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_anchor(mut self, anchor: impl Into<String>) -> Self {
        self.format_anchor = Some(anchor.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.setting {
            Setting::PointwiseScore | Setting::PairwiseScore => {
                if self.k < 2 || self.k > 99 {
                    return Err(Error::BadExtractionSpec {
                        reason: format!("score granularity {} outside 2..=99", self.k),
                    });
                }
            }
            Setting::PairwiseRank => {
                if !matches!(self.k, 2 | 3 | 5) {
                    return Err(Error::BadLikert { got: self.k });
                }
                if let Some(symbols) = &self.likert_symbols {
                    if symbols.len() != self.k {
                        return Err(Error::BadExtractionSpec {
                            reason: format!(
                                "{} likert symbols for granularity {}",
                                symbols.len(),
                                self.k
                            ),
                        });
                    }
                }
            }
            Setting::Listwise => {
                if self.k < 2 {
                    return Err(Error::BadExtractionSpec {
                        reason: format!("listwise length {} < 2", self.k),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<JudgmentSpace> {
        match self.setting {
            Setting::PointwiseScore | Setting::PairwiseScore => JudgmentSpace::scores(self.k),
            Setting::PairwiseRank => JudgmentSpace::likert(self.k),
            Setting::Listwise => JudgmentSpace::scores(self.k.max(2)),
        }
    }

    fn symbols(&self) -> Vec<String> {
        self.likert_symbols
            .clone()
            .unwrap_or_else(|| default_likert_symbols(self.k))
    }
}

/// Canonical Likert symbols, ordered to match the numeric value grid.
pub fn default_likert_symbols(k: usize) -> Vec<String> {
    let symbols: &[&str] = match k {
        2 => &[">", "<"],
        3 => &[">", "=", "<"],
        _ => &[">>", ">", "=", "<", "<<"],
    };
    symbols.iter().map(|s| s.to_string()).collect()
}

/// Extraction result with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub dist: JudgmentDistribution,
    /// Total candidate probability matched to judgment tokens before
    /// renormalization. Low values flag top-k truncation loss.
    pub matched_mass: f64,
    /// Position the judgment was read from, when one qualified.
    pub position: Option<usize>,
    pub used_fallback: bool,
}

fn clean_score_token(token: &str) -> &str {
    token
        .trim()
        .trim_end_matches(['.', ',', ':', ';', ')', ']'])
}

fn parse_score(token: &str, k: usize) -> Option<usize> {
    let cleaned = clean_score_token(token);
    if cleaned.is_empty() || cleaned.len() > 2 || !cleaned.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let value: usize = cleaned.parse().ok()?;
    (1..=k).contains(&value).then(|| value - 1)
}

fn clean_likert_token(token: &str) -> &str {
    let mut cleaned = token.trim();
    cleaned = cleaned.strip_prefix("[[").unwrap_or(cleaned);
    cleaned = cleaned.strip_suffix("]]").unwrap_or(cleaned);
    cleaned.trim()
}

fn parse_likert(token: &str, symbols: &[String]) -> Option<usize> {
    let cleaned = clean_likert_token(token);
    let canonical = match cleaned {
        "\u{226b}" => ">>",
        "\u{226a}" => "<<",
        other => other,
    };
    symbols.iter().position(|s| s == canonical)
}

fn match_token(token: &str, spec: &ExtractionSpec, symbols: &[String]) -> Option<usize> {
    if spec.setting.is_scoring() {
        parse_score(token, spec.k)
    } else {
        parse_likert(token, symbols)
    }
}

fn judgment_mass(position: &TokenPosition, spec: &ExtractionSpec, symbols: &[String]) -> f64 {
    position
        .candidates
        .iter()
        .filter(|(token, _)| match_token(token, spec, symbols).is_some())
        .map(|(_, lp)| lp.exp())
        .sum()
}

/// Locates the judgment token position.
///
/// With a matching format anchor, the position covering the first
/// non-whitespace character after the anchor's last occurrence. Otherwise
/// the latest position whose judgment-token candidate mass exceeds 0.5.
pub fn find_judgment_position(rec: &LogprobRecord, spec: &ExtractionSpec) -> Option<usize> {
    let symbols = spec.symbols();
    if let Some(anchor) = &spec.format_anchor {
        let (concat, spans) = rec.greedy_spans();
        if let Some(at) = concat.rfind(anchor.as_str()) {
            let after = at + anchor.len();
            if let Some(offset) = concat[after..]
                .char_indices()
                .find(|(_, c)| !c.is_whitespace())
                .map(|(i, _)| after + i)
            {
                if let Some(idx) = spans
                    .iter()
                    .position(|(start, end)| *start <= offset && offset < *end)
                {
                    return Some(idx);
                }
            }
        }
    }
    let latest = (0..rec.positions.len())
        .rev()
        .find(|idx| judgment_mass(&rec.positions[*idx], spec, &symbols) > POSITION_MASS_THRESHOLD)?;
    // A two-digit numeral split across tokens puts qualifying digit mass on
    // its second position; anchor extraction at the first digit instead.
    if latest >= 1 && two_position_digits(rec, latest - 1, spec).is_some() {
        return Some(latest - 1);
    }
    Some(latest)
}

/// Distribution used when no judgment token can be found: the minimum score
/// for scoring settings, a tie for ranking settings.
pub fn fallback_distribution(spec: &ExtractionSpec) -> Result<JudgmentDistribution> {
    let space = spec.space()?;
    if spec.setting.is_scoring() || spec.setting == Setting::Listwise {
        let min_index = space.index_of(space.min_value()).expect("grid value");
        return JudgmentDistribution::point_mass(space, min_index);
    }
    match space.index_of(0.0) {
        Some(tie) => JudgmentDistribution::point_mass(space, tie),
        None => JudgmentDistribution::uniform(space),
    }
}

fn two_position_digits(
    rec: &LogprobRecord,
    position: usize,
    spec: &ExtractionSpec,
) -> Option<usize> {
    if !spec.setting.is_scoring() || spec.k < 10 {
        return None;
    }
    let greedy = clean_score_token(&rec.positions[position].greedy()?.0);
    if greedy.len() != 1 || !greedy.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let first: usize = greedy.parse().ok()?;
    if first == 0 {
        return None;
    }
    let next = rec.positions.get(position + 1)?;
    let next_tok = clean_score_token(&next.greedy()?.0);
    let digit_len = next_tok.bytes().take_while(|b| b.is_ascii_digit()).count();
    if digit_len != 1 {
        return None;
    }
    let second: usize = next_tok[..1].parse().ok()?;
    (first * 10 + second <= spec.k).then_some(first)
}

fn score_mass_two_positions(
    rec: &LogprobRecord,
    position: usize,
    first_digit: usize,
    spec: &ExtractionSpec,
    mass: &mut [f64],
) -> f64 {
    let first_str = first_digit.to_string();
    let mut matched = 0.0;
    let mut greedy_mass = 0.0;
    for (token, lp) in &rec.positions[position].candidates {
        let cleaned = clean_score_token(token);
        if cleaned == first_str {
            greedy_mass += lp.exp();
            continue;
        }
        if let Some(option) = parse_score(cleaned, spec.k) {
            mass[option] += lp.exp();
            matched += lp.exp();
        }
    }
    // Split the greedy first digit's mass over its completions. A non-digit
    // candidate at the next position terminates the numeral at one digit.
    let mut completions: Vec<(usize, f64)> = Vec::new();
    for (token, lp) in &rec.positions[position + 1].candidates {
        let cleaned = clean_score_token(token);
        let single_digit = cleaned.len() == 1 && cleaned.bytes().all(|b| b.is_ascii_digit());
        let option = if single_digit {
            let second: usize = cleaned.parse().expect("single digit");
            let score = first_digit * 10 + second;
            (1..=spec.k).contains(&score).then(|| score - 1)
        } else {
            (first_digit >= 1 && first_digit <= spec.k).then(|| first_digit - 1)
        };
        if let Some(option) = option {
            completions.push((option, lp.exp()));
        }
    }
    let z: f64 = completions.iter().map(|(_, w)| w).sum();
    if z > 0.0 {
        for (option, w) in completions {
            mass[option] += greedy_mass * w / z;
        }
        matched += greedy_mass;
    } else if first_digit >= 1 && first_digit <= spec.k {
        mass[first_digit - 1] += greedy_mass;
        matched += greedy_mass;
    }
    matched
}

/// Full extraction with diagnostics.
pub fn extract(rec: &LogprobRecord, spec: &ExtractionSpec) -> Result<Extraction> {
    spec.validate()?;
    let symbols = spec.symbols();
    let space = spec.space()?;
    let position = find_judgment_position(rec, spec);

    let Some(position) = position else {
        return Ok(Extraction {
            dist: fallback_distribution(spec)?,
            matched_mass: 0.0,
            position: None,
            used_fallback: true,
        });
    };

    let mut mass = vec![0.0; space.len()];
    let matched = if let Some(first_digit) = two_position_digits(rec, position, spec) {
        score_mass_two_positions(rec, position, first_digit, spec, &mut mass)
    } else {
        let mut matched = 0.0;
        for (token, lp) in &rec.positions[position].candidates {
            if let Some(option) = match_token(token, spec, &symbols) {
                mass[option] += lp.exp();
                matched += lp.exp();
            }
        }
        matched
    };

    if matched <= 0.0 {
        return Ok(Extraction {
            dist: fallback_distribution(spec)?,
            matched_mass: 0.0,
            position: Some(position),
            used_fallback: true,
        });
    }
    let probs: Vec<f64> = mass.iter().map(|m| m / matched).collect();
    Ok(Extraction {
        dist: JudgmentDistribution::new(space, probs)?,
        matched_mass: matched,
        position: Some(position),
        used_fallback: false,
    })
}

/// Judgment distribution from the matched candidate tokens, renormalized at
/// softmax temperature 1.
pub fn to_distribution(rec: &LogprobRecord, spec: &ExtractionSpec) -> Result<JudgmentDistribution> {
    Ok(extract(rec, spec)?.dist)
}

fn integer_runs(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let bytes = text.as_bytes();
    let mut runs = Vec::new();
    let mut start = None;
    for (i, b) in bytes.iter().enumerate() {
        if b.is_ascii_digit() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            runs.push((s, &text[s..i]));
        }
    }
    if let Some(s) = start {
        runs.push((s, &text[s..]));
    }
    runs.into_iter()
}

fn decoded_score(text: &str, spec: &ExtractionSpec) -> Option<f64> {
    let search = if let Some(anchor) = &spec.format_anchor {
        let at = text.rfind(anchor.as_str())?;
        &text[at + anchor.len()..]
    } else {
        text
    };
    let runs: Vec<(usize, &str)> = integer_runs(search)
        .filter(|(_, run)| parse_score(run, spec.k).is_some())
        .collect();
    let chosen = if spec.format_anchor.is_some() {
        runs.first()
    } else {
        runs.last()
    }?;
    parse_score(chosen.1, spec.k).map(|option| (option + 1) as f64)
}

fn decoded_likert(text: &str, spec: &ExtractionSpec) -> Option<f64> {
    let symbols = spec.symbols();
    let space = JudgmentSpace::likert(spec.k).ok()?;
    let search = if let Some(anchor) = &spec.format_anchor {
        let at = text.rfind(anchor.as_str())?;
        &text[at + anchor.len()..]
    } else {
        text
    };
    // Bracketed verdicts first, then bare symbols, scanning from the end.
    let mut best: Option<(usize, usize)> = None;
    let mut cursor = 0;
    while let Some(open) = search[cursor..].find("[[") {
        let start = cursor + open;
        if let Some(close) = search[start..].find("]]") {
            let inner = search[start + 2..start + close].trim();
            if let Some(idx) = symbols.iter().position(|s| s == inner) {
                best = Some((start, idx));
            }
            cursor = start + close + 2;
        } else {
            break;
        }
    }
    if let Some((_, idx)) = best {
        return Some(space.value(idx));
    }
    for word in search.split_whitespace().rev() {
        if let Some(idx) = parse_likert(word, &symbols) {
            return Some(space.value(idx));
        }
    }
    None
}

/// Parses the judgment from the decoded text alone, with the same fallbacks
/// as distribution extraction: minimum score for scoring, 0 (tie) for
/// ranking.
pub fn decoded_judgment(rec: &LogprobRecord, spec: &ExtractionSpec) -> f64 {
    match spec.setting {
        Setting::PointwiseScore | Setting::PairwiseScore | Setting::Listwise => {
            decoded_score(&rec.text, spec).unwrap_or(1.0)
        }
        Setting::PairwiseRank => decoded_likert(&rec.text, spec).unwrap_or(0.0),
    }
}
