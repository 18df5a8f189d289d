//! Pairwise preferences extracted from listwise judge runs.
//!
//! A listwise run ranks `n` texts. Three judgment spaces yield pairwise
//! preferences: the intermediate pairwise verdicts emitted before the list
//! (Likert-3, a single presentation order), the decoded list order, and the
//! probability distribution over text identifiers at each rank. The same
//! operations serve runs produced with or without the intermediate pairwise
//! step; only the prompt differs.

use crate::dist::{JudgmentDistribution, JudgmentSpace};
use crate::error::{Error, Result};
use crate::extract::LogprobRecord;
use crate::pairwise::{rank_delta, PresentationOrder};
use crate::preference::{sgn, MethodId, Preference};

/// Identifier letter for slot `index` (0 -> "A").
pub fn identifier_letter(index: usize) -> String {
    char::from(b'A' + index as u8).to_string()
}

fn identifier_index(token: &str, n: usize) -> Option<usize> {
    let cleaned = token.trim().trim_matches(|c: char| ",[]".contains(c)).trim();
    let mut chars = cleaned.chars();
    let first = chars.next()?;
    if chars.next().is_some() {
        return None;
    }
    let index = (first as u32).checked_sub('A' as u32)? as usize;
    (index < n).then_some(index)
}

/// Per-rank identifier distributions plus the greedily decoded ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDistributions {
    n: usize,
    /// `probs[r][i]` is the identifier-token probability of text `i` at
    /// rank `r`, renormalized over matched identifier tokens.
    probs: Vec<Vec<f64>>,
    /// Text identifier decoded at each rank; a permutation of `0..n`.
    decoded: Vec<usize>,
}

impl RankDistributions {
    pub fn new(probs: Vec<Vec<f64>>, decoded: Vec<usize>) -> Result<Self> {
        let n = decoded.len();
        if probs.len() != n {
            return Err(Error::LengthMismatch {
                left: probs.len(),
                right: n,
            });
        }
        let mut seen = vec![false; n];
        for &id in &decoded {
            if id >= n || seen[id] {
                return Err(Error::MalformedList {
                    reason: "decoded identifiers must be a permutation".into(),
                    text: format!("{decoded:?}"),
                });
            }
            seen[id] = true;
        }
        for row in &probs {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: n,
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-6 || row.iter().any(|p| *p < 0.0) {
                return Err(Error::ProbabilitySum { sum });
            }
        }
        Ok(Self { n, probs, decoded })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn decoded(&self) -> &[usize] {
        &self.decoded
    }

    /// Rank at which text `id` was decoded.
    pub fn decoded_rank(&self, id: usize) -> Result<usize> {
        self.decoded
            .iter()
            .position(|d| *d == id)
            .ok_or(Error::IdentifierMissing { id })
    }

    /// Identifier probabilities at `rank`. With `renormalize_undecoded` the
    /// mass is rescaled over the identifiers not yet decoded before `rank`;
    /// pairwise ratios are unchanged by this because the rescaling factor is
    /// shared.
    pub fn rank_probs(&self, rank: usize, renormalize_undecoded: bool) -> Vec<f64> {
        let row = self.probs[rank].clone();
        if !renormalize_undecoded {
            return row;
        }
        let mut masked = row;
        for &prev in &self.decoded[..rank] {
            masked[prev] = 0.0;
        }
        let z: f64 = masked.iter().sum();
        if z > 0.0 {
            for p in &mut masked {
                *p /= z;
            }
        }
        masked
    }
}

/// Intermediate pairwise verdicts from a listwise run, one presentation
/// order per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermPreferences {
    entries: Vec<IntermEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntermEntry {
    /// Text presented first in the pairwise comparison.
    pub first: usize,
    /// Text presented second.
    pub second: usize,
    /// Likert-3 distribution over (first better, tie, second better).
    pub dist: JudgmentDistribution,
    /// Greedily decoded Likert value.
    pub decoded: f64,
}

impl IntermPreferences {
    pub fn new(entries: Vec<IntermEntry>) -> Result<Self> {
        for (i, a) in entries.iter().enumerate() {
            if a.first == a.second {
                return Err(Error::SelfComparison { id: a.first });
            }
            for b in entries.iter().skip(i + 1) {
                let same = (a.first == b.first && a.second == b.second)
                    || (a.first == b.second && a.second == b.first);
                if same {
                    return Err(Error::MalformedList {
                        reason: format!("pair ({}, {}) appears twice", a.first, a.second),
                        text: String::new(),
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[IntermEntry] {
        &self.entries
    }

    fn lookup(&self, i: usize, j: usize) -> Result<(&IntermEntry, bool)> {
        for entry in &self.entries {
            if entry.first == i && entry.second == j {
                return Ok((entry, false));
            }
            if entry.first == j && entry.second == i {
                return Ok((entry, true));
            }
        }
        Err(Error::MissingPair { a: i, b: j })
    }
}

/// Sign of the decoded intermediate Likert verdict for the pair `(i, j)`,
/// negated when the pair was evaluated as `(j, i)`.
pub fn interm_preference_mode(ip: &IntermPreferences, i: usize, j: usize) -> Result<Preference> {
    if i == j {
        return Err(Error::SelfComparison { id: i });
    }
    let (entry, flipped) = ip.lookup(i, j)?;
    let value = sgn(entry.decoded);
    Ok(Preference::new(
        MethodId::IntermMode,
        if flipped { -value } else { value },
    ))
}

/// Single-order normalized-mean preference from the intermediate Likert
/// distribution for the pair `(i, j)`.
pub fn interm_preference_mean(ip: &IntermPreferences, i: usize, j: usize) -> Result<Preference> {
    if i == j {
        return Err(Error::SelfComparison { id: i });
    }
    let (entry, flipped) = ip.lookup(i, j)?;
    let delta = rank_delta(&entry.dist, PresentationOrder::FirstSecond)?;
    let value = crate::pairwise::agg_mean(&delta.delta).value;
    Ok(Preference::new(
        MethodId::IntermMean,
        if flipped { -value } else { value },
    ))
}

/// +1 when text `i` is decoded at an earlier rank than text `j`.
pub fn list_mode(rd: &RankDistributions, i: usize, j: usize) -> Result<Preference> {
    if i == j {
        return Err(Error::SelfComparison { id: i });
    }
    let ri = rd.decoded_rank(i)?;
    let rj = rd.decoded_rank(j)?;
    let value = if ri < rj { 1.0 } else { -1.0 };
    Ok(Preference::new(MethodId::ListMode, value))
}

/// Rank-distribution mean preference: the average over ranks, until `i` or
/// `j` is decoded, of the identifier-mass ratio favoring `i`, mapped from
/// `[0, 1]` onto `[-1, 1]`.
///
/// Each rank contributes `(p_r(i) - p_r(j)) / (p_r(i) + p_r(j))`, which
/// equals `2 * p_r(i) / (p_r(i) + p_r(j)) - 1` and negates exactly under
/// swapping `i` and `j`. A rank with no mass on either text counts as 0.
pub fn list_mean(rd: &RankDistributions, i: usize, j: usize) -> Result<Preference> {
    if i == j {
        return Err(Error::SelfComparison { id: i });
    }
    let ri = rd.decoded_rank(i)?;
    let rj = rd.decoded_rank(j)?;
    let stop = ri.min(rj);
    let mut total = 0.0;
    for rank in 0..=stop {
        let pi = rd.probs[rank][i];
        let pj = rd.probs[rank][j];
        let denom = pi + pj;
        if denom > 0.0 {
            total += (pi - pj) / denom;
        }
    }
    let value = total / (stop + 1) as f64;
    Ok(Preference::new(MethodId::ListMean, value))
}

fn bracket_blocks(text: &str) -> Vec<(usize, &str)> {
    let mut blocks = Vec::new();
    let mut cursor = 0;
    while let Some(open) = text[cursor..].find("[[") {
        let start = cursor + open;
        match text[start + 2..].find("]]") {
            Some(close) => {
                blocks.push((start, &text[start + 2..start + 2 + close]));
                cursor = start + 2 + close + 2;
            }
            None => break,
        }
    }
    blocks
}

fn malformed(reason: impl Into<String>, rec: &LogprobRecord) -> Error {
    Error::MalformedList {
        reason: reason.into(),
        text: rec.text.clone(),
    }
}

/// Parses the final `[[A, B, ...]]` ranking from a listwise record into
/// per-rank identifier distributions.
///
/// The block must contain `n` distinct identifiers. Each slot's
/// distribution comes from the logprob position covering that identifier in
/// the greedy decode, renormalized over identifier tokens.
pub fn parse_list_output(rec: &LogprobRecord, n: usize) -> Result<RankDistributions> {
    let (concat, spans) = rec.greedy_spans();
    let blocks = bracket_blocks(&concat);
    let list_block = blocks
        .iter()
        .rev()
        .find(|(_, body)| body.split(',').count() == n)
        .ok_or_else(|| malformed(format!("no [[...]] block with {n} entries"), rec))?;

    let mut decoded = Vec::with_capacity(n);
    let mut probs = Vec::with_capacity(n);
    let block_start = list_block.0 + 2;
    let mut item_offset = 0;
    for item in list_block.1.split(',') {
        let id = identifier_index(item, n)
            .ok_or_else(|| malformed(format!("unknown identifier {item:?}"), rec))?;
        if decoded.contains(&id) {
            return Err(malformed(
                format!("identifier {} repeated", identifier_letter(id)),
                rec,
            ));
        }
        // Byte offset of the identifier character inside the concat text.
        let within = item
            .find(|c: char| c.is_ascii_uppercase())
            .expect("identifier located above");
        let offset = block_start + item_offset + within;
        let position = spans
            .iter()
            .position(|(start, end)| *start <= offset && offset < *end)
            .ok_or_else(|| malformed("identifier not covered by a logprob position", rec))?;

        let mut row = vec![0.0; n];
        let mut mass = 0.0;
        for (token, lp) in &rec.positions[position].candidates {
            if let Some(idx) = identifier_index(token, n) {
                row[idx] += lp.exp();
                mass += lp.exp();
            }
        }
        if mass <= 0.0 {
            return Err(malformed(
                format!(
                    "no identifier mass at rank {} (position {position})",
                    decoded.len() + 1
                ),
                rec,
            ));
        }
        for p in &mut row {
            *p /= mass;
        }
        decoded.push(id);
        probs.push(row);
        item_offset += item.len() + 1;
    }
    RankDistributions::new(probs, decoded)
}

/// Parses the intermediate pairwise verdict block from a listwise record,
/// aligned with the prompt's pairwise evaluation order.
///
/// A verdict is the letter of the better response or `=` for a tie; the
/// bare comparison symbols `>` and `<` are accepted as aliases for the
/// first and second letter.
pub fn parse_interm_output(
    rec: &LogprobRecord,
    pair_order: &[(usize, usize)],
) -> Result<IntermPreferences> {
    let space = JudgmentSpace::likert(3)?;
    let (concat, spans) = rec.greedy_spans();
    let blocks = bracket_blocks(&concat);
    let m = pair_order.len();
    let block = blocks
        .iter()
        .find(|(_, body)| body.split(',').count() == m)
        .ok_or_else(|| malformed(format!("no [[...]] block with {m} verdicts"), rec))?;

    let mut entries = Vec::with_capacity(m);
    let block_start = block.0 + 2;
    let mut item_offset = 0;
    for (item, (first, second)) in block.1.split(',').zip(pair_order) {
        let letter_first = identifier_letter(*first);
        let letter_second = identifier_letter(*second);
        let verdict_option = |token: &str| -> Option<usize> {
            let cleaned = token.trim().trim_matches(|c: char| ",[]".contains(c)).trim();
            match cleaned {
                ">" => Some(0),
                "=" => Some(1),
                "<" => Some(2),
                other if other == letter_first => Some(0),
                other if other == letter_second => Some(2),
                _ => None,
            }
        };
        let symbol_idx = verdict_option(item)
            .ok_or_else(|| malformed(format!("unknown verdict {item:?}"), rec))?;
        let within = item.len() - item.trim_start().len();
        let offset = block_start + item_offset + within;
        let position = spans
            .iter()
            .position(|(start, end)| *start <= offset && offset < *end)
            .ok_or_else(|| malformed("verdict not covered by a logprob position", rec))?;

        let mut mass = [0.0; 3];
        let mut total = 0.0;
        for (token, lp) in &rec.positions[position].candidates {
            if let Some(idx) = verdict_option(token) {
                mass[idx] += lp.exp();
                total += lp.exp();
            }
        }
        let dist = if total > 0.0 {
            JudgmentDistribution::new(space.clone(), mass.iter().map(|p| p / total).collect())?
        } else {
            JudgmentDistribution::point_mass(space.clone(), 1)?
        };
        entries.push(IntermEntry {
            first: *first,
            second: *second,
            dist,
            decoded: space.value(symbol_idx),
        });
        item_offset += item.len() + 1;
    }
    IntermPreferences::new(entries)
}
