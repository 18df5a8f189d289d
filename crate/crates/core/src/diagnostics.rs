//! Distributional diagnostics: multimodality, Wasserstein alignment,
//! granularity sensitivity, position bias, intransitivity, and annotator
//! disagreement correlation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dist::JudgmentDistribution;
use crate::error::{Error, Result};
use crate::metrics::prediction_sign;
use crate::preference::MethodId;

/// Minimum mass that must be added to make the probability sequence
/// non-decreasing then non-increasing, divided by the resulting total mass.
/// Zero exactly for unimodal distributions, always below 1.
pub fn multimodality(d: &JudgmentDistribution) -> f64 {
    let probs: Vec<f64> = d
        .space()
        .ascending_indices()
        .map(|idx| d.probs()[idx])
        .collect();
    let k = probs.len();
    if k <= 2 {
        return 0.0;
    }
    let mut prefix_max = vec![0.0; k];
    let mut prefix_fill = vec![0.0; k];
    let mut running_max = f64::NEG_INFINITY;
    let mut running_fill = 0.0;
    for i in 0..k {
        running_max = running_max.max(probs[i]);
        prefix_max[i] = running_max;
        running_fill += running_max - probs[i];
        prefix_fill[i] = running_fill;
    }
    let mut suffix_max = vec![0.0; k];
    let mut suffix_fill = vec![0.0; k];
    running_max = f64::NEG_INFINITY;
    running_fill = 0.0;
    for i in (0..k).rev() {
        running_max = running_max.max(probs[i]);
        suffix_max[i] = running_max;
        running_fill += running_max - probs[i];
        suffix_fill[i] = running_fill;
    }
    let mut best = f64::INFINITY;
    for peak in 0..k {
        let left = if peak == 0 { 0.0 } else { prefix_fill[peak - 1] };
        let right = if peak == k - 1 { 0.0 } else { suffix_fill[peak + 1] };
        let at_peak = prefix_max[peak].max(suffix_max[peak]) - probs[peak];
        best = best.min(left + right + at_peak);
    }
    best / (1.0 + best)
}

fn sorted_support(d: &JudgmentDistribution) -> Vec<(f64, f64)> {
    d.space()
        .ascending_indices()
        .map(|idx| (d.space().value(idx), d.probs()[idx]))
        .filter(|(_, p)| *p > 0.0)
        .collect()
}

/// Wasserstein distance of order `p` in {1, 2} between two distributions on
/// the real line, by exact quantile matching.
pub fn wasserstein(mu: &JudgmentDistribution, nu: &JudgmentDistribution, p: u8) -> Result<f64> {
    if p != 1 && p != 2 {
        return Err(Error::BadWassersteinOrder { got: p });
    }
    let a = sorted_support(mu);
    let b = sorted_support(nu);
    let mut total = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    let mut ra = a[0].1;
    let mut rb = b[0].1;
    loop {
        let w = ra.min(rb);
        if w > 0.0 {
            let gap = (a[i].0 - b[j].0).abs();
            total += if p == 1 { w * gap } else { w * gap * gap };
        }
        ra -= w;
        rb -= w;
        if ra <= 0.0 {
            i += 1;
            if i >= a.len() {
                break;
            }
            ra = a[i].1;
        }
        if rb <= 0.0 {
            j += 1;
            if j >= b.len() {
                break;
            }
            rb = b[j].1;
        }
    }
    Ok(if p == 1 { total } else { total.sqrt() })
}

/// Normalized flip rate between the sign vectors of a method computed at
/// two granularities, `0/0 := 0`.
pub fn flip_rate(coarse: &[f64], fine: &[f64]) -> Result<f64> {
    if coarse.len() != fine.len() {
        return Err(Error::LengthMismatch {
            left: coarse.len(),
            right: fine.len(),
        });
    }
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for (a, b) in coarse.iter().zip(fine) {
        let sa = prediction_sign(*a);
        let sb = prediction_sign(*b);
        numerator += (sa - sb).abs();
        denominator += sa.abs() + sb.abs();
    }
    Ok(if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    })
}

/// Wasserstein-1 distance between a `K = 9` distribution and the
/// coarsification of a `K = 99` distribution for the same text, both
/// rescaled to `[0, 1]`.
pub fn granularity_sensitivity(
    d9: &JudgmentDistribution,
    d99: &JudgmentDistribution,
) -> Result<f64> {
    if !d9.space().is_score_grid(9) {
        return Err(Error::WrongGranularity {
            expected: 9,
            got: d9.len(),
        });
    }
    let coarse = d99.coarsify()?;
    wasserstein(&d9.rescale_to_unit()?, &coarse.rescale_to_unit()?, 1)
}

/// Mean absolute and squared gaps between the two presentation orders'
/// judgments, both expressed in the first order's frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionBiasPair {
    pub mae: f64,
    pub mse: f64,
}

pub fn position_bias_pair(judgments: &[(f64, f64)]) -> Result<PositionBiasPair> {
    if judgments.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut abs_total = 0.0;
    let mut sq_total = 0.0;
    for (a, b) in judgments {
        let gap = a - b;
        abs_total += gap.abs();
        sq_total += gap * gap;
    }
    let n = judgments.len() as f64;
    Ok(PositionBiasPair {
        mae: abs_total / n,
        mse: sq_total / n,
    })
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|a, b| xs[*a].partial_cmp(&xs[*b]).expect("finite values"));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for slot in &order[i..=j] {
            ranks[*slot] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average-rank tie handling. `None` when
/// either input is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Ok(None);
    }
    Ok(Some((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0)))
}

/// Absolute Spearman correlation between presented-position differences and
/// judgments over listwise pairs. `None` when the correlation is undefined.
pub fn position_bias_list(pairs: &[(f64, f64)]) -> Result<Option<f64>> {
    Ok(position_bias_list_signed(pairs)?.map(f64::abs))
}

/// Signed variant retained for detail reports.
pub fn position_bias_list_signed(pairs: &[(f64, f64)]) -> Result<Option<f64>> {
    let xs: Vec<f64> = pairs.iter().map(|(d, _)| *d).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, v)| *v).collect();
    spearman(&xs, &ys)
}

/// True when some relabeling of the triple breaks transitivity: a strict
/// win followed by a non-loss must imply a strict win.
pub fn is_intransitive_triple(a12: f64, a23: f64, a13: f64) -> bool {
    let value = |i: usize, j: usize| -> f64 {
        match (i, j) {
            (0, 1) => a12,
            (1, 0) => -a12,
            (1, 2) => a23,
            (2, 1) => -a23,
            (0, 2) => a13,
            (2, 0) => -a13,
            _ => unreachable!("distinct indices"),
        }
    };
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS.iter().any(|&[i, j, k]| {
        let ij = prediction_sign(value(i, j));
        let jk = prediction_sign(value(j, k));
        let ik = prediction_sign(value(i, k));
        ij > 0.0 && jk >= 0.0 && ik <= 0.0
    })
}

/// Fraction of triples `(a12, a23, a13)` exhibiting an intransitive cycle
/// under any relabeling.
pub fn intransitivity_rate(triples: &[[f64; 3]]) -> Result<f64> {
    if triples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let flags = crate::parallel::map(triples, |t| is_intransitive_triple(t[0], t[1], t[2]));
    Ok(flags.iter().filter(|f| **f).count() as f64 / triples.len() as f64)
}

/// Intransitivity rate of a pointwise method over distribution triplets.
pub fn intransitivity_rate_method(
    method: MethodId,
    triplets: &[(JudgmentDistribution, JudgmentDistribution, JudgmentDistribution)],
) -> Result<f64> {
    if triplets.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values = crate::parallel::map(triplets, |(d1, d2, d3)| -> Result<[f64; 3]> {
        Ok([
            crate::pointwise::compare(method, d1, d2)?.value,
            crate::pointwise::compare(method, d2, d3)?.value,
            crate::pointwise::compare(method, d1, d3)?.value,
        ])
    });
    let values: Vec<[f64; 3]> = values.into_iter().collect::<Result<_>>()?;
    intransitivity_rate(&values)
}

/// Spearman correlation with a two-sided significance decision at `alpha`,
/// via the t approximation. `None` when the correlation is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub p_value: Option<f64>,
    pub significant: Option<bool>,
    pub n: usize,
}

pub fn disagreement_correlation(
    stds_human: &[f64],
    stds_model: &[f64],
    alpha: f64,
) -> Result<Option<Correlation>> {
    let n = stds_human.len();
    let Some(rho) = spearman(stds_human, stds_model)? else {
        return Ok(None);
    };
    let (p_value, significant) = if n < 3 {
        (None, None)
    } else if rho.abs() >= 1.0 {
        (Some(0.0), Some(true))
    } else {
        let t = rho * ((n - 2) as f64 / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, (n - 2) as f64).expect("valid dof");
        let p = 2.0 * (1.0 - dist.cdf(t.abs()));
        (Some(p), Some(p < alpha))
    };
    Ok(Some(Correlation {
        rho,
        p_value,
        significant,
        n,
    }))
}

/// Deterministic baselines that put probability 1 on a central tendency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralTendency {
    Mode,
    Mean,
}

pub fn central_tendency_baseline(
    d: &JudgmentDistribution,
    which: CentralTendency,
) -> Result<JudgmentDistribution> {
    let value = match which {
        CentralTendency::Mode => d.mode(),
        CentralTendency::Mean => d.mean(),
    };
    JudgmentDistribution::degenerate(value)
}

/// Alignment error between a predicted distribution and an empirical human
/// distribution, both on `[0, 1]`-rescaled values.
pub fn pluralistic_error(
    predicted: &JudgmentDistribution,
    human: &JudgmentDistribution,
    p: u8,
) -> Result<f64> {
    wasserstein(predicted, human, p)
}
