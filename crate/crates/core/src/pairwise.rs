//! Pairwise scoring and ranking with both presentation orders.
//!
//! Each judge run sees the two responses in one presentation order and
//! yields a difference distribution in the fixed frame "positive favors the
//! first response". The two orders' judgments are combined either before
//! the measure of central tendency (mixture of the difference
//! distributions) or after it (normalized sum of the per-order scalars).

use crate::dist::{DeltaDistribution, JudgmentDistribution, JudgmentSpace};
use crate::error::{Error, Result};
use crate::pointwise::normalized_mean_single;
use crate::preference::{sgn, MethodId, Preference};

/// Which response was presented first to the judge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PresentationOrder {
    /// Response 1 shown first.
    #[serde(rename = "12")]
    FirstSecond,
    /// Response 2 shown first.
    #[serde(rename = "21")]
    SecondFirst,
}

impl PresentationOrder {
    pub fn swapped(self) -> Self {
        match self {
            PresentationOrder::FirstSecond => PresentationOrder::SecondFirst,
            PresentationOrder::SecondFirst => PresentationOrder::FirstSecond,
        }
    }
}

/// A single run's difference distribution, tagged with its presentation
/// order. The delta is always expressed in the response-1-minus-response-2
/// frame regardless of order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedJudgment {
    pub order: PresentationOrder,
    pub delta: DeltaDistribution,
}

/// Difference proxy for pairwise scoring: the greedily decoded first score
/// against the conditional second-score distribution from the same run.
///
/// For order (1,2) the delta is `x1 - X2`; for order (2,1) it is `X1 - x2`.
pub fn score_delta(
    first_score: f64,
    cond_second: &JudgmentDistribution,
    order: PresentationOrder,
) -> Result<OrderedJudgment> {
    let k = cond_second.len();
    if !cond_second.space().is_score_grid(k) {
        return Err(Error::NotScoreGrid { expected: k });
    }
    if first_score.fract() != 0.0 || first_score < 1.0 || first_score > k as f64 {
        return Err(Error::ScoreOutOfRange {
            score: first_score,
            k,
        });
    }
    let mut probs = vec![0.0; 2 * k - 1];
    for (idx, p) in cond_second.probs().iter().enumerate() {
        let v = (idx + 1) as f64;
        let delta = match order {
            PresentationOrder::FirstSecond => first_score - v,
            PresentationOrder::SecondFirst => v - first_score,
        };
        probs[(delta + (k - 1) as f64) as usize] += p;
    }
    Ok(OrderedJudgment {
        order,
        delta: DeltaDistribution::from_probs(k, probs)?,
    })
}

/// Maps a Likert preference distribution onto its numeric difference grid.
/// Order (2,1) negates the values into the response-1 frame.
pub fn rank_delta(
    likert: &JudgmentDistribution,
    order: PresentationOrder,
) -> Result<OrderedJudgment> {
    let delta = DeltaDistribution::new(likert.clone())?;
    let delta = match order {
        PresentationOrder::FirstSecond => delta,
        PresentationOrder::SecondFirst => delta.reflect(),
    };
    Ok(OrderedJudgment { order, delta })
}

/// Equal-weight mixture of the two orders' difference distributions.
pub fn pre_aggregate(a: &OrderedJudgment, b: &OrderedJudgment) -> Result<DeltaDistribution> {
    if a.order == b.order {
        return Err(Error::DuplicateOrder);
    }
    let mixed = JudgmentDistribution::mixture(
        &[a.delta.as_dist().clone(), b.delta.as_dist().clone()],
        &[0.5, 0.5],
    )?;
    DeltaDistribution::new(mixed)
}

/// Sign of the mode of the aggregated difference distribution.
pub fn agg_mode(delta: &DeltaDistribution) -> Preference {
    Preference::new(MethodId::AggMode, sgn(delta.mode_value()))
}

/// Sign of the median of the aggregated difference distribution, evaluated
/// on both the distribution and its reflection and averaged so that
/// reflection negates the output exactly.
pub fn agg_medi(delta: &DeltaDistribution) -> Preference {
    let forward = sgn(delta.lower_median());
    let backward = sgn(delta.reflect().lower_median());
    Preference::new(MethodId::AggMedian, 0.5 * (forward - backward))
}

/// Single-argument normalized mean of the aggregated difference.
pub fn agg_mean(delta: &DeltaDistribution) -> Preference {
    let value = normalized_mean_single(delta.values(), delta.probs());
    Preference::new(MethodId::AggMean, value)
}

fn check_orders(a: &OrderedJudgment, b: &OrderedJudgment) -> Result<()> {
    if a.order == b.order {
        return Err(Error::DuplicateOrder);
    }
    Ok(())
}

/// Normalized sum of the per-order modes, `0/0 := 0`. When the per-order
/// magnitudes differ the value is fractional, as defined.
pub fn post_aggregate_mode(a: &OrderedJudgment, b: &OrderedJudgment) -> Result<Preference> {
    check_orders(a, b)?;
    let (ma, mb) = (a.delta.mode_value(), b.delta.mode_value());
    let denom = ma.abs() + mb.abs();
    let value = if denom == 0.0 { 0.0 } else { (ma + mb) / denom };
    Ok(Preference::new(MethodId::ModeAgg, value))
}

/// Normalized sum of the per-order medians, `0/0 := 0`.
pub fn post_aggregate_medi(a: &OrderedJudgment, b: &OrderedJudgment) -> Result<Preference> {
    check_orders(a, b)?;
    let (ma, mb) = (a.delta.median_value(), b.delta.median_value());
    let denom = ma.abs() + mb.abs();
    let value = if denom == 0.0 { 0.0 } else { (ma + mb) / denom };
    Ok(Preference::new(MethodId::MedianAgg, value))
}

/// Average of the per-order normalized means.
pub fn post_aggregate_mean(a: &OrderedJudgment, b: &OrderedJudgment) -> Result<Preference> {
    check_orders(a, b)?;
    let va = normalized_mean_single(a.delta.values(), a.delta.probs());
    let vb = normalized_mean_single(b.delta.values(), b.delta.probs());
    Ok(Preference::new(MethodId::MeanAgg, 0.5 * (va + vb)))
}

/// Pre-aggregation dispatch over the three measures of central tendency.
pub fn aggregate_pre(
    method: MethodId,
    a: &OrderedJudgment,
    b: &OrderedJudgment,
) -> Result<Preference> {
    let mixed = pre_aggregate(a, b)?;
    match method {
        MethodId::AggMode => Ok(agg_mode(&mixed)),
        MethodId::AggMedian => Ok(agg_medi(&mixed)),
        MethodId::AggMean => Ok(agg_mean(&mixed)),
        other => Err(Error::MethodSettingMismatch {
            method: other.name().to_string(),
            setting: "pairwise pre-aggregation".to_string(),
        }),
    }
}

/// Post-aggregation dispatch over the three measures of central tendency.
pub fn aggregate_post(
    method: MethodId,
    a: &OrderedJudgment,
    b: &OrderedJudgment,
) -> Result<Preference> {
    match method {
        MethodId::ModeAgg => post_aggregate_mode(a, b),
        MethodId::MedianAgg => post_aggregate_medi(a, b),
        MethodId::MeanAgg => post_aggregate_mean(a, b),
        other => Err(Error::MethodSettingMismatch {
            method: other.name().to_string(),
            setting: "pairwise post-aggregation".to_string(),
        }),
    }
}

/// Likert spaces legal for pairwise ranking.
pub fn likert_space(k: usize) -> Result<JudgmentSpace> {
    JudgmentSpace::likert(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_from(k: usize, entries: &[(f64, f64)]) -> DeltaDistribution {
        let mut probs = vec![0.0; 2 * k - 1];
        for (value, p) in entries {
            probs[(value + (k - 1) as f64) as usize] = *p;
        }
        DeltaDistribution::from_probs(k, probs).unwrap()
    }

    fn likert_dist(k: usize, probs: Vec<f64>) -> JudgmentDistribution {
        JudgmentDistribution::new(JudgmentSpace::likert(k).unwrap(), probs).unwrap()
    }

    #[test]
    fn score_delta_examples() {
        let second = JudgmentDistribution::point_mass(JudgmentSpace::scores(9).unwrap(), 3).unwrap();
        let oj = score_delta(7.0, &second, PresentationOrder::FirstSecond).unwrap();
        assert_eq!(oj.delta.mode_value(), 3.0);
        assert_eq!(oj.delta.probs()[11], 1.0);

        let oj = score_delta(7.0, &second, PresentationOrder::SecondFirst).unwrap();
        assert_eq!(oj.delta.mode_value(), -3.0);

        let mut probs = vec![0.0; 9];
        probs[5] = 0.5;
        probs[7] = 0.5;
        let second =
            JudgmentDistribution::new(JudgmentSpace::scores(9).unwrap(), probs).unwrap();
        let oj = score_delta(7.0, &second, PresentationOrder::FirstSecond).unwrap();
        let grid = oj.delta.values();
        let at = |v: f64| oj.delta.probs()[grid.iter().position(|g| *g == v).unwrap()];
        assert_eq!(at(-1.0), 0.5);
        assert_eq!(at(1.0), 0.5);
    }

    #[test]
    fn score_delta_rejects_off_grid_scores() {
        let second = JudgmentDistribution::uniform(JudgmentSpace::scores(9).unwrap()).unwrap();
        assert!(score_delta(0.0, &second, PresentationOrder::FirstSecond).is_err());
        assert!(score_delta(5.5, &second, PresentationOrder::FirstSecond).is_err());
    }

    #[test]
    fn rank_delta_examples() {
        let tie = likert_dist(3, vec![0.0, 1.0, 0.0]);
        let oj = rank_delta(&tie, PresentationOrder::FirstSecond).unwrap();
        assert_eq!(oj.delta.mode_value(), 0.0);

        let prefer_first = likert_dist(3, vec![1.0, 0.0, 0.0]);
        let oj = rank_delta(&prefer_first, PresentationOrder::SecondFirst).unwrap();
        assert_eq!(oj.delta.mode_value(), -1.0);

        let mixed = likert_dist(2, vec![0.6, 0.4]);
        let oj = rank_delta(&mixed, PresentationOrder::FirstSecond).unwrap();
        assert_eq!(oj.delta.values(), &[-1.0, 1.0]);
        assert_eq!(oj.delta.probs(), &[0.4, 0.6]);
    }

    #[test]
    fn pre_aggregate_examples() {
        let a = OrderedJudgment {
            order: PresentationOrder::FirstSecond,
            delta: delta_from(3, &[(2.0, 1.0)]),
        };
        let b = OrderedJudgment {
            order: PresentationOrder::SecondFirst,
            delta: delta_from(3, &[(-2.0, 1.0)]),
        };
        let mixed = pre_aggregate(&a, &b).unwrap();
        assert_eq!(mixed.probs(), &[0.5, 0.0, 0.0, 0.0, 0.5]);
        assert!((mixed.mean() - 0.0).abs() < 1e-12);
        assert!(pre_aggregate(&a, &a).is_err());

        let same = pre_aggregate(
            &OrderedJudgment {
                order: PresentationOrder::FirstSecond,
                delta: delta_from(3, &[(1.0, 1.0)]),
            },
            &OrderedJudgment {
                order: PresentationOrder::SecondFirst,
                delta: delta_from(3, &[(1.0, 1.0)]),
            },
        )
        .unwrap();
        assert_eq!(same.mode_value(), 1.0);
    }

    #[test]
    fn agg_examples() {
        let zero = delta_from(3, &[(0.0, 1.0)]);
        assert_eq!(agg_mode(&zero).value, 0.0);
        assert_eq!(agg_medi(&zero).value, 0.0);
        assert_eq!(agg_mean(&zero).value, 0.0);

        let split = delta_from(3, &[(2.0, 0.5), (-2.0, 0.5)]);
        assert_eq!(agg_mean(&split).value, 0.0);
        assert_eq!(agg_mode(&split).value, 0.0);

        let lean = delta_from(2, &[(1.0, 0.6), (-1.0, 0.4)]);
        let sigma = (1.0f64 - 0.04).sqrt();
        let expected = 0.2 / (1.0 + sigma);
        assert!((agg_mean(&lean).value - expected).abs() < 1e-12);
        assert!((expected - 0.101).abs() < 1e-3);
    }

    #[test]
    fn post_aggregate_examples() {
        let plus1 = OrderedJudgment {
            order: PresentationOrder::FirstSecond,
            delta: delta_from(3, &[(1.0, 1.0)]),
        };
        let minus1 = OrderedJudgment {
            order: PresentationOrder::SecondFirst,
            delta: delta_from(3, &[(-1.0, 1.0)]),
        };
        assert_eq!(post_aggregate_mode(&plus1, &minus1).unwrap().value, 0.0);

        let plus2 = OrderedJudgment {
            order: PresentationOrder::SecondFirst,
            delta: delta_from(3, &[(2.0, 1.0)]),
        };
        assert_eq!(post_aggregate_mode(&plus1, &plus2).unwrap().value, 1.0);

        let zero_a = OrderedJudgment {
            order: PresentationOrder::FirstSecond,
            delta: delta_from(3, &[(0.0, 1.0)]),
        };
        let zero_b = OrderedJudgment {
            order: PresentationOrder::SecondFirst,
            delta: delta_from(3, &[(0.0, 1.0)]),
        };
        assert_eq!(post_aggregate_mode(&zero_a, &zero_b).unwrap().value, 0.0);
        assert_eq!(post_aggregate_medi(&zero_a, &zero_b).unwrap().value, 0.0);
        assert_eq!(post_aggregate_mean(&zero_a, &zero_b).unwrap().value, 0.0);

        // Fractional when magnitudes differ, as defined.
        let minus_one = OrderedJudgment {
            order: PresentationOrder::FirstSecond,
            delta: delta_from(3, &[(-1.0, 1.0)]),
        };
        let v = post_aggregate_mode(&plus2, &minus_one).unwrap().value;
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn order_swap_negates_aggregates() {
        let d1 = delta_from(5, &[(3.0, 0.4), (-1.0, 0.35), (0.0, 0.25)]);
        let d2 = delta_from(5, &[(2.0, 0.5), (-4.0, 0.3), (1.0, 0.2)]);
        let a = OrderedJudgment {
            order: PresentationOrder::FirstSecond,
            delta: d1.clone(),
        };
        let b = OrderedJudgment {
            order: PresentationOrder::SecondFirst,
            delta: d2.clone(),
        };
        // Swapping the responses reflects both deltas and relabels orders.
        let a_swapped = OrderedJudgment {
            order: PresentationOrder::SecondFirst,
            delta: d1.reflect(),
        };
        let b_swapped = OrderedJudgment {
            order: PresentationOrder::FirstSecond,
            delta: d2.reflect(),
        };
        for method in [MethodId::AggMode, MethodId::AggMedian, MethodId::AggMean] {
            let fwd = aggregate_pre(method, &a, &b).unwrap().value;
            let bwd = aggregate_pre(method, &b_swapped, &a_swapped).unwrap().value;
            assert!((fwd + bwd).abs() < 1e-12, "{method}: {fwd} vs {bwd}");
        }
        for method in [MethodId::ModeAgg, MethodId::MedianAgg, MethodId::MeanAgg] {
            let fwd = aggregate_post(method, &a, &b).unwrap().value;
            let bwd = aggregate_post(method, &b_swapped, &a_swapped).unwrap().value;
            assert!((fwd + bwd).abs() < 1e-12, "{method}: {fwd} vs {bwd}");
        }
    }
}
