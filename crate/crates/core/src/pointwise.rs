//! The eight methods for comparing two score distributions.
//!
//! Every method maps a pair of distributions on a shared judgment space to a
//! [`Preference`] in `[-1, 1]`, positive when the first distribution is
//! preferred. Discrete methods compare per-distribution statistics with the
//! sign function; continuous methods use the normalized mean difference, its
//! risk-averse variant, the quantile-comparison integral, or the probability
//! of superiority. Independence between the two score variables is assumed
//! where a joint distribution is needed (mean, ram, ps).

use crate::dist::JudgmentDistribution;
use crate::error::{Error, Result};
use crate::preference::{sgn, MethodId, Preference};

fn check_same_space(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<()> {
    if d1.space() != d2.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

fn moments(values: &[f64], probs: &[f64]) -> (f64, f64) {
    let mean: f64 = values.iter().zip(probs).map(|(v, p)| v * p).sum();
    let var: f64 = values
        .iter()
        .zip(probs)
        .map(|(v, p)| p * (v - mean) * (v - mean))
        .sum::<f64>()
        .max(0.0);
    (mean, var)
}

fn expected_abs_diff(v1: &[f64], p1: &[f64], v2: &[f64], p2: &[f64]) -> f64 {
    let mut total = 0.0;
    for (a, pa) in v1.iter().zip(p1) {
        for (b, pb) in v2.iter().zip(p2) {
            total += pa * pb * (a - b).abs();
        }
    }
    total
}

/// `E(X1-X2) / (E|X1-X2| + sigma(X1-X2))` with `0/0 := 0`, over explicit
/// value grids so the risk-averse variant can shift values off-grid.
pub(crate) fn normalized_mean_diff(v1: &[f64], p1: &[f64], v2: &[f64], p2: &[f64]) -> f64 {
    let (m1, var1) = moments(v1, p1);
    let (m2, var2) = moments(v2, p2);
    let denom = expected_abs_diff(v1, p1, v2, p2) + (var1 + var2).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (m1 - m2) / denom
    }
}

/// Single-argument form over a difference variable: `EX / (E|X| + sigma(X))`
/// with `0/0 := 0`.
pub(crate) fn normalized_mean_single(values: &[f64], probs: &[f64]) -> f64 {
    let (mean, var) = moments(values, probs);
    let eabs: f64 = values.iter().zip(probs).map(|(v, p)| p * v.abs()).sum();
    let denom = eabs + var.sqrt();
    if denom == 0.0 {
        0.0
    } else {
        mean / denom
    }
}

/// Sign of the mode difference.
pub fn cmp_mode(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    Ok(Preference::new(MethodId::Mode, sgn(d1.mode() - d2.mode())))
}

/// Normalized mean difference under independence.
pub fn cmp_mean(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let value = normalized_mean_diff(
        d1.space().values(),
        d1.probs(),
        d2.space().values(),
        d2.probs(),
    );
    Ok(Preference::new(MethodId::Mean, value))
}

fn nearest_grid_value(d: &JudgmentDistribution) -> f64 {
    let mean = d.mean();
    let mut best = f64::NAN;
    let mut best_gap = f64::INFINITY;
    for idx in d.space().ascending_indices() {
        let v = d.space().value(idx);
        let gap = (mean - v).abs();
        if gap < best_gap {
            best_gap = gap;
            best = v;
        }
    }
    best
}

/// Sign of the difference of grid-rounded means. Equidistant ties round to
/// the lower value, matching the mode tie-break.
pub fn cmp_rounded_mean(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let value = sgn(nearest_grid_value(d1) - nearest_grid_value(d2));
    Ok(Preference::new(MethodId::RoundedMean, value))
}

/// Sign of the median difference.
pub fn cmp_median(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let value = sgn(d1.quantile(0.5)? - d2.quantile(0.5)?);
    Ok(Preference::new(MethodId::Median, value))
}

/// Sign of the 1st-percentile difference, a risk-averse discrete method.
pub fn cmp_1p(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let value = sgn(d1.quantile(0.01)? - d2.quantile(0.01)?);
    Ok(Preference::new(MethodId::FirstPercentile, value))
}

/// Normalized mean difference after shifting each value grid down by that
/// distribution's lower semi-deviation. Probabilities are untouched.
pub fn cmp_ram(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let s1 = d1.lower_semi_deviation();
    let s2 = d2.lower_semi_deviation();
    let v1: Vec<f64> = d1.space().values().iter().map(|v| v - s1).collect();
    let v2: Vec<f64> = d2.space().values().iter().map(|v| v - s2).collect();
    let value = normalized_mean_diff(&v1, d1.probs(), &v2, d2.probs());
    Ok(Preference::new(MethodId::RiskAverseMean, value))
}

/// Integral over quantile levels of the sign of the quantile difference.
///
/// The integrand is piecewise constant between the CDF breakpoints of the
/// two distributions, so the integral is evaluated exactly as a finite sum
/// of interval length times sign at the interval midpoint.
pub fn cmp_qt(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let mut cuts = Vec::with_capacity(d1.len() + d2.len());
    cuts.push(0.0);
    cuts.extend(d1.interior_cdf_levels());
    cuts.extend(d2.interior_cdf_levels());
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    cuts.retain(|c| (0.0..=1.0).contains(c));

    // Largest level strictly inside (0, 1); midpoints of slivers touching
    // an endpoint can otherwise round onto it.
    let top = 1.0 - f64::EPSILON / 2.0;
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi <= lo {
            continue;
        }
        let mid = (0.5 * (lo + hi)).clamp(f64::MIN_POSITIVE, top);
        let q1 = d1.quantile(mid)?;
        let q2 = d2.quantile(mid)?;
        total += (hi - lo) * sgn(q1 - q2);
    }
    Ok(Preference::new(MethodId::Quantiles, total.clamp(-1.0, 1.0)))
}

/// `P(X1 > X2) - P(X1 < X2)` under independence, by exact double sum.
pub fn cmp_ps(d1: &JudgmentDistribution, d2: &JudgmentDistribution) -> Result<Preference> {
    check_same_space(d1, d2)?;
    let values = d1.space().values();
    let mut win = 0.0;
    let mut lose = 0.0;
    for (a, pa) in values.iter().zip(d1.probs()) {
        for (b, pb) in values.iter().zip(d2.probs()) {
            if a > b {
                win += pa * pb;
            } else if a < b {
                lose += pa * pb;
            }
        }
    }
    Ok(Preference::new(
        MethodId::ProbOfSuperiority,
        (win - lose).clamp(-1.0, 1.0),
    ))
}

/// Dispatches one of the eight pointwise methods.
pub fn compare(
    method: MethodId,
    d1: &JudgmentDistribution,
    d2: &JudgmentDistribution,
) -> Result<Preference> {
    match method {
        MethodId::Mode => cmp_mode(d1, d2),
        MethodId::Mean => cmp_mean(d1, d2),
        MethodId::RoundedMean => cmp_rounded_mean(d1, d2),
        MethodId::Median => cmp_median(d1, d2),
        MethodId::FirstPercentile => cmp_1p(d1, d2),
        MethodId::RiskAverseMean => cmp_ram(d1, d2),
        MethodId::Quantiles => cmp_qt(d1, d2),
        MethodId::ProbOfSuperiority => cmp_ps(d1, d2),
        other => Err(Error::MethodSettingMismatch {
            method: other.name().to_string(),
            setting: "pointwise".to_string(),
        }),
    }
}

/// Applies `methods` to every pair, in parallel when the `parallel` feature
/// is enabled. Output order matches input order.
pub fn compare_batch(
    pairs: &[(JudgmentDistribution, JudgmentDistribution)],
    methods: &[MethodId],
) -> Result<Vec<Vec<Preference>>> {
    crate::parallel::map(pairs, |(d1, d2)| {
        methods
            .iter()
            .map(|m| compare(*m, d1, d2))
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect()
}
