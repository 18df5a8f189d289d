//! Discrete probability distributions over ordered judgment options.
//!
//! A [`JudgmentSpace`] fixes the option values (scores `1..=K`, a Likert
//! value grid, or a signed difference grid) and a [`JudgmentDistribution`]
//! attaches a probability vector to it. All statistics needed by the
//! comparison methods live here: mean, mode, quantiles, standard deviation,
//! lower semi-deviation, mixtures, exact difference distributions, unit
//! rescaling, and the 99-to-9 coarsification.
//!
//! Values are immutable after construction and every operation is a pure
//! function, so the types are freely shareable across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sums must land within this distance of 1 after renormalization.
pub const PROB_TOLERANCE: f64 = 1e-9;
/// Inputs whose mass is within this distance of 1 are renormalized,
/// anything further off is rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// An ordered set of judgment option values.
///
/// Values must be strictly increasing or strictly decreasing. Scores use
/// `1..=K`; Likert scales use the symmetric grids `[1, -1]`, `[1, 0, -1]`,
/// and `[2, 1, 0, -1, -2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentSpace {
    values: Vec<f64>,
    ascending: bool,
}

impl JudgmentSpace {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SpaceTooSmall { min: 1, got: 0 });
        }
        let ascending = values.windows(2).all(|w| w[0] < w[1]);
        let descending = values.windows(2).all(|w| w[0] > w[1]);
        if values.len() > 1 && !ascending && !descending {
            return Err(Error::NonMonotoneSpace);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonMonotoneSpace);
        }
        let ascending = ascending || values.len() == 1;
        Ok(Self { values, ascending })
    }

    /// The integer score grid `1..=k`.
    pub fn scores(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::SpaceTooSmall { min: 2, got: k });
        }
        Self::new((1..=k).map(|v| v as f64).collect())
    }

    /// Likert value grid: `[1, -1]`, `[1, 0, -1]`, or `[2, 1, 0, -1, -2]`.
    pub fn likert(k: usize) -> Result<Self> {
        let values = match k {
            2 => vec![1.0, -1.0],
            3 => vec![1.0, 0.0, -1.0],
            5 => vec![2.0, 1.0, 0.0, -1.0, -2.0],
            got => return Err(Error::BadLikert { got }),
        };
        Self::new(values)
    }

    /// Degenerate single-option space, used for point-mass baselines.
    pub fn singleton(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Option indices in ascending value order.
    pub fn ascending_indices(&self) -> Box<dyn DoubleEndedIterator<Item = usize> + '_> {
        if self.ascending {
            Box::new(0..self.values.len())
        } else {
            Box::new((0..self.values.len()).rev())
        }
    }

    /// True when the values are exactly the integer grid `1..=k`.
    pub fn is_score_grid(&self, k: usize) -> bool {
        self.values.len() == k && self.values.iter().enumerate().all(|(i, v)| *v == (i + 1) as f64)
    }

    /// True when the value set is closed under negation.
    pub fn is_symmetric_about_zero(&self) -> bool {
        self.values
            .iter()
            .all(|v| self.values.iter().any(|w| *w == -*v))
    }

    pub fn min_value(&self) -> f64 {
        if self.ascending {
            self.values[0]
        } else {
            *self.values.last().unwrap()
        }
    }

    pub fn max_value(&self) -> f64 {
        if self.ascending {
            *self.values.last().unwrap()
        } else {
            self.values[0]
        }
    }

    /// Index of the option carrying `value`, if it is on the grid.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        self.values.iter().position(|v| *v == value)
    }
}

/// A probability vector over a [`JudgmentSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentDistribution {
    space: JudgmentSpace,
    probs: Vec<f64>,
}

impl JudgmentDistribution {
    /// Builds a distribution, renormalizing mass within `1e-6` of 1 and
    /// rejecting anything further off.
    pub fn new(space: JudgmentSpace, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.len() {
            return Err(Error::ProbabilityLength {
                expected: space.len(),
                got: probs.len(),
            });
        }
        for (index, p) in probs.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 || *p > 1.0 + PROB_TOLERANCE {
                return Err(Error::ProbabilityRange {
                    index,
                    value: *p,
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::ProbabilitySum { sum });
        }
        let probs = if (sum - 1.0).abs() > PROB_TOLERANCE {
            probs.iter().map(|p| p / sum).collect()
        } else {
            probs
        };
        Ok(Self { space, probs })
    }

    /// Point mass on the option at `index`.
    pub fn point_mass(space: JudgmentSpace, index: usize) -> Result<Self> {
        if index >= space.len() {
            return Err(Error::ProbabilityLength {
                expected: space.len(),
                got: index + 1,
            });
        }
        let mut probs = vec![0.0; space.len()];
        probs[index] = 1.0;
        Self::new(space, probs)
    }

    /// Point mass at an arbitrary real value on a degenerate space.
    pub fn degenerate(value: f64) -> Result<Self> {
        Self::new(JudgmentSpace::singleton(value)?, vec![1.0])
    }

    /// Uniform distribution over the space.
    pub fn uniform(space: JudgmentSpace) -> Result<Self> {
        let k = space.len();
        Self::new(space, vec![1.0 / k as f64; k])
    }

    pub fn space(&self) -> &JudgmentSpace {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn is_point_mass(&self) -> bool {
        self.probs.contains(&1.0)
    }

    /// Expectation over option values.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .zip(&self.space.values)
            .map(|(p, v)| p * v)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .zip(&self.space.values)
            .map(|(p, v)| p * (v - m) * (v - m))
            .sum::<f64>()
            .max(0.0)
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Lower semi-deviation, `sqrt(E[max(EX - X, 0)^2])`.
    pub fn lower_semi_deviation(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .zip(&self.space.values)
            .map(|(p, v)| {
                let d = (m - v).max(0.0);
                p * d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Value of the highest-probability option. Exact probability ties break
    /// toward the lowest value.
    pub fn mode(&self) -> f64 {
        let mut best_idx = None;
        let mut best_prob = f64::NEG_INFINITY;
        for idx in self.space.ascending_indices() {
            if self.probs[idx] > best_prob {
                best_prob = self.probs[idx];
                best_idx = Some(idx);
            }
        }
        self.space.value(best_idx.expect("nonempty distribution"))
    }

    /// Smallest value `v` with `P(X <= v) >= p`, for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::QuantileLevel { p });
        }
        let mut cum = 0.0;
        let mut last = self.space.max_value();
        for idx in self.space.ascending_indices() {
            cum += self.probs[idx];
            if cum >= p {
                return Ok(self.space.value(idx));
            }
            last = self.space.value(idx);
        }
        // Probability mass rounding can leave cum marginally below 1.
        let _ = last;
        Ok(self.space.max_value())
    }

    /// Largest value `v` with `P(X >= v) >= p`. The reflected counterpart of
    /// [`Self::quantile`], used to symmetrize medians of difference grids.
    pub fn upper_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::QuantileLevel { p });
        }
        let mut cum = 0.0;
        for idx in self.space.ascending_indices().rev() {
            cum += self.probs[idx];
            if cum >= p {
                return Ok(self.space.value(idx));
            }
        }
        Ok(self.space.min_value())
    }

    /// `P(X <= v)` for an arbitrary threshold.
    pub fn cdf(&self, v: f64) -> f64 {
        self.probs
            .iter()
            .zip(&self.space.values)
            .filter(|(_, value)| **value <= v)
            .map(|(p, _)| p)
            .sum()
    }

    /// Interior cumulative levels in ascending value order, excluding the
    /// terminal 1. These are the breakpoints of the quantile function.
    pub fn interior_cdf_levels(&self) -> Vec<f64> {
        let mut levels = Vec::with_capacity(self.len().saturating_sub(1));
        let mut cum = 0.0;
        let n = self.len();
        for (seen, idx) in self.space.ascending_indices().enumerate() {
            cum += self.probs[idx];
            if seen + 1 < n {
                levels.push(cum.min(1.0));
            }
        }
        levels
    }

    /// Pointwise weighted average of distributions on a shared space.
    pub fn mixture(parts: &[JudgmentDistribution], weights: &[f64]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyInput);
        }
        if parts.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: parts.len(),
                right: weights.len(),
            });
        }
        let space = parts[0].space.clone();
        for part in parts {
            if part.space != space {
                return Err(Error::SpaceMismatch);
            }
        }
        let wsum: f64 = weights.iter().sum();
        if (wsum - 1.0).abs() > RENORMALIZE_TOLERANCE || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::WeightSum { sum: wsum });
        }
        let mut probs = vec![0.0; space.len()];
        for (part, w) in parts.iter().zip(weights) {
            for (acc, p) in probs.iter_mut().zip(&part.probs) {
                *acc += w * p;
            }
        }
        Self::new(space, probs)
    }

    /// Exact distribution of `X1 - X2` under independence, on the signed
    /// grid `-(K-1)..=K-1`. Both inputs must share the score grid `1..=K`.
    pub fn diff_distribution(&self, other: &JudgmentDistribution) -> Result<DeltaDistribution> {
        let k = self.len();
        if !self.space.is_score_grid(k) {
            return Err(Error::NotScoreGrid { expected: k });
        }
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let mut probs = vec![0.0; 2 * k - 1];
        for (a, pa) in self.probs.iter().enumerate() {
            for (b, pb) in other.probs.iter().enumerate() {
                probs[a + (k - 1) - b] += pa * pb;
            }
        }
        DeltaDistribution::from_probs(k, probs)
    }

    /// Affine rescaling of the value grid onto `[0, 1]`, probabilities
    /// untouched.
    pub fn rescale_to_unit(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::SpaceTooSmall {
                min: 2,
                got: self.len(),
            });
        }
        let lo = self.space.min_value();
        let hi = self.space.max_value();
        let span = hi - lo;
        let values = self.space.values.iter().map(|v| (v - lo) / span).collect();
        Self::new(JudgmentSpace::new(values)?, self.probs.clone())
    }

    /// Bins a `1..=99` score distribution into 9 blocks of 11 scores each.
    pub fn coarsify(&self) -> Result<Self> {
        if !self.space.is_score_grid(99) {
            return Err(Error::WrongGranularity {
                expected: 99,
                got: self.len(),
            });
        }
        let mut probs = vec![0.0; 9];
        for (i, p) in self.probs.iter().enumerate() {
            probs[i / 11] += p;
        }
        Self::new(JudgmentSpace::scores(9)?, probs)
    }
}

/// Distribution of a signed score difference, on a grid symmetric about 0.
///
/// Houses the pairwise delta variables: exact difference distributions of
/// independent scores, decoded-first-score proxies, and Likert preferences
/// mapped to their numeric values. Values are kept in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaDistribution {
    inner: JudgmentDistribution,
}

impl DeltaDistribution {
    /// Wraps a distribution whose value grid is symmetric about zero.
    /// Descending grids (the Likert convention) are flipped to ascending.
    pub fn new(dist: JudgmentDistribution) -> Result<Self> {
        if !dist.space.is_symmetric_about_zero() {
            return Err(Error::AsymmetricDelta);
        }
        if dist.space.ascending {
            return Ok(Self { inner: dist });
        }
        let values: Vec<f64> = dist.space.values.iter().rev().copied().collect();
        let probs: Vec<f64> = dist.probs.iter().rev().copied().collect();
        Ok(Self {
            inner: JudgmentDistribution::new(JudgmentSpace::new(values)?, probs)?,
        })
    }

    /// Delta grid `-(k-1)..=k-1` for the score grid `1..=k`, with `probs`
    /// indexed from the most negative difference.
    pub fn from_probs(k: usize, probs: Vec<f64>) -> Result<Self> {
        let values = (0..2 * k - 1).map(|i| i as f64 - (k - 1) as f64).collect();
        Self::new(JudgmentDistribution::new(JudgmentSpace::new(values)?, probs)?)
    }

    pub fn as_dist(&self) -> &JudgmentDistribution {
        &self.inner
    }

    pub fn values(&self) -> &[f64] {
        self.inner.space.values()
    }

    pub fn probs(&self) -> &[f64] {
        self.inner.probs()
    }

    pub fn mean(&self) -> f64 {
        self.inner.mean()
    }

    /// Mirror image, `P(delta) -> P(-delta)`.
    pub fn reflect(&self) -> Self {
        let probs: Vec<f64> = self.inner.probs.iter().rev().copied().collect();
        Self {
            inner: JudgmentDistribution::new(self.inner.space.clone(), probs)
                .expect("reflection preserves validity"),
        }
    }

    /// Mode of the difference. Exact probability ties break toward the
    /// smallest absolute value, and a tie between `+d` and `-d` counts as 0,
    /// so reflecting the distribution negates the result exactly.
    pub fn mode_value(&self) -> f64 {
        let probs = self.inner.probs();
        let max = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut best: Option<f64> = None;
        for (idx, p) in probs.iter().enumerate() {
            if *p == max {
                let v = self.inner.space.value(idx);
                best = Some(match best {
                    None => v,
                    Some(b) if v.abs() < b.abs() => v,
                    Some(b) if v.abs() == b.abs() && v != b => 0.0,
                    Some(b) => b,
                });
            }
        }
        best.expect("nonempty distribution")
    }

    /// Median symmetrized over reflection: the midpoint of the lower and
    /// upper medians. Reflecting the distribution negates it exactly.
    pub fn median_value(&self) -> f64 {
        let lower = self.inner.quantile(0.5).expect("0.5 is interior");
        let upper = self.inner.upper_quantile(0.5).expect("0.5 is interior");
        0.5 * (lower + upper)
    }

    /// Lower median under the shared quantile convention.
    pub fn lower_median(&self) -> f64 {
        self.inner.quantile(0.5).expect("0.5 is interior")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(values: Vec<f64>, probs: Vec<f64>) -> JudgmentDistribution {
        JudgmentDistribution::new(JudgmentSpace::new(values).unwrap(), probs).unwrap()
    }

    fn scores9() -> JudgmentSpace {
        JudgmentSpace::scores(9).unwrap()
    }

    #[test]
    fn mean_examples() {
        let point = JudgmentDistribution::point_mass(scores9(), 4).unwrap();
        assert_eq!(point.mean(), 5.0);
        let uniform = JudgmentDistribution::uniform(scores9()).unwrap();
        assert!((uniform.mean() - 5.0).abs() < 1e-12);
        let d = dist(vec![1.0, 2.0, 3.0], vec![0.5, 0.2, 0.3]);
        assert!((d.mean() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn mode_examples() {
        let d = dist(vec![1.0, 2.0, 3.0], vec![0.5, 0.2, 0.3]);
        assert_eq!(d.mode(), 1.0);
        let tied = dist(vec![1.0, 2.0, 3.0], vec![0.4, 0.4, 0.2]);
        assert_eq!(tied.mode(), 1.0);
        let point = JudgmentDistribution::point_mass(scores9(), 6).unwrap();
        assert_eq!(point.mode(), 7.0);
    }

    #[test]
    fn mode_tie_breaks_to_lowest_value_on_descending_grid() {
        let d = dist(vec![2.0, 1.0, 0.0, -1.0, -2.0], vec![0.3, 0.3, 0.2, 0.1, 0.1]);
        assert_eq!(d.mode(), 1.0);
    }

    #[test]
    fn quantile_examples() {
        let uniform = JudgmentDistribution::uniform(scores9()).unwrap();
        assert_eq!(uniform.quantile(0.5).unwrap(), 5.0);
        let d = dist(vec![1.0, 2.0], vec![0.009, 0.991]);
        assert_eq!(d.quantile(0.01).unwrap(), 2.0);
        let point = dist(vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 1.0]);
        for p in [0.01, 0.5, 0.99] {
            assert_eq!(point.quantile(p).unwrap(), 3.0);
        }
        assert!(point.quantile(0.0).is_err());
        assert!(point.quantile(1.0).is_err());
    }

    #[test]
    fn spread_examples() {
        let point = JudgmentDistribution::point_mass(scores9(), 2).unwrap();
        assert_eq!(point.std(), 0.0);
        assert_eq!(point.lower_semi_deviation(), 0.0);

        let two = dist(vec![1.0, 3.0], vec![0.5, 0.5]);
        assert!((two.std() - 1.0).abs() < 1e-12);
        assert!((two.lower_semi_deviation() - 0.5f64.sqrt()).abs() < 1e-12);

        // Brute-force oracle over the 9 uniform outcomes.
        let uniform = JudgmentDistribution::uniform(scores9()).unwrap();
        let m = 5.0;
        let brute: f64 = (1..=9)
            .map(|v| (1.0 / 9.0) * ((m - v as f64).max(0.0)).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((uniform.lower_semi_deviation() - brute).abs() < 1e-12);
    }

    #[test]
    fn mixture_examples() {
        let d = dist(vec![1.0, 2.0, 3.0], vec![0.5, 0.2, 0.3]);
        let same = JudgmentDistribution::mixture(&[d.clone(), d.clone()], &[0.5, 0.5]).unwrap();
        assert_eq!(same.probs(), d.probs());

        let space = JudgmentSpace::new(vec![1.0, 2.0, 3.0]).unwrap();
        let p1 = JudgmentDistribution::point_mass(space.clone(), 0).unwrap();
        let p3 = JudgmentDistribution::point_mass(space, 2).unwrap();
        let mix = JudgmentDistribution::mixture(&[p1.clone(), p3], &[0.5, 0.5]).unwrap();
        assert_eq!(mix.probs(), &[0.5, 0.0, 0.5]);

        let first = JudgmentDistribution::mixture(&[p1.clone(), d], &[1.0, 0.0]).unwrap();
        assert_eq!(first.probs(), p1.probs());
    }

    #[test]
    fn mixture_rejects_space_mismatch() {
        let a = JudgmentDistribution::uniform(scores9()).unwrap();
        let b = JudgmentDistribution::uniform(JudgmentSpace::scores(5).unwrap()).unwrap();
        assert!(matches!(
            JudgmentDistribution::mixture(&[a, b], &[0.5, 0.5]),
            Err(Error::SpaceMismatch)
        ));
    }

    #[test]
    fn diff_distribution_examples() {
        let d5 = JudgmentDistribution::point_mass(scores9(), 4).unwrap();
        let delta = d5.diff_distribution(&d5).unwrap();
        assert_eq!(delta.probs()[8], 1.0);

        let d3 = JudgmentDistribution::point_mass(scores9(), 2).unwrap();
        let delta = d5.diff_distribution(&d3).unwrap();
        assert_eq!(delta.values()[10], 2.0);
        assert_eq!(delta.probs()[10], 1.0);

        let space = JudgmentSpace::scores(2).unwrap();
        let u = JudgmentDistribution::uniform(space.clone()).unwrap();
        let p1 = JudgmentDistribution::point_mass(space, 0).unwrap();
        let delta = u.diff_distribution(&p1).unwrap();
        assert_eq!(delta.values(), &[-1.0, 0.0, 1.0]);
        assert_eq!(delta.probs(), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn rescale_examples() {
        let d = dist(vec![1.0, 2.0, 3.0], vec![0.5, 0.2, 0.3]);
        let r = d.rescale_to_unit().unwrap();
        assert_eq!(r.space().values(), &[0.0, 0.5, 1.0]);
        assert_eq!(r.probs(), d.probs());

        let uniform = JudgmentDistribution::uniform(scores9()).unwrap();
        let r = uniform.rescale_to_unit().unwrap();
        assert_eq!(r.space().value(4), 0.5);

        assert!(JudgmentDistribution::degenerate(3.0)
            .unwrap()
            .rescale_to_unit()
            .is_err());
    }

    #[test]
    fn coarsify_examples() {
        let u99 = JudgmentDistribution::uniform(JudgmentSpace::scores(99).unwrap()).unwrap();
        let c = u99.coarsify().unwrap();
        for p in c.probs() {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        }

        let p50 = JudgmentDistribution::point_mass(JudgmentSpace::scores(99).unwrap(), 49).unwrap();
        let c = p50.coarsify().unwrap();
        assert_eq!(c.mode(), 5.0);
        assert!((c.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let u9 = JudgmentDistribution::uniform(scores9()).unwrap();
        assert!(u9.coarsify().is_err());
    }

    #[test]
    fn construction_renormalizes_or_rejects() {
        let space = JudgmentSpace::scores(2).unwrap();
        let ok = JudgmentDistribution::new(space.clone(), vec![0.5, 0.5 + 5e-7]).unwrap();
        assert!((ok.probs().iter().sum::<f64>() - 1.0).abs() <= PROB_TOLERANCE);
        assert!(JudgmentDistribution::new(space.clone(), vec![0.5, 0.6]).is_err());
        assert!(JudgmentDistribution::new(space, vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn delta_mode_symmetric_ties() {
        let d = DeltaDistribution::from_probs(3, vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(d.mode_value(), 0.0);
        let skew = DeltaDistribution::from_probs(3, vec![0.1, 0.0, 0.0, 0.0, 0.9]).unwrap();
        assert_eq!(skew.mode_value(), 2.0);
        assert_eq!(skew.reflect().mode_value(), -2.0);
    }

    #[test]
    fn delta_median_symmetrized() {
        let d = DeltaDistribution::from_probs(3, vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(d.median_value(), 0.0);
        assert_eq!(d.lower_median(), -2.0);
        let skew = DeltaDistribution::from_probs(2, vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(skew.median_value(), -skew.reflect().median_value());
    }

    #[test]
    fn likert_delta_canonicalizes_descending_grid() {
        let likert = JudgmentSpace::likert(5).unwrap();
        let d = JudgmentDistribution::new(likert, vec![0.5, 0.2, 0.1, 0.1, 0.1]).unwrap();
        let delta = DeltaDistribution::new(d).unwrap();
        assert_eq!(delta.values(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(delta.probs(), &[0.1, 0.1, 0.1, 0.2, 0.5]);
    }
}
