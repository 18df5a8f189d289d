//! Synthetic judge simulator and the discretization property harness.
//!
//! The simulator draws latent response qualities on a unit scale and turns
//! them into judgment distributions through a Gaussian kernel over the
//! score grid. The kernel width `tau` plays the sharpening role: small
//! values collapse the distribution onto the nearest score the way
//! reasoning traces do. A position-bias shift boosts the first-presented
//! response in pairwise and listwise runs, and an optional token-bias knob
//! spikes mass on multiples of 5. Everything is deterministic given the
//! seed, with per-instance sub-seeds so generation parallelizes without
//! changing output.
//!
//! Judge knobs (`tau`, `noise`, `position_bias`, `annotator_noise`,
//! `order_noise`) are expressed in units of the 1-to-9 score scale and
//! rescaled internally for other granularities.
//!
//! [`ContinuousSpec`] holds a piecewise-linear density on
//! `[1/2, K + 1/2]` with closed-form cell integrals, used to check that
//! rounded means and quantiles of a distribution survive discretization
//! within the expected bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dist::{JudgmentDistribution, JudgmentSpace};
use crate::error::{Error, Result};
use crate::extract::{default_likert_symbols, LogprobRecord, Setting, TokenPosition};
use crate::listwise::identifier_letter;
use crate::pairwise::PresentationOrder;
use crate::record::LabelRow;

/// Numerical slack for the discretization bound checks.
pub const PROP1_SLACK: f64 = 1e-9;
/// Candidate list length emitted per judgment position.
pub const TOP_K_CANDIDATES: usize = 20;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for instance `index` under `seed`.
pub fn sub_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index.wrapping_add(1))))
}

/// Deterministic unit-scale latent quality pairs, one per instance.
pub fn unit_latent_pairs(seed: u64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut rng = sub_rng(seed, i as u64);
            (rng.random::<f64>(), rng.random::<f64>())
        })
        .collect()
}

/// A synthetic judge with a latent-to-score Gaussian kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentJudge {
    /// Kernel standard deviation in 1-to-9 score units. Must be positive;
    /// smaller is sharper.
    pub tau: f64,
    /// Per-response perceived-quality noise, score units.
    pub noise: f64,
    /// Latent boost applied to the first-presented response, score units.
    pub position_bias: f64,
    /// Unnormalized mass spike added on scores divisible by 5.
    pub token_bias: f64,
    pub seed: u64,
}

impl Default for LatentJudge {
    fn default() -> Self {
        Self {
            tau: 1.0,
            noise: 0.5,
            position_bias: 0.0,
            token_bias: 0.0,
            seed: 0,
        }
    }
}

impl LatentJudge {
    pub fn validate(&self) -> Result<()> {
        if self.tau.is_nan() || self.tau <= 0.0 {
            return Err(Error::BadSimConfig {
                reason: format!("tau must be positive, got {}", self.tau),
            });
        }
        if self.noise < 0.0 || self.token_bias < 0.0 {
            return Err(Error::BadSimConfig {
                reason: "noise and token_bias must be nonnegative".into(),
            });
        }
        Ok(())
    }

    /// Score distribution for a unit-scale latent quality: probabilities
    /// proportional to `exp(-(s - q)^2 / (2 sigma^2))` over `1..=k`, plus
    /// the token-bias spike, normalized.
    pub fn sample_pointwise(&self, quality_unit: f64, k: usize) -> Result<JudgmentDistribution> {
        self.validate()?;
        let space = JudgmentSpace::scores(k)?;
        let center = 1.0 + quality_unit * (k - 1) as f64;
        let sigma = self.tau * (k - 1) as f64 / 8.0;
        let logits: Vec<f64> = (1..=k)
            .map(|s| {
                let gap = s as f64 - center;
                -gap * gap / (2.0 * sigma * sigma)
            })
            .collect();
        let peak = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = logits.iter().map(|l| (l - peak).exp()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        if self.token_bias > 0.0 {
            for (i, w) in weights.iter_mut().enumerate() {
                if (i + 1) % 5 == 0 {
                    *w += self.token_bias;
                }
            }
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
        }
        JudgmentDistribution::new(space, weights)
    }

    /// Likert preference distribution for a score-unit quality gap.
    fn sample_likert(&self, gap_units: f64, k: usize) -> Result<JudgmentDistribution> {
        let space = JudgmentSpace::likert(k)?;
        let span = space.max_value() - space.min_value();
        let center = (gap_units / 8.0 * span).clamp(space.min_value(), space.max_value());
        let sigma = self.tau * span / 8.0;
        let logits: Vec<f64> = space
            .values()
            .iter()
            .map(|v| {
                let gap = v - center;
                -gap * gap / (2.0 * sigma * sigma)
            })
            .collect();
        let peak = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logits.iter().map(|l| (l - peak).exp()).collect();
        let total: f64 = weights.iter().sum();
        JudgmentDistribution::new(space, weights.iter().map(|w| w / total).collect())
    }
}

/// Dataset generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub setting: Setting,
    /// Score granularity for scoring settings, Likert size for ranking.
    pub k: usize,
    pub n_instances: usize,
    /// Responses per instance: at least 2 for pointwise, exactly 2 for
    /// pairwise, the list length for listwise.
    pub responses: usize,
    /// Annotator count; 0 emits hard labels from the latent ordering.
    pub annotators: usize,
    /// Annotator perception noise, score units.
    pub annotator_noise: f64,
    /// Extra per-order perception jitter for pairwise runs, score units.
    pub order_noise: f64,
    /// Listwise prompt variant: emit intermediate pairwise verdicts.
    pub listwise_interm: bool,
}

impl SimConfig {
    pub fn new(setting: Setting, k: usize, n_instances: usize) -> Self {
        let responses = if setting == Setting::Listwise { 7 } else { 2 };
        Self {
            setting,
            k,
            n_instances,
            responses,
            annotators: 0,
            annotator_noise: 1.0,
            order_noise: 0.0,
            listwise_interm: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_instances == 0 {
            return Err(Error::BadSimConfig {
                reason: "n_instances must be positive".into(),
            });
        }
        match self.setting {
            Setting::PointwiseScore => {
                if self.k < 2 || self.k > 99 {
                    return Err(Error::BadSimConfig {
                        reason: format!("score granularity {} outside 2..=99", self.k),
                    });
                }
                if self.responses < 2 {
                    return Err(Error::BadSimConfig {
                        reason: "pointwise instances need at least 2 responses".into(),
                    });
                }
            }
            Setting::PairwiseScore => {
                if self.k < 2 || self.k > 99 {
                    return Err(Error::BadSimConfig {
                        reason: format!("score granularity {} outside 2..=99", self.k),
                    });
                }
                if self.responses != 2 {
                    return Err(Error::BadSimConfig {
                        reason: "pairwise instances compare exactly 2 responses".into(),
                    });
                }
            }
            Setting::PairwiseRank => {
                if !matches!(self.k, 2 | 3 | 5) {
                    return Err(Error::BadLikert { got: self.k });
                }
                if self.responses != 2 {
                    return Err(Error::BadSimConfig {
                        reason: "pairwise instances compare exactly 2 responses".into(),
                    });
                }
            }
            Setting::Listwise => {
                if !(2..=26).contains(&self.responses) {
                    return Err(Error::BadSimConfig {
                        reason: format!("listwise length {} outside 2..=26", self.responses),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Simulated records plus gold labels, in the same JSONL schemas the
/// extraction and metrics layers consume.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset {
    pub records: Vec<LogprobRecord>,
    pub labels: Vec<LabelRow>,
}

fn instance_id(index: usize) -> String {
    format!("i{index:06}")
}

/// Label id for a response pair within an instance. Two-response instances
/// use the instance id itself.
pub fn pair_label_id(instance: &str, total: usize, a: &str, b: &str) -> String {
    if total == 2 {
        instance.to_string()
    } else {
        format!("{instance}:{a}:{b}")
    }
}

fn top_candidates(dist: &JudgmentDistribution, render: impl Fn(usize) -> String) -> Vec<(String, f64)> {
    let mut entries: Vec<(String, f64)> = dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(i, p)| (render(i), *p))
        .collect();
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    entries.truncate(TOP_K_CANDIDATES);
    entries.into_iter().map(|(t, p)| (t, p.ln())).collect()
}

fn fixed_token(token: &str) -> TokenPosition {
    TokenPosition::new(vec![(token.to_string(), 0.0)])
}

fn greedy_token(candidates: &[(String, f64)]) -> String {
    candidates
        .iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(t, _)| t.clone())
        .expect("nonempty candidates")
}

fn label_for_pair(
    rng: &mut ChaCha8Rng,
    cfg: &SimConfig,
    qa: f64,
    qb: f64,
) -> (Option<f64>, Option<Vec<f64>>) {
    if cfg.annotators == 0 {
        return (Some(if qa > qb { 1.0 } else { 0.0 }), None);
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let scale = cfg.annotator_noise / 8.0;
    let votes: Vec<f64> = (0..cfg.annotators)
        .map(|_| {
            let pa = qa + scale * normal.sample(rng);
            let pb = qb + scale * normal.sample(rng);
            if pa > pb {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let mean = votes.iter().sum::<f64>() / votes.len() as f64;
    (Some(mean), Some(votes))
}

fn gen_pointwise(
    judge: &LatentJudge,
    cfg: &SimConfig,
    index: usize,
) -> Result<(Vec<LogprobRecord>, Vec<LabelRow>)> {
    let mut rng = sub_rng(judge.seed, index as u64);
    let inst = instance_id(index);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let qualities: Vec<f64> = (0..cfg.responses).map(|_| rng.random::<f64>()).collect();
    let perceived: Vec<f64> = qualities
        .iter()
        .map(|q| q + judge.noise / 8.0 * normal.sample(&mut rng))
        .collect();

    let mut records = Vec::with_capacity(cfg.responses);
    for (r, q) in perceived.iter().enumerate() {
        let dist = judge.sample_pointwise(*q, cfg.k)?;
        let candidates = top_candidates(&dist, |i| (i + 1).to_string());
        let text = greedy_token(&candidates);
        records.push(LogprobRecord {
            id: format!("{inst}#r{}", r + 1),
            instance: Some(inst.clone()),
            setting: Setting::PointwiseScore,
            positions: vec![TokenPosition::new(candidates)],
            text,
            order: None,
            response: Some(r as u32 + 1),
            pair_order: None,
        });
    }

    let mut labels = Vec::new();
    for a in 0..cfg.responses {
        for b in (a + 1)..cfg.responses {
            let (label, votes) = label_for_pair(&mut rng, cfg, qualities[a], qualities[b]);
            labels.push(LabelRow {
                id: pair_label_id(
                    &inst,
                    cfg.responses,
                    &format!("r{}", a + 1),
                    &format!("r{}", b + 1),
                ),
                label,
                human_judgments: votes,
            });
        }
    }
    Ok((records, labels))
}

fn gen_pairwise(
    judge: &LatentJudge,
    cfg: &SimConfig,
    index: usize,
) -> Result<(Vec<LogprobRecord>, Vec<LabelRow>)> {
    let mut rng = sub_rng(judge.seed, index as u64);
    let inst = instance_id(index);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let q1 = rng.random::<f64>();
    let q2 = rng.random::<f64>();
    let p1 = q1 + judge.noise / 8.0 * normal.sample(&mut rng);
    let p2 = q2 + judge.noise / 8.0 * normal.sample(&mut rng);

    let mut records = Vec::with_capacity(2);
    for order in [PresentationOrder::FirstSecond, PresentationOrder::SecondFirst] {
        let jitter1 = cfg.order_noise / 8.0 * normal.sample(&mut rng);
        let jitter2 = cfg.order_noise / 8.0 * normal.sample(&mut rng);
        let (first, second) = match order {
            PresentationOrder::FirstSecond => (p1 + jitter1, p2 + jitter2),
            PresentationOrder::SecondFirst => (p2 + jitter1, p1 + jitter2),
        };
        let first_biased = first + judge.position_bias / 8.0;

        let (suffix, record) = match cfg.setting {
            Setting::PairwiseScore => {
                let dist_a = judge.sample_pointwise(first_biased, cfg.k)?;
                let dist_b = judge.sample_pointwise(second, cfg.k)?;
                let cands_a = top_candidates(&dist_a, |i| (i + 1).to_string());
                let cands_b = top_candidates(&dist_b, |i| (i + 1).to_string());
                let text = format!(
                    "Rating A: {}. Rating B: {}.",
                    greedy_token(&cands_a),
                    greedy_token(&cands_b)
                );
                let positions = vec![
                    fixed_token("Rating A: "),
                    TokenPosition::new(cands_a),
                    fixed_token(". Rating B: "),
                    TokenPosition::new(cands_b),
                    fixed_token("."),
                ];
                ("s", (positions, text))
            }
            Setting::PairwiseRank => {
                let gap_units = 8.0 * (first_biased - second);
                let dist = judge.sample_likert(gap_units, cfg.k)?;
                let symbols = default_likert_symbols(cfg.k);
                let cands = top_candidates(&dist, |i| symbols[i].clone());
                let text = format!("[[{}]]", greedy_token(&cands));
                let positions = vec![
                    fixed_token("[["),
                    TokenPosition::new(cands),
                    fixed_token("]]"),
                ];
                ("r", (positions, text))
            }
            _ => unreachable!("validated setting"),
        };
        let _ = suffix;
        let (positions, text) = record;
        let order_tag = match order {
            PresentationOrder::FirstSecond => "12",
            PresentationOrder::SecondFirst => "21",
        };
        records.push(LogprobRecord {
            id: format!("{inst}#o{order_tag}"),
            instance: Some(inst.clone()),
            setting: cfg.setting,
            positions,
            text,
            order: Some(order),
            response: None,
            pair_order: None,
        });
    }

    let (label, votes) = label_for_pair(&mut rng, cfg, q1, q2);
    let labels = vec![LabelRow {
        id: inst,
        label,
        human_judgments: votes,
    }];
    Ok((records, labels))
}

fn gen_listwise(
    judge: &LatentJudge,
    cfg: &SimConfig,
    index: usize,
) -> Result<(Vec<LogprobRecord>, Vec<LabelRow>)> {
    let mut rng = sub_rng(judge.seed, index as u64);
    let inst = instance_id(index);
    let n = cfg.responses;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let qualities: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    // Identifiers double as presented positions; earlier letters get the
    // position-bias boost.
    let effective: Vec<f64> = qualities
        .iter()
        .enumerate()
        .map(|(i, q)| {
            8.0 * q + judge.position_bias * (n - 1 - i) as f64 / (n - 1).max(1) as f64
                + judge.noise * normal.sample(&mut rng)
        })
        .collect();

    let mut positions = Vec::new();
    let mut text = String::new();
    let mut pair_order_field = None;

    if cfg.listwise_interm {
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        // Random evaluation order and random orientation per pair.
        for i in (1..pairs.len()).rev() {
            let j = rng.random_range(0..=i);
            pairs.swap(i, j);
        }
        for pair in &mut pairs {
            if rng.random::<bool>() {
                *pair = (pair.1, pair.0);
            }
        }
        text.push_str("[[");
        positions.push(fixed_token("[["));
        for (slot, (a, b)) in pairs.iter().enumerate() {
            if slot > 0 {
                text.push_str(", ");
                positions.push(fixed_token(", "));
            }
            let d = (effective[*a] - effective[*b]) / 2.0;
            let weights = [
                (d / judge.tau).exp(),
                1.0,
                (-d / judge.tau).exp(),
            ];
            let total: f64 = weights.iter().sum();
            let dist = JudgmentDistribution::new(
                JudgmentSpace::likert(3)?,
                weights.iter().map(|w| w / total).collect(),
            )?;
            // Verdicts are the better response's letter or "=".
            let cands = top_candidates(&dist, |i| match i {
                0 => identifier_letter(*a),
                1 => "=".to_string(),
                _ => identifier_letter(*b),
            });
            let tok = greedy_token(&cands);
            text.push_str(&tok);
            positions.push(TokenPosition::new(cands));
        }
        text.push_str("]]\n");
        positions.push(fixed_token("]]\n"));
        pair_order_field = Some(
            pairs
                .iter()
                .map(|(a, b)| (identifier_letter(*a), identifier_letter(*b)))
                .collect(),
        );
    }

    // Final list: softmax over remaining identifiers at each rank.
    let mut remaining: Vec<usize> = (0..n).collect();
    text.push_str("[[");
    positions.push(fixed_token("[["));
    for rank in 0..n {
        if rank > 0 {
            text.push_str(", ");
            positions.push(fixed_token(", "));
        }
        let weights: Vec<f64> = remaining
            .iter()
            .map(|i| (effective[*i] / judge.tau).exp())
            .collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let dist_entries: Vec<(String, f64)> = remaining
            .iter()
            .zip(&probs)
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (identifier_letter(*i), p.ln()))
            .collect();
        let mut cands = dist_entries;
        cands.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        cands.truncate(TOP_K_CANDIDATES);
        let tok = greedy_token(&cands);
        text.push_str(&tok);
        positions.push(TokenPosition::new(cands));
        let chosen = (tok.as_bytes()[0] - b'A') as usize;
        remaining.retain(|i| *i != chosen);
    }
    text.push_str("]]");
    positions.push(fixed_token("]]"));

    let record = LogprobRecord {
        id: inst.clone(),
        instance: Some(inst.clone()),
        setting: Setting::Listwise,
        positions,
        text,
        order: None,
        response: None,
        pair_order: pair_order_field,
    };

    let mut labels = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let (label, votes) = label_for_pair(&mut rng, cfg, qualities[a], qualities[b]);
            labels.push(LabelRow {
                id: format!("{inst}:{}:{}", identifier_letter(a), identifier_letter(b)),
                label,
                human_judgments: votes,
            });
        }
    }
    Ok((vec![record], labels))
}

/// Generates `n_instances` simulated judge runs with gold labels.
/// Instances are independent streams, so generation parallelizes without
/// changing the output.
pub fn generate_dataset(judge: &LatentJudge, cfg: &SimConfig) -> Result<SimDataset> {
    judge.validate()?;
    cfg.validate()?;
    let per_instance = crate::parallel::map_indices(cfg.n_instances, |index| match cfg.setting {
        Setting::PointwiseScore => gen_pointwise(judge, cfg, index),
        Setting::PairwiseScore | Setting::PairwiseRank => gen_pairwise(judge, cfg, index),
        Setting::Listwise => gen_listwise(judge, cfg, index),
    });
    let mut records = Vec::new();
    let mut labels = Vec::new();
    for item in per_instance {
        let (r, l) = item?;
        records.extend(r);
        labels.extend(l);
    }
    Ok(SimDataset { records, labels })
}

/// Piecewise-linear probability density on `[1/2, K + 1/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSpec {
    k: usize,
    /// `(x, density)` knots, strictly increasing in `x`, covering the
    /// support endpoints.
    knots: Vec<(f64, f64)>,
    lipschitz: f64,
}

impl ContinuousSpec {
    pub fn support(k: usize) -> (f64, f64) {
        (0.5, k as f64 + 0.5)
    }

    /// Validates knots and requires unit mass within `1e-9`.
    pub fn new(k: usize, knots: Vec<(f64, f64)>) -> Result<Self> {
        let (lo, hi) = Self::support(k);
        let valid = knots.len() >= 2
            && knots.windows(2).all(|w| w[0].0 < w[1].0)
            && knots.iter().all(|(x, y)| x.is_finite() && *y >= 0.0)
            && (knots[0].0 - lo).abs() < 1e-12
            && (knots.last().unwrap().0 - hi).abs() < 1e-12;
        if !valid {
            return Err(Error::BadDensity { lo, hi });
        }
        let lipschitz = knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max);
        let spec = Self { k, knots, lipschitz };
        let mass = spec.cdf(hi);
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::DensityMass { integral: mass });
        }
        Ok(spec)
    }

    /// Rescales the knot heights to unit mass, then validates.
    pub fn normalized(k: usize, knots: Vec<(f64, f64)>) -> Result<Self> {
        let (lo, hi) = Self::support(k);
        let mut integral = 0.0;
        for w in knots.windows(2) {
            integral += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0;
        }
        if integral <= 1e-12 {
            return Err(Error::DensityMass { integral });
        }
        let _ = (lo, hi);
        let scaled = knots.into_iter().map(|(x, y)| (x, y / integral)).collect();
        Self::new(k, scaled)
    }

    /// Random density with `interior` interior knots.
    pub fn random(rng: &mut ChaCha8Rng, k: usize, interior: usize) -> Self {
        let (lo, hi) = Self::support(k);
        loop {
            let mut xs: Vec<f64> = (0..interior)
                .map(|_| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            xs.push(lo);
            xs.push(hi);
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            xs.dedup();
            let knots: Vec<(f64, f64)> = xs.into_iter().map(|x| (x, rng.random::<f64>())).collect();
            if let Ok(spec) = Self::normalized(k, knots) {
                return spec;
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn density(&self, x: f64) -> f64 {
        for w in self.knots.windows(2) {
            if x >= w[0].0 && x <= w[1].0 {
                let t = (x - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + t * (w[1].1 - w[0].1);
            }
        }
        0.0
    }

    /// Exact cumulative mass up to `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut total = 0.0;
        for w in self.knots.windows(2) {
            let (x1, y1) = w[0];
            let (x2, y2) = w[1];
            if x >= x2 {
                total += (x2 - x1) * (y1 + y2) / 2.0;
            } else if x > x1 {
                let u = x - x1;
                let slope = (y2 - y1) / (x2 - x1);
                total += u * y1 + slope * u * u / 2.0;
                break;
            } else {
                break;
            }
        }
        total
    }

    /// Exact mean via per-segment closed forms.
    pub fn mean(&self) -> f64 {
        let mut total = 0.0;
        for w in self.knots.windows(2) {
            let (x1, y1) = w[0];
            let (x2, y2) = w[1];
            let len = x2 - x1;
            let slope = (y2 - y1) / len;
            total += y1 * x1 * len + (y1 + slope * x1) * len * len / 2.0 + slope * len.powi(3) / 3.0;
        }
        total
    }

    /// `inf { x : F(x) >= p }` by bisection on the monotone CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::QuantileLevel { p });
        }
        let (mut lo, mut hi) = Self::support(self.k);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Exact integral of the density over each rounding cell.
    pub fn discretize(&self) -> Result<JudgmentDistribution> {
        let probs: Vec<f64> = (1..=self.k)
            .map(|s| {
                let lo = s as f64 - 0.5;
                let hi = s as f64 + 0.5;
                (self.cdf(hi) - self.cdf(lo)).max(0.0)
            })
            .collect();
        JudgmentDistribution::new(JudgmentSpace::scores(self.k)?, probs)
    }
}

/// Gap report for one density against its discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub k: usize,
    pub mean_continuous: f64,
    pub mean_discrete: f64,
    /// `|[EX] - [EX_hat]|`, bounded by 1.
    pub mean_gap: f64,
    /// Per-level `(p, |Q_X(p) - Q_X_hat(p)|)`, each bounded by 1/2.
    pub quantile_gaps: Vec<(f64, f64)>,
    pub ok: bool,
}

/// Checks the discretization bounds: the rounded means differ by at most 1
/// and quantiles by at most 1/2, up to numerical slack.
pub fn prop1_check(spec: &ContinuousSpec, levels: &[f64]) -> Result<Prop1Report> {
    let discrete = spec.discretize()?;
    let mean_continuous = spec.mean();
    let mean_discrete = discrete.mean();
    let mean_gap = (mean_continuous.round() - mean_discrete.round()).abs();
    let mut quantile_gaps = Vec::with_capacity(levels.len());
    let mut ok = mean_gap <= 1.0 + PROP1_SLACK;
    for &p in levels {
        let qc = spec.quantile(p)?;
        let qd = discrete.quantile(p)?;
        let gap = (qc - qd).abs();
        ok &= gap <= 0.5 + PROP1_SLACK;
        quantile_gaps.push((p, gap));
    }
    Ok(Prop1Report {
        k: spec.k,
        mean_continuous,
        mean_discrete,
        mean_gap,
        quantile_gaps,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limits() {
        let sharp = LatentJudge {
            tau: 0.01,
            ..LatentJudge::default()
        };
        let d = sharp.sample_pointwise(0.5, 9).unwrap();
        assert_eq!(d.mode(), 5.0);
        assert!(d.probs()[4] > 0.999);

        let flat = LatentJudge {
            tau: 100.0,
            ..LatentJudge::default()
        };
        let d = flat.sample_pointwise(0.3, 9).unwrap();
        let max = d.probs().iter().cloned().fold(0.0, f64::max);
        let min = d.probs().iter().cloned().fold(1.0, f64::min);
        assert!(max - min < 0.01, "spread {}", max - min);
    }

    #[test]
    fn kernel_rejects_bad_tau() {
        let judge = LatentJudge {
            tau: 0.0,
            ..LatentJudge::default()
        };
        assert!(judge.sample_pointwise(0.5, 9).is_err());
    }

    #[test]
    fn kernel_regression_values_are_frozen() {
        // Computed once with an independent implementation of the kernel.
        let judge = LatentJudge {
            tau: 0.8,
            ..LatentJudge::default()
        };
        let d = judge.sample_pointwise(0.37, 9).unwrap();
        let expected = [
            0.00053097324932616183,
            0.024796595439306519,
            0.24273161381666872,
            0.49805293326553762,
            0.21420989735257029,
        ];
        for (p, e) in d.probs().iter().zip(&expected) {
            assert!((p - e).abs() < 1e-15, "{p} vs {e}");
        }
    }

    #[test]
    fn token_bias_spikes_multiples_of_five() {
        let judge = LatentJudge {
            tau: 4.0,
            token_bias: 0.3,
            ..LatentJudge::default()
        };
        let d = judge.sample_pointwise(0.1, 9).unwrap();
        assert!(d.probs()[4] > d.probs()[3]);
        assert!(d.probs()[4] > d.probs()[5]);
    }

    #[test]
    fn generation_is_deterministic() {
        let judge = LatentJudge {
            seed: 7,
            ..LatentJudge::default()
        };
        let cfg = SimConfig::new(Setting::PointwiseScore, 9, 5);
        let a = generate_dataset(&judge, &cfg).unwrap();
        let b = generate_dataset(&judge, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 10);
        assert_eq!(a.labels.len(), 5);

        let other_seed = LatentJudge {
            seed: 8,
            ..LatentJudge::default()
        };
        let c = generate_dataset(&other_seed, &cfg).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn pairwise_records_tag_orders() {
        let judge = LatentJudge {
            seed: 3,
            ..LatentJudge::default()
        };
        let cfg = SimConfig::new(Setting::PairwiseRank, 3, 4);
        let out = generate_dataset(&judge, &cfg).unwrap();
        assert_eq!(out.records.len(), 8);
        let orders: Vec<_> = out.records.iter().map(|r| r.order).collect();
        assert!(orders.contains(&Some(PresentationOrder::FirstSecond)));
        assert!(orders.contains(&Some(PresentationOrder::SecondFirst)));
        for rec in &out.records {
            rec.validate().unwrap();
            assert!(rec.text.starts_with("[["));
        }
    }

    #[test]
    fn listwise_records_parse_back() {
        let judge = LatentJudge {
            seed: 11,
            noise: 0.2,
            ..LatentJudge::default()
        };
        let mut cfg = SimConfig::new(Setting::Listwise, 9, 3);
        cfg.responses = 5;
        cfg.listwise_interm = true;
        let out = generate_dataset(&judge, &cfg).unwrap();
        assert_eq!(out.records.len(), 3);
        assert_eq!(out.labels.len(), 3 * 10);
        for rec in &out.records {
            rec.validate().unwrap();
            let rd = crate::listwise::parse_list_output(rec, 5).unwrap();
            assert_eq!(rd.n(), 5);
            let pairs: Vec<(usize, usize)> = rec
                .pair_order
                .as_ref()
                .unwrap()
                .iter()
                .map(|(a, b)| {
                    (
                        (a.as_bytes()[0] - b'A') as usize,
                        (b.as_bytes()[0] - b'A') as usize,
                    )
                })
                .collect();
            let ip = crate::listwise::parse_interm_output(rec, &pairs).unwrap();
            assert_eq!(ip.entries().len(), 10);
        }
    }

    #[test]
    fn zero_position_bias_gives_mirrored_pairwise_runs() {
        let judge = LatentJudge {
            seed: 21,
            position_bias: 0.0,
            ..LatentJudge::default()
        };
        let cfg = SimConfig::new(Setting::PairwiseRank, 5, 6);
        let out = generate_dataset(&judge, &cfg).unwrap();
        for pair in out.records.chunks(2) {
            let spec = crate::extract::ExtractionSpec::new(Setting::PairwiseRank, 5).unwrap();
            let d12 = crate::extract::to_distribution(&pair[0], &spec).unwrap();
            let d21 = crate::extract::to_distribution(&pair[1], &spec).unwrap();
            // With no bias and no order noise the two orders see swapped
            // inputs, so the Likert distributions are mirror images.
            let rev: Vec<f64> = d21.probs().iter().rev().copied().collect();
            for (a, b) in d12.probs().iter().zip(&rev) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn uniform_density_discretizes_to_uniform() {
        let k = 9;
        let (lo, hi) = ContinuousSpec::support(k);
        let height = 1.0 / (hi - lo);
        let spec = ContinuousSpec::new(k, vec![(lo, height), (hi, height)]).unwrap();
        let d = spec.discretize().unwrap();
        for p in d.probs() {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        }
        assert!((spec.mean() - 5.0).abs() < 1e-12);
        let report = prop1_check(&spec, &[0.01, 0.5]).unwrap();
        assert!(report.ok);
        assert_eq!(report.mean_gap, 0.0);
    }

    #[test]
    fn triangle_density_is_symmetric_around_center() {
        let k = 9;
        let (lo, hi) = ContinuousSpec::support(k);
        let spec = ContinuousSpec::normalized(
            k,
            vec![(lo, 0.0), (5.0, 1.0), (hi, 0.0)],
        )
        .unwrap();
        let d = spec.discretize().unwrap();
        assert_eq!(d.mode(), 5.0);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..4 {
            assert!((d.probs()[i] - d.probs()[8 - i]).abs() < 1e-12);
        }
        assert!((spec.mean() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn density_quantile_matches_cdf() {
        let mut rng = sub_rng(99, 0);
        let spec = ContinuousSpec::random(&mut rng, 9, 6);
        for p in [0.01, 0.25, 0.5, 0.9] {
            let q = spec.quantile(p).unwrap();
            assert!((spec.cdf(q) - p).abs() < 1e-6, "p={p}");
        }
    }

    #[test]
    fn random_densities_satisfy_prop1_bounds() {
        let mut rng = sub_rng(5, 1);
        for k in [9, 99] {
            for _ in 0..50 {
                let spec = ContinuousSpec::random(&mut rng, k, 8);
                let report = prop1_check(&spec, &[0.01, 0.5]).unwrap();
                assert!(report.ok, "violation: {report:?}");
            }
        }
    }

    #[test]
    fn boundary_mean_gap_stays_within_one() {
        // Triangle whose continuous mean sits near a rounding boundary.
        let k = 9;
        let (lo, hi) = ContinuousSpec::support(k);
        let spec = ContinuousSpec::normalized(
            k,
            vec![(lo, 0.0), (4.5, 1.0), (5.5, 1.0), (hi, 0.0)],
        )
        .unwrap();
        let report = prop1_check(&spec, &[0.5]).unwrap();
        assert!(report.mean_gap <= 1.0);
        assert!(report.ok);
    }
}
