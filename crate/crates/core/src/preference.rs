//! Shared preference value type and method identifiers.

use serde::{Deserialize, Serialize};

/// Identifies the inference method that produced a preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Mode,
    Mean,
    #[serde(rename = "rmean")]
    RoundedMean,
    #[serde(rename = "medi")]
    Median,
    #[serde(rename = "1p")]
    FirstPercentile,
    #[serde(rename = "ram")]
    RiskAverseMean,
    #[serde(rename = "qt")]
    Quantiles,
    #[serde(rename = "ps")]
    ProbOfSuperiority,
    AggMode,
    #[serde(rename = "agg_medi")]
    AggMedian,
    AggMean,
    ModeAgg,
    #[serde(rename = "medi_agg")]
    MedianAgg,
    MeanAgg,
    IntermMode,
    IntermMean,
    ListMode,
    ListMean,
}

impl MethodId {
    /// Methods whose output is confined to `{-1, 0, +1}`.
    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            MethodId::Mode
                | MethodId::RoundedMean
                | MethodId::Median
                | MethodId::FirstPercentile
                | MethodId::AggMode
                | MethodId::IntermMode
                | MethodId::ListMode
        )
    }

    /// The eight pointwise comparison methods.
    pub fn pointwise() -> [MethodId; 8] {
        [
            MethodId::Mode,
            MethodId::Mean,
            MethodId::RoundedMean,
            MethodId::Median,
            MethodId::FirstPercentile,
            MethodId::RiskAverseMean,
            MethodId::Quantiles,
            MethodId::ProbOfSuperiority,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodId::Mode => "mode",
            MethodId::Mean => "mean",
            MethodId::RoundedMean => "rmean",
            MethodId::Median => "medi",
            MethodId::FirstPercentile => "1p",
            MethodId::RiskAverseMean => "ram",
            MethodId::Quantiles => "qt",
            MethodId::ProbOfSuperiority => "ps",
            MethodId::AggMode => "agg_mode",
            MethodId::AggMedian => "agg_medi",
            MethodId::AggMean => "agg_mean",
            MethodId::ModeAgg => "mode_agg",
            MethodId::MedianAgg => "medi_agg",
            MethodId::MeanAgg => "mean_agg",
            MethodId::IntermMode => "interm_mode",
            MethodId::IntermMean => "interm_mean",
            MethodId::ListMode => "list_mode",
            MethodId::ListMean => "list_mean",
        }
    }

    pub fn parse(name: &str) -> Option<MethodId> {
        serde_json::from_value(serde_json::Value::String(name.to_string())).ok()
    }
}

impl std::fmt::Display for MethodId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A signed preference in `[-1, 1]`. Positive values say the first response
/// is better, negative the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preference {
    pub value: f64,
    pub method: MethodId,
    pub discrete: bool,
}

impl Preference {
    pub fn new(method: MethodId, value: f64) -> Self {
        debug_assert!(
            (-1.0 - 1e-12..=1.0 + 1e-12).contains(&value),
            "preference {value} out of range for {method}"
        );
        Self {
            value,
            method,
            discrete: method.is_discrete(),
        }
    }
}

/// Sign function used by the discrete comparison methods.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for method in [
            MethodId::Mode,
            MethodId::RoundedMean,
            MethodId::FirstPercentile,
            MethodId::AggMedian,
            MethodId::MeanAgg,
            MethodId::ListMean,
        ] {
            assert_eq!(MethodId::parse(method.name()), Some(method));
        }
        assert_eq!(MethodId::parse("nope"), None);
    }

    #[test]
    fn discrete_flags() {
        assert!(MethodId::Mode.is_discrete());
        assert!(MethodId::FirstPercentile.is_discrete());
        assert!(!MethodId::Mean.is_discrete());
        assert!(!MethodId::ModeAgg.is_discrete());
        assert!(MethodId::AggMode.is_discrete());
    }
}
