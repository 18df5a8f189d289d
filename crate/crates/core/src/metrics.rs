//! Accuracy with tie credit, MSE (Brier score on binary labels), and tie
//! analysis of discrete methods against a continuous reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::Preference;

/// Continuous predictions within this distance of zero count as ties.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// Sign with the tie tolerance applied.
pub fn prediction_sign(value: f64) -> f64 {
    if value > SIGN_TOLERANCE {
        1.0
    } else if value < -SIGN_TOLERANCE {
        -1.0
    } else {
        0.0
    }
}

/// One labeled prediction. The label is 1 when the first response is
/// preferred, 0 when the second is; averaged human judgments give values in
/// between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalInstance {
    pub id: String,
    pub prediction: Preference,
    pub label: f64,
}

impl EvalInstance {
    pub fn new(id: impl Into<String>, prediction: Preference, label: f64) -> Result<Self> {
        let id = id.into();
        if !(0.0..=1.0).contains(&label) {
            return Err(Error::LabelOutOfRange { id, label });
        }
        Ok(Self {
            id,
            prediction,
            label,
        })
    }

    fn accuracy_points(&self) -> Result<f64> {
        if self.label != 0.0 && self.label != 1.0 {
            return Err(Error::NonBinaryLabel {
                id: self.id.clone(),
                label: self.label,
            });
        }
        let truth = if self.label == 1.0 { 1.0 } else { -1.0 };
        let sign = prediction_sign(self.prediction.value);
        Ok(if sign == truth {
            1.0
        } else if sign == 0.0 {
            0.5
        } else {
            0.0
        })
    }
}

/// Mean points under the 1 / 0.5 / 0 scoring rule for a correct winner, a
/// tie, or a wrong winner. Requires binary labels.
pub fn accuracy(instances: &[EvalInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut total = 0.0;
    for instance in instances {
        total += instance.accuracy_points()?;
    }
    Ok(total / instances.len() as f64)
}

/// Mean squared error of the prediction rescaled from `[-1, 1]` onto
/// `[0, 1]` against the label. Equals the Brier score on binary labels.
pub fn mse(instances: &[EvalInstance]) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: f64 = instances
        .iter()
        .map(|instance| {
            let rescaled = 0.5 * (instance.prediction.value + 1.0);
            (rescaled - instance.label) * (rescaled - instance.label)
        })
        .sum();
    Ok(total / instances.len() as f64)
}

/// Tie behavior of a (typically discrete) method against a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieAnalysis {
    /// Fraction of instances where the method predicts a tie.
    pub tie_rate: f64,
    /// Reference method's accuracy over the tie instances; absent when the
    /// method never ties.
    pub reference_accuracy_on_ties: Option<f64>,
    /// Method accuracy minus reference accuracy over non-tie instances;
    /// absent when the method always ties.
    pub non_tie_accuracy_delta: Option<f64>,
}

/// Computes the tie statistics. `method` and `reference` must cover the
/// same instances in the same order, with binary labels.
pub fn tie_analysis(method: &[EvalInstance], reference: &[EvalInstance]) -> Result<TieAnalysis> {
    if method.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: method.len(),
            right: reference.len(),
        });
    }
    if method.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut ties = Vec::new();
    let mut non_ties_method = Vec::new();
    let mut non_ties_reference = Vec::new();
    for (index, (m, r)) in method.iter().zip(reference).enumerate() {
        if m.id != r.id || m.label != r.label {
            return Err(Error::InstanceMismatch { index });
        }
        if prediction_sign(m.prediction.value) == 0.0 {
            ties.push(r.clone());
        } else {
            non_ties_method.push(m.clone());
            non_ties_reference.push(r.clone());
        }
    }
    let tie_rate = ties.len() as f64 / method.len() as f64;
    let reference_accuracy_on_ties = if ties.is_empty() {
        None
    } else {
        Some(accuracy(&ties)?)
    };
    let non_tie_accuracy_delta = if non_ties_method.is_empty() {
        None
    } else {
        Some(accuracy(&non_ties_method)? - accuracy(&non_ties_reference)?)
    };
    Ok(TieAnalysis {
        tie_rate,
        reference_accuracy_on_ties,
        non_tie_accuracy_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::{MethodId, Preference};

    fn inst(id: &str, value: f64, label: f64) -> EvalInstance {
        EvalInstance::new(id, Preference::new(MethodId::Mean, value), label).unwrap()
    }

    #[test]
    fn accuracy_examples() {
        let all_correct = vec![inst("a", 1.0, 1.0), inst("b", -1.0, 0.0)];
        assert_eq!(accuracy(&all_correct).unwrap(), 1.0);

        let all_ties = vec![inst("a", 0.0, 1.0), inst("b", 0.0, 0.0)];
        assert_eq!(accuracy(&all_ties).unwrap(), 0.5);

        let mixed = vec![
            inst("a", 1.0, 1.0),
            inst("b", 0.0, 1.0),
            inst("c", -1.0, 1.0),
            inst("d", 0.7, 1.0),
        ];
        assert_eq!(accuracy(&mixed).unwrap(), 0.625);

        let soft = vec![inst("a", 1.0, 0.5)];
        assert!(matches!(accuracy(&soft), Err(Error::NonBinaryLabel { .. })));
    }

    #[test]
    fn mse_examples() {
        let perfect = vec![inst("a", 1.0, 1.0), inst("b", -1.0, 0.0)];
        assert_eq!(mse(&perfect).unwrap(), 0.0);

        let always_tie = vec![inst("a", 0.0, 1.0)];
        assert_eq!(mse(&always_tie).unwrap(), 0.25);

        let fixture = vec![inst("a", 0.5, 1.0), inst("b", -0.5, 0.0)];
        assert!((mse(&fixture).unwrap() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn tie_analysis_examples() {
        let reference: Vec<EvalInstance> = (0..4)
            .map(|i| inst(&format!("i{i}"), 1.0, 1.0))
            .collect();

        let never_ties: Vec<EvalInstance> = (0..4)
            .map(|i| inst(&format!("i{i}"), -1.0, 1.0))
            .collect();
        let t = tie_analysis(&never_ties, &reference).unwrap();
        assert_eq!(t.tie_rate, 0.0);
        assert!(t.reference_accuracy_on_ties.is_none());
        assert_eq!(t.non_tie_accuracy_delta, Some(-1.0));

        let always_ties: Vec<EvalInstance> = (0..4)
            .map(|i| inst(&format!("i{i}"), 0.0, 1.0))
            .collect();
        let t = tie_analysis(&always_ties, &reference).unwrap();
        assert_eq!(t.tie_rate, 1.0);
        assert_eq!(t.reference_accuracy_on_ties, Some(1.0));
        assert!(t.non_tie_accuracy_delta.is_none());
    }

    #[test]
    fn tie_analysis_ten_instance_fixture() {
        // Hand-computed: 4 ties (reference right on 3 of 4), 6 non-ties of
        // which the method gets 5 right and the reference 4.
        let labels = [1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        let method_vals = [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let reference_vals = [1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0];
        let method: Vec<EvalInstance> = labels
            .iter()
            .zip(&method_vals)
            .enumerate()
            .map(|(i, (l, v))| inst(&format!("i{i}"), *v, *l))
            .collect();
        let reference: Vec<EvalInstance> = labels
            .iter()
            .zip(&reference_vals)
            .enumerate()
            .map(|(i, (l, v))| inst(&format!("i{i}"), *v, *l))
            .collect();
        let t = tie_analysis(&method, &reference).unwrap();
        assert!((t.tie_rate - 0.4).abs() < 1e-15);
        assert!((t.reference_accuracy_on_ties.unwrap() - 0.75).abs() < 1e-15);
        let delta = t.non_tie_accuracy_delta.unwrap();
        assert!((delta - (5.0 / 6.0 - 4.0 / 6.0)).abs() < 1e-12, "got {delta}");
    }

    #[test]
    fn negation_flips_accuracy_without_ties() {
        let preds = [0.4, -0.2, 0.9, -1.0, 0.1];
        let labels = [1.0, 0.0, 0.0, 1.0, 1.0];
        let fwd: Vec<EvalInstance> = preds
            .iter()
            .zip(&labels)
            .enumerate()
            .map(|(i, (v, l))| inst(&format!("i{i}"), *v, *l))
            .collect();
        let neg: Vec<EvalInstance> = preds
            .iter()
            .zip(&labels)
            .enumerate()
            .map(|(i, (v, l))| inst(&format!("i{i}"), -*v, *l))
            .collect();
        let a = accuracy(&fwd).unwrap();
        let b = accuracy(&neg).unwrap();
        assert!((a + b - 1.0).abs() < 1e-12);
    }
}
