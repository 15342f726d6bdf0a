//! Confusion counts and the derived binary rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// TP/FP/TN/FN for a designated positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn record(&mut self, actual_positive: bool, predicted_positive: bool) {
        match (actual_positive, predicted_positive) {
            (true, true) => self.true_pos += 1,
            (true, false) => self.false_neg += 1,
            (false, true) => self.false_pos += 1,
            (false, false) => self.true_neg += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionCounts) {
        self.true_pos += other.true_pos;
        self.false_pos += other.false_pos;
        self.true_neg += other.true_neg;
        self.false_neg += other.false_neg;
    }
}

/// accuracy = (TP+TN)/total, sensitivity = TP/(TP+FN),
/// specificity = TN/(TN+FP). Ratios with a zero denominator are `None`
/// ("undefined"), never silently 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn metrics(c: &ConfusionCounts) -> Result<BinaryMetrics> {
    let total = c.total();
    if total == 0 {
        return Err(Error::data("metrics: zero evaluated subjects"));
    }
    let accuracy = (c.true_pos + c.true_neg) as f64 / total as f64;
    let positives = c.true_pos + c.false_neg;
    let negatives = c.true_neg + c.false_pos;
    let sensitivity = (positives > 0).then(|| c.true_pos as f64 / positives as f64);
    let specificity = (negatives > 0).then(|| c.true_neg as f64 / negatives as f64);
    Ok(BinaryMetrics {
        accuracy,
        sensitivity,
        specificity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn near_perfect_step() {
        let c = ConfusionCounts {
            true_pos: 120,
            false_neg: 0,
            true_neg: 82,
            false_pos: 2,
        };
        let m = metrics(&c).unwrap();
        assert_relative_eq!(m.sensitivity.unwrap(), 1.000, epsilon = 1e-12);
        assert_relative_eq!(m.specificity.unwrap(), 0.976, epsilon = 5e-4);
        assert_relative_eq!(m.accuracy, 202.0 / 204.0, epsilon = 1e-12);
    }

    #[test]
    fn all_correct_is_accuracy_one() {
        let c = ConfusionCounts {
            true_pos: 10,
            true_neg: 5,
            ..Default::default()
        };
        assert_eq!(metrics(&c).unwrap().accuracy, 1.0);
    }

    #[test]
    fn empty_positive_class_flags_sensitivity() {
        let c = ConfusionCounts {
            true_neg: 7,
            false_pos: 1,
            ..Default::default()
        };
        let m = metrics(&c).unwrap();
        assert!(m.sensitivity.is_none());
        assert!(m.specificity.is_some());
    }

    #[test]
    fn zero_total_rejected() {
        assert!(metrics(&ConfusionCounts::default()).is_err());
    }

    #[test]
    fn accuracy_decomposition_identity() {
        // accuracy = (sens·P + spec·N)/(P+N) whenever both rates exist.
        let cases = [
            (5, 2, 9, 1),
            (100, 0, 80, 3),
            (1, 1, 1, 1),
            (42, 17, 23, 8),
        ];
        for (tp, fp, tn, fn_) in cases {
            let c = ConfusionCounts {
                true_pos: tp,
                false_pos: fp,
                true_neg: tn,
                false_neg: fn_,
            };
            let m = metrics(&c).unwrap();
            let p = (tp + fn_) as f64;
            let n = (tn + fp) as f64;
            let recomposed =
                (m.sensitivity.unwrap() * p + m.specificity.unwrap() * n) / (p + n);
            assert_relative_eq!(m.accuracy, recomposed, epsilon = 1e-12);
        }
    }
}
