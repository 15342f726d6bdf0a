//! Two-class learners with a common decision-score contract.
//!
//! All three methods (linear soft-margin SVM, LDA, Gaussian Naive Bayes)
//! expose a real-valued `score(x)` where larger means more positive-class,
//! and `predict(x) = score(x) > threshold` with ties going to the negative
//! class. Fitted scorers are immutable and serialize to JSON with exact
//! round-trip of learned reals.

mod lda;
mod nb;
mod svm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lda::{lda_fit, LdaParams};
pub use nb::{nb_fit, NbParams};
pub use svm::{svm_fit, SvmConfig, SvmParams};

/// Classification method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Svm,
    Lda,
    Nb,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Svm => "svm",
            Method::Lda => "lda",
            Method::Nb => "nb",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svm" => Ok(Method::Svm),
            "lda" => Ok(Method::Lda),
            "nb" | "naive-bayes" | "naivebayes" => Ok(Method::Nb),
            other => Err(Error::config(format!(
                "unknown method \"{other}\" (expected svm, lda, or nb)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Learned parameters, tagged by method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ScorerParams {
    Svm(SvmParams),
    Lda(LdaParams),
    Nb(NbParams),
}

/// A fitted two-class decision function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryScorer {
    pub params: ScorerParams,
    /// Display name of the positive class.
    pub positive: String,
    /// Display name of the negative class.
    pub negative: String,
    /// Decision threshold; `predict` is `score > threshold`.
    pub threshold: f64,
}

impl BinaryScorer {
    pub fn method(&self) -> Method {
        match self.params {
            ScorerParams::Svm(_) => Method::Svm,
            ScorerParams::Lda(_) => Method::Lda,
            ScorerParams::Nb(_) => Method::Nb,
        }
    }

    /// Training feature width.
    pub fn dimension(&self) -> usize {
        match &self.params {
            ScorerParams::Svm(p) => p.weights.len(),
            ScorerParams::Lda(p) => p.weights.len(),
            ScorerParams::Nb(p) => p.means_pos.len(),
        }
    }

    /// Real-valued decision score; larger means more positive-class.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::data(format!(
                "scorer expects {} features, got {}",
                self.dimension(),
                x.len()
            )));
        }
        Ok(match &self.params {
            ScorerParams::Svm(p) => p.decision(x),
            ScorerParams::Lda(p) => p.decision(x),
            ScorerParams::Nb(p) => p.decision(x),
        })
    }

    /// `score(x) > threshold`; a tie is classified negative.
    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? > self.threshold)
    }

    /// Linear decision weights `(w, b)` with `score = w.x + b`, when the
    /// method is linear (SVM, LDA). Naive Bayes has none.
    pub fn linear_weights(&self) -> Option<(&[f64], f64)> {
        match &self.params {
            ScorerParams::Svm(p) => Some((&p.weights, p.bias)),
            ScorerParams::Lda(p) => Some((&p.weights, p.bias)),
            ScorerParams::Nb(_) => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn with_classes(mut self, positive: impl Into<String>, negative: impl Into<String>) -> Self {
        self.positive = positive.into();
        self.negative = negative.into();
        self
    }
}

/// Splits rows by boolean class, erroring when a class is absent.
pub(crate) fn split_classes<'a>(
    x: &'a crate::features::FeatureMatrix,
    y: &[bool],
) -> Result<(Vec<&'a [f64]>, Vec<&'a [f64]>)> {
    if y.len() != x.nrows() {
        return Err(Error::data(format!(
            "{} labels for {} rows",
            y.len(),
            x.nrows()
        )));
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (row, &is_pos) in x.rows().zip(y) {
        if is_pos {
            pos.push(row);
        } else {
            neg.push(row);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::data("single-class input"));
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureMatrix;

    fn toy() -> (FeatureMatrix, Vec<bool>) {
        let x = FeatureMatrix::from_unnamed_rows(vec![
            vec![-2.0],
            vec![-1.0],
            vec![1.0],
            vec![2.0],
        ])
        .unwrap();
        (x, vec![false, false, true, true])
    }

    #[test]
    fn serialized_scorer_gives_identical_scores() {
        let (x, y) = toy();
        for method in [Method::Svm, Method::Lda, Method::Nb] {
            let scorer = match method {
                Method::Svm => svm_fit(&x, &y, &SvmConfig::default()).unwrap(),
                Method::Lda => lda_fit(&x, &y, None).unwrap(),
                Method::Nb => nb_fit(&x, &y, None).unwrap(),
            };
            let json = scorer.to_json().unwrap();
            let back = BinaryScorer::from_json(&json).unwrap();
            for v in [-3.0, -0.5, 0.0, 0.5, 3.0] {
                let a = scorer.score(&[v]).unwrap();
                let b = back.score(&[v]).unwrap();
                assert_eq!(a.to_bits(), b.to_bits(), "{method} score drifted at {v}");
            }
        }
    }

    #[test]
    fn threshold_sweep_matches_predict_at_zero() {
        let (x, y) = toy();
        let scorer = svm_fit(&x, &y, &SvmConfig::default()).unwrap();
        for v in [-2.5, -1.0, 0.0, 0.1, 1.7] {
            let s = scorer.score(&[v]).unwrap();
            assert_eq!(scorer.predict(&[v]).unwrap(), s > 0.0);
        }
    }

    #[test]
    fn confusion_counts_monotone_in_threshold() {
        let (x, y) = toy();
        let scorer = lda_fit(&x, &y, None).unwrap();
        let scores: Vec<f64> = x.rows().map(|r| scorer.score(r).unwrap()).collect();
        let mut thresholds: Vec<f64> = scores.clone();
        thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev_pos = usize::MAX;
        for t in thresholds {
            let pos = scores.iter().filter(|&&s| s > t).count();
            assert!(pos <= prev_pos, "predicted positives must shrink as threshold rises");
            prev_pos = pos;
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let (x, y) = toy();
        let scorer = nb_fit(&x, &y, None).unwrap();
        assert!(scorer.score(&[1.0, 2.0]).is_err());
    }
}
