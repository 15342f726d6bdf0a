//! Linear discriminant analysis with shrinkage-regularized pooled covariance.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::{split_classes, BinaryScorer, ScorerParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    /// Projection w = Σ̂⁻¹(μ₊ − μ₋).
    pub weights: Vec<f64>,
    /// Constant term so that decision(x) = w·x + bias.
    pub bias: f64,
    pub mean_pos: Vec<f64>,
    pub mean_neg: Vec<f64>,
    /// Shrinkage λ added to the pooled covariance diagonal.
    pub shrinkage: f64,
    pub log_prior_ratio: f64,
}

impl LdaParams {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// Fits LDA. `shrinkage` overrides the default rule
/// λ = 1e-6 · trace(Σ_pooled)/d (floored at 1e-12 so the covariance stays
/// positive definite on degenerate data). Pooling uses the 1/N maximum
/// likelihood normalization.
pub fn lda_fit(x: &FeatureMatrix, y: &[bool], shrinkage: Option<f64>) -> Result<BinaryScorer> {
    let (pos, neg) = split_classes(x, y)?;
    if pos.len() < 2 || neg.len() < 2 {
        return Err(Error::data("lda: each class needs at least 2 samples"));
    }
    let d = x.ncols();
    if d == 0 {
        return Err(Error::data("lda: zero feature dimensions"));
    }
    let n = (pos.len() + neg.len()) as f64;

    let mean_of = |rows: &[&[f64]]| -> Vec<f64> {
        let mut m = vec![0.0; d];
        for row in rows {
            for (acc, v) in m.iter_mut().zip(*row) {
                *acc += v;
            }
        }
        m.iter_mut().for_each(|v| *v /= rows.len() as f64);
        m
    };
    let mean_pos = mean_of(&pos);
    let mean_neg = mean_of(&neg);

    let mut scatter = DMatrix::<f64>::zeros(d, d);
    for (rows, mean) in [(&pos, &mean_pos), (&neg, &mean_neg)] {
        for row in rows.iter() {
            let dev = DVector::from_iterator(d, row.iter().zip(mean).map(|(v, m)| v - m));
            scatter.syger(1.0, &dev, &dev, 1.0);
        }
    }
    let mut pooled = scatter / n;

    let lambda = match shrinkage {
        Some(l) if l < 0.0 => return Err(Error::config("lda: negative shrinkage")),
        Some(l) => l.max(1e-12),
        None => (1e-6 * pooled.trace() / d as f64).max(1e-12),
    };
    for i in 0..d {
        pooled[(i, i)] += lambda;
    }

    let mean_diff = DVector::from_iterator(d, mean_pos.iter().zip(&mean_neg).map(|(p, q)| p - q));
    let chol = Cholesky::new(pooled)
        .ok_or_else(|| Error::numeric("lda: pooled covariance not positive definite"))?;
    let w = chol.solve(&mean_diff);

    let prior_pos = pos.len() as f64 / n;
    let log_prior_ratio = (prior_pos / (1.0 - prior_pos)).ln();
    let midpoint: Vec<f64> = mean_pos
        .iter()
        .zip(&mean_neg)
        .map(|(p, q)| 0.5 * (p + q))
        .collect();
    let bias = log_prior_ratio - w.iter().zip(&midpoint).map(|(wi, mi)| wi * mi).sum::<f64>();

    Ok(BinaryScorer {
        params: ScorerParams::Lda(LdaParams {
            weights: w.iter().copied().collect(),
            bias,
            mean_pos,
            mean_neg,
            shrinkage: lambda,
            log_prior_ratio,
        }),
        positive: "positive".into(),
        negative: "negative".into(),
        threshold: 0.0,
    })
}
