//! Gaussian Naive Bayes with a global variance floor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::{split_classes, BinaryScorer, ScorerParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    pub means_pos: Vec<f64>,
    pub vars_pos: Vec<f64>,
    pub means_neg: Vec<f64>,
    pub vars_neg: Vec<f64>,
    pub log_prior_pos: f64,
    pub log_prior_neg: f64,
    /// Floor applied to every per-class variance.
    pub var_floor: f64,
}

impl NbParams {
    pub fn decision(&self, x: &[f64]) -> f64 {
        let mut score = self.log_prior_pos - self.log_prior_neg;
        for (j, &v) in x.iter().enumerate() {
            score += log_gaussian(v, self.means_pos[j], self.vars_pos[j])
                - log_gaussian(v, self.means_neg[j], self.vars_neg[j]);
        }
        score
    }
}

fn log_gaussian(x: f64, mean: f64, var: f64) -> f64 {
    let dev = x - mean;
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + dev * dev / var)
}

/// Fits per-class, per-feature Gaussians (1/n variances). `var_floor`
/// overrides the default rule: 1e-9 times the largest per-feature variance
/// of the whole training set, with an absolute floor of 1e-9 when the data
/// is entirely constant.
pub fn nb_fit(x: &FeatureMatrix, y: &[bool], var_floor: Option<f64>) -> Result<BinaryScorer> {
    let (pos, neg) = split_classes(x, y)?;
    let d = x.ncols();

    let moments = |rows: &[&[f64]]| -> (Vec<f64>, Vec<f64>) {
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for row in rows {
            for (m, v) in means.iter_mut().zip(*row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for row in rows {
            for ((var, v), m) in vars.iter_mut().zip(*row).zip(&means) {
                let dev = v - m;
                *var += dev * dev;
            }
        }
        vars.iter_mut().for_each(|v| *v /= n);
        (means, vars)
    };

    let (means_pos, mut vars_pos) = moments(&pos);
    let (means_neg, mut vars_neg) = moments(&neg);

    let floor = match var_floor {
        Some(f) if f <= 0.0 => return Err(Error::config("nb: variance floor must be positive")),
        Some(f) => f,
        None => {
            // Global per-feature variance over all rows, biased.
            let all: Vec<&[f64]> = x.rows().collect();
            let (_, global_vars) = moments(&all);
            let max_var = global_vars.iter().cloned().fold(0.0, f64::max);
            (1e-9 * max_var).max(1e-9)
        }
    };
    vars_pos.iter_mut().for_each(|v| *v = v.max(floor));
    vars_neg.iter_mut().for_each(|v| *v = v.max(floor));

    let n = (pos.len() + neg.len()) as f64;
    Ok(BinaryScorer {
        params: ScorerParams::Nb(NbParams {
            means_pos,
            vars_pos,
            means_neg,
            vars_neg,
            log_prior_pos: (pos.len() as f64 / n).ln(),
            log_prior_neg: (neg.len() as f64 / n).ln(),
            var_floor: floor,
        }),
        positive: "positive".into(),
        negative: "negative".into(),
        threshold: 0.0,
    })
}
