//! The flat five-class baseline: one-vs-rest SVM heads, or multiclass
//! Gaussian argmax rules for LDA and Naive Bayes, over one shared PCA.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classifiers::{svm_fit, BinaryScorer};
use crate::dataset::{Cohort, DiagnosticLabel};
use crate::error::{Error, Result};
use crate::features::{identity_pca, pca_fit, FeatureMatrix, PcaModel};

use super::cascade::{TrainConfig, TrainMethod};

/// Per-method flat-model parameters. Class order is canonical
/// (CN, AD, bvFTD, nfvPPA, svPPA) everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatParams {
    /// One SVM head per class, scored one-vs-rest.
    SvmOneVsRest { heads: Vec<BinaryScorer> },
    /// Shared-covariance Gaussian discriminants: δ_c(x) = w_c·x + b_c.
    LdaMulticlass {
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
    },
    /// Per-class diagonal Gaussian log-likelihood plus log prior.
    NbMulticlass {
        means: Vec<Vec<f64>>,
        vars: Vec<Vec<f64>>,
        log_priors: Vec<f64>,
    },
    /// Returns the reference label; evaluation-harness baseline.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatModel {
    pub pca: PcaModel,
    pub params: FlatParams,
}

/// Trains the flat model on a cohort's stored features.
pub fn train_flat(cohort: &Cohort, cfg: &TrainConfig) -> Result<FlatModel> {
    let x = FeatureMatrix::from_cohort(cohort);
    train_flat_matrix(&x, &cohort.labels(), cfg)
}

/// Trains the flat model on an explicit feature matrix. All five classes
/// must be present.
pub fn train_flat_matrix(
    x: &FeatureMatrix,
    labels: &[DiagnosticLabel],
    cfg: &TrainConfig,
) -> Result<FlatModel> {
    if labels.len() != x.nrows() {
        return Err(Error::data(format!(
            "flat: {} labels for {} rows",
            labels.len(),
            x.nrows()
        )));
    }
    let mut counts = [0usize; 5];
    for l in labels {
        counts[l.canonical_index()] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(Error::data(format!(
                "flat: missing class {}",
                DiagnosticLabel::ALL[i]
            )));
        }
    }

    if cfg.method == TrainMethod::Oracle {
        return Ok(FlatModel {
            pca: identity_pca(x.ncols()),
            params: FlatParams::Oracle,
        });
    }

    let pca = if cfg.skip_pca {
        identity_pca(x.ncols())
    } else {
        pca_fit(x, cfg.pca)?
    };
    let projected = pca.transform(x)?;
    let params = match cfg.method {
        TrainMethod::Svm => {
            let mut heads = Vec::with_capacity(5);
            for class in DiagnosticLabel::ALL {
                let y: Vec<bool> = labels.iter().map(|&l| l == class).collect();
                let head = svm_fit(&projected, &y, &cfg.svm)?
                    .with_classes(class.to_string(), "rest");
                heads.push(head);
            }
            FlatParams::SvmOneVsRest { heads }
        }
        TrainMethod::Lda => fit_lda_multiclass(&projected, labels, cfg.lda_shrinkage)?,
        TrainMethod::Nb => fit_nb_multiclass(&projected, labels, cfg.nb_var_floor)?,
        TrainMethod::Oracle => unreachable!(),
    };
    Ok(FlatModel { pca, params })
}

fn class_rows<'a>(x: &'a FeatureMatrix, labels: &[DiagnosticLabel]) -> Vec<Vec<&'a [f64]>> {
    let mut by_class: Vec<Vec<&[f64]>> = vec![Vec::new(); 5];
    for (row, l) in x.rows().zip(labels) {
        by_class[l.canonical_index()].push(row);
    }
    by_class
}

fn fit_lda_multiclass(
    x: &FeatureMatrix,
    labels: &[DiagnosticLabel],
    shrinkage: Option<f64>,
) -> Result<FlatParams> {
    let d = x.ncols();
    let n = x.nrows() as f64;
    let by_class = class_rows(x, labels);
    if by_class.iter().any(|rows| rows.len() < 2) {
        return Err(Error::data("flat lda: each class needs at least 2 subjects"));
    }

    let means: Vec<Vec<f64>> = by_class
        .iter()
        .map(|rows| {
            let mut m = vec![0.0; d];
            for row in rows {
                for (acc, v) in m.iter_mut().zip(*row) {
                    *acc += v;
                }
            }
            m.iter_mut().for_each(|v| *v /= rows.len() as f64);
            m
        })
        .collect();

    let mut scatter = DMatrix::<f64>::zeros(d, d);
    for (rows, mean) in by_class.iter().zip(&means) {
        for row in rows {
            let dev = DVector::from_iterator(d, row.iter().zip(mean).map(|(v, m)| v - m));
            scatter.syger(1.0, &dev, &dev, 1.0);
        }
    }
    let mut pooled = scatter / n;
    let lambda = match shrinkage {
        Some(l) if l < 0.0 => return Err(Error::config("flat lda: negative shrinkage")),
        Some(l) => l.max(1e-12),
        None => (1e-6 * pooled.trace() / d as f64).max(1e-12),
    };
    for i in 0..d {
        pooled[(i, i)] += lambda;
    }
    let chol = Cholesky::new(pooled)
        .ok_or_else(|| Error::numeric("flat lda: covariance not positive definite"))?;

    let mut weights = Vec::with_capacity(5);
    let mut biases = Vec::with_capacity(5);
    for (rows, mean) in by_class.iter().zip(&means) {
        let mu = DVector::from_column_slice(mean);
        let w = chol.solve(&mu);
        let prior = rows.len() as f64 / n;
        let bias = -0.5 * w.dot(&mu) + prior.ln();
        weights.push(w.iter().copied().collect());
        biases.push(bias);
    }
    Ok(FlatParams::LdaMulticlass { weights, biases })
}

fn fit_nb_multiclass(
    x: &FeatureMatrix,
    labels: &[DiagnosticLabel],
    var_floor: Option<f64>,
) -> Result<FlatParams> {
    let d = x.ncols();
    let n = x.nrows() as f64;
    let by_class = class_rows(x, labels);

    let moments = |rows: &[&[f64]]| {
        let m = rows.len() as f64;
        let mut means = vec![0.0; d];
        for row in rows {
            for (acc, v) in means.iter_mut().zip(*row) {
                *acc += v;
            }
        }
        means.iter_mut().for_each(|v| *v /= m);
        let mut vars = vec![0.0; d];
        for row in rows {
            for ((var, v), mu) in vars.iter_mut().zip(*row).zip(&means) {
                let dev = v - mu;
                *var += dev * dev;
            }
        }
        vars.iter_mut().for_each(|v| *v /= m);
        (means, vars)
    };

    let floor = match var_floor {
        Some(f) if f <= 0.0 => return Err(Error::config("flat nb: variance floor must be positive")),
        Some(f) => f,
        None => {
            let all: Vec<&[f64]> = x.rows().collect();
            let (_, global) = moments(&all);
            (1e-9 * global.iter().cloned().fold(0.0, f64::max)).max(1e-9)
        }
    };

    let mut means = Vec::with_capacity(5);
    let mut vars = Vec::with_capacity(5);
    let mut log_priors = Vec::with_capacity(5);
    for rows in &by_class {
        let (m, mut v) = moments(rows);
        v.iter_mut().for_each(|x| *x = x.max(floor));
        means.push(m);
        vars.push(v);
        log_priors.push((rows.len() as f64 / n).ln());
    }
    Ok(FlatParams::NbMulticlass {
        means,
        vars,
        log_priors,
    })
}

impl FlatModel {
    /// Per-class decision scores in canonical order.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let projected = self.pca.transform_row(x)?;
        match &self.params {
            FlatParams::SvmOneVsRest { heads } => {
                heads.iter().map(|h| h.score(&projected)).collect()
            }
            FlatParams::LdaMulticlass { weights, biases } => Ok(weights
                .iter()
                .zip(biases)
                .map(|(w, b)| w.iter().zip(&projected).map(|(wi, v)| wi * v).sum::<f64>() + b)
                .collect()),
            FlatParams::NbMulticlass {
                means,
                vars,
                log_priors,
            } => Ok(means
                .iter()
                .zip(vars)
                .zip(log_priors)
                .map(|((m, var), prior)| {
                    let mut score = *prior;
                    for ((v, mu), s2) in projected.iter().zip(m).zip(var) {
                        let dev = v - mu;
                        score += -0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + dev * dev / s2);
                    }
                    score
                })
                .collect()),
            FlatParams::Oracle => Err(Error::data("oracle flat model requires a reference label")),
        }
    }

    /// Argmax over classes; exact ties go to the lower canonical label.
    pub fn classify(&self, x: &[f64]) -> Result<(DiagnosticLabel, Vec<f64>)> {
        let scores = self.scores(x)?;
        let mut best = 0usize;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        Ok((DiagnosticLabel::ALL[best], scores))
    }

    /// Oracle-aware classification for the evaluation harness.
    pub fn classify_with_reference(
        &self,
        x: &[f64],
        reference: DiagnosticLabel,
    ) -> Result<(DiagnosticLabel, Vec<f64>)> {
        match &self.params {
            FlatParams::Oracle => {
                let mut scores = vec![0.0; 5];
                scores[reference.canonical_index()] = 1.0;
                Ok((reference, scores))
            }
            _ => self.classify(x),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}
