//! Principal component analysis on the sample covariance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::FeatureMatrix;

/// How many components to retain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentPolicy {
    /// Smallest count whose cumulative explained variance reaches the
    /// fraction (in (0, 1]).
    VarianceFraction(f64),
    /// Exact count, clamped to the data rank.
    Fixed(usize),
}

impl Default for ComponentPolicy {
    fn default() -> Self {
        ComponentPolicy::VarianceFraction(0.95)
    }
}

/// A fitted projection: column means, orthonormal principal directions
/// (stored one per row), explained variances in descending order, and the
/// retained count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub means: Vec<f64>,
    /// `directions[i]` is the i-th principal direction (length = feature
    /// count); directions are orthonormal and sign-fixed so each one's
    /// largest-magnitude entry is non-negative.
    pub directions: Vec<Vec<f64>>,
    /// Explained variances, descending, for all computed components.
    pub eigenvalues: Vec<f64>,
    /// Number of directions used by `transform`.
    pub k: usize,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

const RANK_EPS: f64 = 1e-12;

/// Fits PCA on the 1/(n−1) sample covariance of centered rows. Uses the
/// covariance eigendecomposition when features ≤ subjects and the Gram-matrix
/// route otherwise; the two give identical results.
pub fn pca_fit(x: &FeatureMatrix, policy: ComponentPolicy) -> Result<PcaModel> {
    let n = x.nrows();
    let d = x.ncols();
    if n < 2 {
        return Err(Error::data("pca: need at least 2 rows"));
    }
    if d == 0 {
        return Err(Error::data("pca: zero feature columns"));
    }
    if let ComponentPolicy::VarianceFraction(f) = policy {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::config(format!(
                "pca: variance fraction {f} outside (0, 1]"
            )));
        }
    }

    let means = x.column_means();
    // Centered data, rows = subjects.
    let centered = DMatrix::from_fn(n, d, |i, j| x.get(i, j) - means[j]);
    let denom = (n - 1) as f64;

    let (mut eigenvalues, mut directions): (Vec<f64>, Vec<Vec<f64>>) = if d <= n {
        let cov = centered.transpose() * &centered / denom;
        let eig = SymmetricEigen::new(cov);
        let mut pairs: Vec<(f64, DVector<f64>)> = (0..d)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        pairs
            .into_iter()
            .map(|(l, v)| (l.max(0.0), v.iter().copied().collect::<Vec<f64>>()))
            .unzip()
    } else {
        // Gram route: eigen of (X Xᵀ)/(n−1); directions are Xᵀu rescaled.
        let gram = &centered * centered.transpose() / denom;
        let eig = SymmetricEigen::new(gram);
        let mut pairs: Vec<(f64, DVector<f64>)> = (0..n)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut vals = Vec::new();
        let mut dirs = Vec::new();
        for (l, u) in pairs {
            let l = l.max(0.0);
            let v = centered.transpose() * u;
            let norm = v.norm();
            if norm > RANK_EPS {
                dirs.push((v / norm).iter().copied().collect::<Vec<f64>>());
                vals.push(l);
            } else {
                vals.push(0.0);
                dirs.push(vec![0.0; d]);
            }
        }
        (vals, dirs)
    };

    let total: f64 = eigenvalues.iter().sum();
    if total <= RANK_EPS {
        return Err(Error::data("pca: zero-variance data"));
    }

    // Fix eigenvector signs: largest-magnitude entry non-negative.
    for dir in directions.iter_mut() {
        let lead = dir
            .iter()
            .cloned()
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap_or(0.0);
        if lead < 0.0 {
            dir.iter_mut().for_each(|v| *v = -*v);
        }
    }

    let rank = eigenvalues
        .iter()
        .filter(|&&l| l > RANK_EPS * total)
        .count()
        .max(1);
    let mut warnings = Vec::new();
    let k = match policy {
        ComponentPolicy::VarianceFraction(f) => {
            let mut cum = 0.0;
            let mut k = rank;
            for (i, l) in eigenvalues.iter().enumerate() {
                cum += l;
                if cum / total >= f {
                    k = i + 1;
                    break;
                }
            }
            k
        }
        ComponentPolicy::Fixed(requested) => {
            if requested == 0 {
                return Err(Error::config("pca: fixed component count must be >= 1"));
            }
            if requested > rank {
                warnings.push(format!(
                    "pca: requested {requested} components, clamped to rank {rank}"
                ));
                rank
            } else {
                requested
            }
        }
    };

    eigenvalues.truncate(rank.max(k));
    directions.truncate(rank.max(k));

    Ok(PcaModel {
        means,
        directions,
        eigenvalues,
        k,
        warnings,
    })
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.means.len()
    }

    /// Projects centered rows onto the retained directions.
    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.ncols() != self.input_dim() {
            return Err(Error::data(format!(
                "pca: matrix has {} columns, model was fit on {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        let rows: Vec<Vec<f64>> = x
            .rows()
            .map(|row| self.transform_row(row))
            .collect::<Result<_>>()?;
        let names = (1..=self.k).map(|i| format!("pc_{i}")).collect();
        FeatureMatrix::from_rows(rows, names, x.row_ids().to_vec())
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.input_dim() {
            return Err(Error::data(format!(
                "pca: row has {} values, model was fit on {}",
                row.len(),
                self.input_dim()
            )));
        }
        Ok(self
            .directions
            .iter()
            .take(self.k)
            .map(|dir| {
                dir.iter()
                    .zip(row)
                    .zip(&self.means)
                    .map(|((w, v), m)| w * (v - m))
                    .sum()
            })
            .collect())
    }

    /// Reconstruction μ + scores·directions for a transformed row.
    pub fn inverse_transform_row(&self, scores: &[f64]) -> Result<Vec<f64>> {
        if scores.len() > self.directions.len() {
            return Err(Error::data(format!(
                "pca: {} scores exceed {} available directions",
                scores.len(),
                self.directions.len()
            )));
        }
        let mut row = self.means.clone();
        for (s, dir) in scores.iter().zip(&self.directions) {
            for (r, w) in row.iter_mut().zip(dir) {
                *r += s * w;
            }
        }
        Ok(row)
    }

    /// The retained directions as a (features × k) matrix.
    pub fn direction_matrix(&self) -> DMatrix<f64> {
        let d = self.input_dim();
        DMatrix::from_fn(d, self.k, |i, j| self.directions[j][i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// An identity "projection" used when PCA is disabled: k = d, unit directions.
pub fn identity_pca(d: usize) -> PcaModel {
    PcaModel {
        means: vec![0.0; d],
        directions: (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v
            })
            .collect(),
        eigenvalues: vec![1.0; d],
        k: d,
        warnings: Vec::new(),
    }
}
