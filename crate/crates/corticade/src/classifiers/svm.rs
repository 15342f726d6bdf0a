//! Linear soft-margin SVM trained by sequential pairwise optimization.
//!
//! The solver works on the dual problem
//! `min ½ ΣΣ αᵢαⱼyᵢyⱼ⟨xᵢ,xⱼ⟩ − Σαᵢ` subject to `0 ≤ αᵢ ≤ C`, `Σαᵢyᵢ = 0`,
//! selecting at every iteration the maximal-KKT-violator pair (ties broken
//! by lowest index), so runs reproduce exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::{split_classes, BinaryScorer, ScorerParams};

/// Learned SVM parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Box constraint the model was trained with.
    pub c: f64,
    /// Dual variables, one per training row.
    pub alphas: Vec<f64>,
    pub tolerance: f64,
    pub support_indices: Vec<usize>,
    /// Converged dual objective value.
    pub dual_objective: f64,
}

impl SvmParams {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub tol: f64,
    /// Cap on pair updates before reporting non-convergence.
    pub max_iter: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            tol: 1e-3,
            max_iter: 10_000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fits the soft-margin dual. `y[i]` is true for the positive class.
pub fn svm_fit(x: &FeatureMatrix, y: &[bool], cfg: &SvmConfig) -> Result<BinaryScorer> {
    if cfg.c <= 0.0 {
        return Err(Error::config("svm: C must be positive"));
    }
    if cfg.tol <= 0.0 {
        return Err(Error::config("svm: tol must be positive"));
    }
    split_classes(x, y)?; // validates both classes present
    let n = x.nrows();
    let labels: Vec<f64> = y.iter().map(|&p| if p { 1.0 } else { -1.0 }).collect();

    // Dense Gram matrix; training sets here are a few hundred rows.
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = dot(x.row(i), x.row(j));
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    let k_at = |i: usize, j: usize| gram[i * n + j];

    let c = cfg.c;
    let mut alphas = vec![0.0; n];
    // u[t] = Σ α_j y_j K(j, t): the margin term without bias.
    let mut u = vec![0.0; n];

    let mut iterations = 0usize;
    let (m_up, m_low) = loop {
        // Maximal violating pair over the index sets
        //   I_up:  y=+1, α<C  or  y=−1, α>0
        //   I_low: y=+1, α>0  or  y=−1, α<C
        // with violation measured by y_t − u_t.
        let mut up_best: Option<(usize, f64)> = None;
        let mut low_best: Option<(usize, f64)> = None;
        for t in 0..n {
            let v = labels[t] - u[t];
            let in_up = (labels[t] > 0.0 && alphas[t] < c) || (labels[t] < 0.0 && alphas[t] > 0.0);
            let in_low = (labels[t] > 0.0 && alphas[t] > 0.0) || (labels[t] < 0.0 && alphas[t] < c);
            if in_up && up_best.is_none_or(|(_, best)| v > best) {
                up_best = Some((t, v));
            }
            if in_low && low_best.is_none_or(|(_, best)| v < best) {
                low_best = Some((t, v));
            }
        }
        let (i, m_up) = up_best.ok_or_else(|| Error::numeric("svm: empty working set"))?;
        let (j, m_low) = low_best.ok_or_else(|| Error::numeric("svm: empty working set"))?;
        if m_up - m_low <= cfg.tol {
            break (m_up, m_low);
        }
        if iterations >= cfg.max_iter {
            let best = finish(x, &labels, &alphas, &u, c, cfg.tol, m_up, m_low);
            return Err(Error::SvmNonConvergence {
                iterations,
                violation: m_up - m_low,
                best: Box::new(best),
            });
        }
        iterations += 1;

        let (yi, yj) = (labels[i], labels[j]);
        let s = yi * yj;
        let (lo, hi) = if s < 0.0 {
            ((alphas[j] - alphas[i]).max(0.0), (c + alphas[j] - alphas[i]).min(c))
        } else {
            ((alphas[i] + alphas[j] - c).max(0.0), (alphas[i] + alphas[j]).min(c))
        };
        if hi - lo < 1e-15 && (alphas[j] - lo).abs() < 1e-15 {
            return Err(Error::numeric(
                "svm: degenerate working pair, cannot make progress",
            ));
        }

        let eta = k_at(i, i) + k_at(j, j) - 2.0 * k_at(i, j);
        let err_i = u[i] - yi;
        let err_j = u[j] - yj;
        let new_j = if eta > 1e-12 {
            (alphas[j] + yj * (err_i - err_j) / eta).clamp(lo, hi)
        } else {
            // Flat direction (e.g. duplicate points): move to whichever
            // bound lowers the dual objective.
            let obj_delta = |aj_new: f64| {
                let dj = aj_new - alphas[j];
                let di = -s * dj;
                di * yi * u[i] + dj * yj * u[j]
                    + 0.5 * (di * di * k_at(i, i) + dj * dj * k_at(j, j))
                    + di * dj * s * k_at(i, j)
                    - di
                    - dj
            };
            if obj_delta(lo) <= obj_delta(hi) {
                lo
            } else {
                hi
            }
        };
        let new_i = alphas[i] + s * (alphas[j] - new_j);
        let (new_i, new_j) = (snap(new_i, c), snap(new_j, c));
        let di = new_i - alphas[i];
        let dj = new_j - alphas[j];
        if di == 0.0 && dj == 0.0 {
            return Err(Error::numeric(
                "svm: working pair update stalled before reaching tolerance",
            ));
        }
        alphas[i] = new_i;
        alphas[j] = new_j;
        for t in 0..n {
            u[t] += di * yi * k_at(i, t) + dj * yj * k_at(j, t);
        }
    };

    Ok(finish(x, &labels, &alphas, &u, c, cfg.tol, m_up, m_low))
}

fn snap(a: f64, c: f64) -> f64 {
    if a < 1e-12 {
        0.0
    } else if a > c - 1e-12 {
        c
    } else {
        a
    }
}

fn finish(
    x: &FeatureMatrix,
    labels: &[f64],
    alphas: &[f64],
    u: &[f64],
    c: f64,
    tol: f64,
    m_up: f64,
    m_low: f64,
) -> BinaryScorer {
    let n = x.nrows();
    let d = x.ncols();
    let mut weights = vec![0.0; d];
    let mut support = Vec::new();
    for i in 0..n {
        if alphas[i] > 1e-8 * c {
            support.push(i);
            let coeff = alphas[i] * labels[i];
            for (w, v) in weights.iter_mut().zip(x.row(i)) {
                *w += coeff * v;
            }
        }
    }
    // Bias from free support vectors when any exist, else the midpoint of
    // the KKT interval.
    let free: Vec<usize> = (0..n)
        .filter(|&i| alphas[i] > 1e-8 * c && alphas[i] < c * (1.0 - 1e-8))
        .collect();
    let bias = if free.is_empty() {
        0.5 * (m_up + m_low)
    } else {
        free.iter().map(|&i| labels[i] - u[i]).sum::<f64>() / free.len() as f64
    };
    let dual_objective = 0.5
        * (0..n)
            .map(|i| alphas[i] * labels[i] * u[i])
            .sum::<f64>()
        - alphas.iter().sum::<f64>();
    BinaryScorer {
        params: ScorerParams::Svm(SvmParams {
            weights,
            bias,
            c,
            alphas: alphas.to_vec(),
            tolerance: tol,
            support_indices: support,
            dual_objective,
        }),
        positive: "positive".into(),
        negative: "negative".into(),
        threshold: 0.0,
    }
}
