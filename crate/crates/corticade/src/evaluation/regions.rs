//! Discriminative-region scores from a linear decision chain:
//! `R = Σx · w₁` with `Σx = X Xᵀ` (X features × subjects) and
//! `w₁ = Y_PCA · Y_C` (projection directions times classifier weights).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, PcaModel};
use crate::surface::{from_frequency, SpectralBasis};

/// Per-feature importance scores with a |R|-descending ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminativeRegionMap {
    /// R, one value per input feature.
    pub scores: Vec<f64>,
    /// Feature indices sorted by |R| descending (ties by index).
    pub ranking: Vec<usize>,
    pub feature_names: Vec<String>,
}

/// Computes R for one linear decision. `x_filtered` holds the already
/// filtered (smoothed, centered) features, rows = subjects; it is used as
/// X = d×n (features × subjects). `classifier_weights` is Y_C, the linear
/// decision weights in the PCA-reduced space (length = retained k).
pub fn discriminative_regions(
    x_filtered: &FeatureMatrix,
    pca: &PcaModel,
    classifier_weights: &[f64],
) -> Result<DiscriminativeRegionMap> {
    let d = x_filtered.ncols();
    if pca.input_dim() != d {
        return Err(Error::data(format!(
            "regions: projection expects {} features, matrix has {d}",
            pca.input_dim()
        )));
    }
    if classifier_weights.len() != pca.k {
        return Err(Error::data(format!(
            "regions: classifier has {} weights, projection retains {}",
            classifier_weights.len(),
            pca.k
        )));
    }
    if classifier_weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::data("regions: non-finite classifier weight"));
    }

    // X is d×n; the stored matrix is n×d.
    let xt = x_filtered.to_dmatrix().transpose();
    let sigma_x = &xt * xt.transpose(); // d×d
    let y_pca = pca.direction_matrix(); // d×k
    let y_c = DVector::from_column_slice(classifier_weights); // k
    let w1 = y_pca * y_c; // d
    let r = sigma_x * w1; // d

    let scores: Vec<f64> = r.iter().copied().collect();
    let mut ranking: Vec<usize> = (0..d).collect();
    ranking.sort_by(|&a, &b| {
        scores[b]
            .abs()
            .partial_cmp(&scores[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    Ok(DiscriminativeRegionMap {
        scores,
        ranking,
        feature_names: x_filtered.column_names().to_vec(),
    })
}

/// Back-projects frequency-domain scores to the mesh: the inverse spectral
/// transform of R, giving one value per vertex. Only meaningful when the
/// features are spectral coefficients over `basis`.
pub fn backproject_frequency_scores(
    map: &DiscriminativeRegionMap,
    basis: &SpectralBasis,
) -> Result<Vec<f64>> {
    let reconstructed = from_frequency(&map.scores, basis)?;
    Ok(reconstructed.values().to_vec())
}

/// Convenience: identity projection matrix as a `DMatrix` (used in tests).
pub fn identity_matrix(d: usize) -> DMatrix<f64> {
    DMatrix::identity(d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::identity_pca;
    use approx::assert_relative_eq;

    fn identity_features(n: usize) -> FeatureMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                r
            })
            .collect();
        FeatureMatrix::from_unnamed_rows(rows).unwrap()
    }

    #[test]
    fn identity_algebra() {
        let n = 4;
        let x = identity_features(n);
        let pca = identity_pca(n);
        let mut y_c = vec![0.0; n];
        y_c[0] = 1.0;
        let map = discriminative_regions(&x, &pca, &y_c).unwrap();
        assert_eq!(map.scores, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(map.ranking[0], 0);
    }

    #[test]
    fn doubling_x_scales_r_by_four() {
        let x = FeatureMatrix::from_unnamed_rows(vec![
            vec![1.0, 0.5, -0.2],
            vec![-0.3, 0.8, 0.1],
            vec![0.4, -0.6, 0.9],
        ])
        .unwrap();
        let doubled = FeatureMatrix::from_unnamed_rows(
            x.rows().map(|r| r.iter().map(|v| 2.0 * v).collect()).collect(),
        )
        .unwrap();
        let pca = identity_pca(3);
        let w = vec![0.7, -0.4, 0.2];
        let a = discriminative_regions(&x, &pca, &w).unwrap();
        let b = discriminative_regions(&doubled, &pca, &w).unwrap();
        for (x4, y) in a.scores.iter().zip(&b.scores) {
            assert_relative_eq!(4.0 * x4, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn dimension_chain_checked() {
        let x = identity_features(3);
        let pca = identity_pca(3);
        assert!(discriminative_regions(&x, &pca, &[1.0, 0.0]).is_err());
        let pca4 = identity_pca(4);
        assert!(discriminative_regions(&x, &pca4, &[1.0, 0.0, 0.0, 0.0]).is_err());
    }
}
