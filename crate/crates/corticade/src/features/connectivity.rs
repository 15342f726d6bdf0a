//! Region-to-region connectivity matrices from mean-thickness vectors.
//!
//! Each subject's connectivity weight between regions i and j is a Gaussian
//! kernel of the distance between the two regions' mean thickness values:
//! `w_ij = exp(−(m_i − m_j)² / (2σ²))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric region×region weight matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityMatrix {
    regions: usize,
    /// Row-major weights.
    weights: Vec<f64>,
    pub sigma: f64,
}

impl ConnectivityMatrix {
    pub fn regions(&self) -> usize {
        self.regions
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.regions + j]
    }

    /// Strict upper triangle, row-major: length r(r−1)/2.
    pub fn vectorize(&self) -> Vec<f64> {
        let r = self.regions;
        let mut v = Vec::with_capacity(r * (r - 1) / 2);
        for i in 0..r {
            for j in (i + 1)..r {
                v.push(self.get(i, j));
            }
        }
        v
    }

    /// Rebuilds a matrix from a vectorized upper triangle.
    pub fn devectorize(v: &[f64], sigma: f64) -> Result<Self> {
        // r(r−1)/2 = len  =>  r = (1 + sqrt(1 + 8·len)) / 2
        let len = v.len();
        let r = ((1.0 + ((1 + 8 * len) as f64).sqrt()) / 2.0).round() as usize;
        if r < 2 || r * (r - 1) / 2 != len {
            return Err(Error::data(format!(
                "connectivity: {len} values is not a strict upper triangle"
            )));
        }
        let mut weights = vec![1.0; r * r];
        let mut it = v.iter();
        for i in 0..r {
            for j in (i + 1)..r {
                let w = *it.next().unwrap();
                weights[i * r + j] = w;
                weights[j * r + i] = w;
            }
        }
        Ok(ConnectivityMatrix {
            regions: r,
            weights,
            sigma,
        })
    }
}

/// Builds the connectivity matrix for one subject's region means.
pub fn connectivity(region_means: &[f64], sigma: f64) -> Result<ConnectivityMatrix> {
    if sigma <= 0.0 {
        return Err(Error::config("connectivity: bandwidth must be positive"));
    }
    let r = region_means.len();
    if r < 2 {
        return Err(Error::data("connectivity: need at least 2 regions"));
    }
    let mut weights = vec![0.0; r * r];
    for i in 0..r {
        weights[i * r + i] = 1.0;
        for j in (i + 1)..r {
            let d = region_means[i] - region_means[j];
            let w = (-d * d / (2.0 * sigma * sigma)).exp();
            weights[i * r + j] = w;
            weights[j * r + i] = w;
        }
    }
    Ok(ConnectivityMatrix {
        regions: r,
        weights,
        sigma,
    })
}

/// Median of the nonzero pairwise |m_i − m_j| over the given rows; the
/// default kernel bandwidth. Falls back to 1.0 when every distance is zero.
pub fn median_bandwidth<'a>(rows: impl Iterator<Item = &'a [f64]>) -> f64 {
    let mut distances = Vec::new();
    for row in rows {
        for i in 0..row.len() {
            for j in (i + 1)..row.len() {
                let d = (row[i] - row[j]).abs();
                if d > 0.0 {
                    distances.push(d);
                }
            }
        }
    }
    if distances.is_empty() {
        return 1.0;
    }
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = distances.len() / 2;
    if distances.len() % 2 == 1 {
        distances[mid]
    } else {
        0.5 * (distances[mid - 1] + distances[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn equal_means_give_unit_weights() {
        let c = connectivity(&[2.0, 2.0, 2.0], 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn two_region_analytic_weight() {
        let c = connectivity(&[1.0, 3.0], 1.0).unwrap();
        assert_relative_eq!(c.get(0, 1), (-2.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(c.get(0, 1), 0.13534, epsilon = 1e-5);
    }

    #[test]
    fn symmetric_with_unit_diagonal() {
        let c = connectivity(&[0.5, 1.7, 2.9, 2.2], 0.8).unwrap();
        for i in 0..4 {
            assert_eq!(c.get(i, i), 1.0);
            for j in 0..4 {
                assert_eq!(c.get(i, j), c.get(j, i));
            }
        }
    }

    #[test]
    fn weights_decrease_with_distance() {
        let c = connectivity(&[0.0, 1.0, 3.0], 1.0).unwrap();
        assert!(c.get(0, 1) > c.get(0, 2));
    }

    #[test]
    fn vectorize_lengths() {
        let c2 = connectivity(&[1.0, 2.0], 1.0).unwrap();
        assert_eq!(c2.vectorize().len(), 1);
        let c4 = connectivity(&[1.0, 2.0, 3.0, 4.0], 1.0).unwrap();
        assert_eq!(c4.vectorize().len(), 6);
    }

    #[test]
    fn devectorize_round_trip() {
        let c = connectivity(&[0.1, 1.3, 2.9, 0.7, 1.9], 0.6).unwrap();
        let v = c.vectorize();
        let back = ConnectivityMatrix::devectorize(&v, c.sigma).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn median_bandwidth_ignores_zero_distances() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 1.0, 2.0]];
        // distances: |1-1|=0 (dropped), |1-2|=1, |1-2|=1 → median 1.
        let sigma = median_bandwidth(rows.iter().map(|r| r.as_slice()));
        assert_eq!(sigma, 1.0);
    }

    #[test]
    fn non_positive_bandwidth_rejected() {
        assert!(connectivity(&[1.0, 2.0], 0.0).is_err());
        assert!(connectivity(&[1.0, 2.0], -1.0).is_err());
    }
}
