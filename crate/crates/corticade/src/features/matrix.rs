//! Row-per-subject feature matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Cohort;
use crate::error::{Error, Result};

/// A dense numeric matrix, rows = subjects, columns = features, with column
/// names and row ids. Rectangular and all-finite by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    nrows: usize,
    ncols: usize,
    /// Row-major values.
    data: Vec<f64>,
    column_names: Vec<String>,
    row_ids: Vec<String>,
}

impl FeatureMatrix {
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        column_names: Vec<String>,
        row_ids: Vec<String>,
    ) -> Result<Self> {
        let nrows = rows.len();
        let ncols = column_names.len();
        if row_ids.len() != nrows {
            return Err(Error::data(format!(
                "feature matrix: {} row ids for {nrows} rows",
                row_ids.len()
            )));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::data(format!(
                    "feature matrix: row {i} has {} values, expected {ncols}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::data(format!(
                    "feature matrix: non-finite value in row {i}"
                )));
            }
            data.extend(row);
        }
        Ok(FeatureMatrix {
            nrows,
            ncols,
            data,
            column_names,
            row_ids,
        })
    }

    /// Anonymous rows: columns named `c_1..c_n`, row ids `0..nrows`.
    pub fn from_unnamed_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let names = (1..=ncols).map(|j| format!("c_{j}")).collect();
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::from_rows(rows, names, ids)
    }

    /// The cohort's feature vectors in cohort order.
    pub fn from_cohort(cohort: &Cohort) -> Self {
        let rows: Vec<Vec<f64>> = cohort.subjects().iter().map(|s| s.features.clone()).collect();
        let ids = cohort.subjects().iter().map(|s| s.id.clone()).collect();
        // Cohort invariants already guarantee shape and finiteness.
        Self::from_rows(rows, cohort.feature_names().to_vec(), ids)
            .expect("cohort invariants guarantee a valid matrix")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.ncols.max(1))
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.ncols];
        for row in self.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.nrows.max(1) as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// New matrix keeping `indices` rows, in the given order.
    pub fn subset_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.ncols);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.nrows {
                return Err(Error::data(format!(
                    "feature matrix: row index {i} out of range ({} rows)",
                    self.nrows
                )));
            }
            data.extend_from_slice(self.row(i));
            ids.push(self.row_ids[i].clone());
        }
        Ok(FeatureMatrix {
            nrows: indices.len(),
            ncols: self.ncols,
            data,
            column_names: self.column_names.clone(),
            row_ids: ids,
        })
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.nrows, self.ncols, &self.data)
    }
}
