//! Feature matrices, connectivity construction, and PCA reduction.

mod connectivity;
mod matrix;
mod pca;

pub use connectivity::{connectivity, median_bandwidth, ConnectivityMatrix};
pub use matrix::FeatureMatrix;
pub use pca::{identity_pca, pca_fit, ComponentPolicy, PcaModel};
